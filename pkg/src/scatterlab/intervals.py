"""Lazily refined interval trees over an ordinal segment [0, eta).

The root interval splits along a canonical increasing sequence, each piece
splits again, and so on.  Limit-ended intervals split into e_budget
consecutive children cut at their marker sequence; successor-ended
intervals split into a front segment and a trailing singleton; singletons
are leaves and persist unchanged through deeper levels.

Every node's marker sequence starts at the node's own left endpoint, so
walking down the tree drives each point's containing interval toward an
interval that starts exactly at that point.  The depth at which this first
happens, the markers passed on the way, and the interval where two points'
paths split are the navigation quantities the rest of the package consumes.

The tree is conceptually infinite along limit directions; `e_budget` caps
how many children a node materializes and `depth_cap` caps path length, so
out-of-range requests raise reproducible errors instead of diverging.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ordinals import ONE, ZERO, Ordinal, OrdinalError, fundamental

__all__ = [
    "Interval",
    "Params",
    "IntervalTree",
    "TreeError",
    "BudgetExceededError",
    "DegenerateIntervalError",
    "DepthCapError",
    "AxiomReport",
    "tree_axiom_report",
]


class TreeError(ValueError):
    """Base class for interval-tree failures."""


class BudgetExceededError(TreeError):
    """A request needs more children of some node than e_budget allows."""


class DegenerateIntervalError(TreeError):
    """Children were requested of a singleton leaf."""


class DepthCapError(TreeError):
    """An endpoint search ran past depth_cap without terminating."""


@dataclass(frozen=True)
class Interval:
    """The half-open ordinal segment [lo, hi)."""

    lo: Ordinal
    hi: Ordinal

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise TreeError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @property
    def is_empty(self) -> bool:
        return self.lo == self.hi

    @property
    def is_singleton(self) -> bool:
        return self.hi == self.lo + ONE

    def contains(self, alpha: Ordinal) -> bool:
        return self.lo <= alpha < self.hi

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi})"


@dataclass(frozen=True)
class Params:
    """Finite stand-ins for the construction's cardinal parameters.

    kappa_w plays the small width, lambda_w the large one, e_budget bounds
    marker materialization per node, size_cap bounds condition size.
    """

    eta: Ordinal
    kappa_w: int = 3
    lambda_w: int = 6
    e_budget: int = 16
    size_cap: int = 32

    def __post_init__(self):
        if not self.eta.is_limit:
            raise TreeError(f"eta must be a limit, got {self.eta}")
        if self.kappa_w < 2:
            raise TreeError("kappa_w must be at least 2")
        if self.lambda_w <= self.kappa_w:
            raise TreeError("lambda_w must exceed kappa_w")
        if self.e_budget < 2:
            raise TreeError("e_budget must be at least 2")
        if self.size_cap < 1:
            raise TreeError("size_cap must be positive")


class IntervalTree:
    """Memoized lazy refinement of [0, eta).

    The marker cache is insert-only and every entry is a deterministic
    function of its key, so racing computations of the same node agree;
    behavior is as-if single-threaded.
    """

    def __init__(self, params: Params, depth_cap: int = 32):
        self.params = params
        self.depth_cap = depth_cap
        self.root = Interval(ZERO, params.eta)
        self._markers: Dict[Interval, List[Ordinal]] = {}

    # -- marker sequences -----------------------------------------------

    def e_set(self, iv: Interval, count: Optional[int] = None) -> Tuple[Ordinal, ...]:
        """The materialized marker set of a node.

        Limit-ended: the first `count` members (default: the full budget,
        e_budget + 1 so that e_budget children exist) of the increasing
        sequence cut from the canonical approach to hi.  Successor-ended
        [lo, b+1): exactly (lo, b).  Singleton: (lo,).
        """
        if iv.is_empty:
            raise TreeError(f"empty interval {iv} has no markers")
        if iv.is_singleton:
            return (iv.lo,)
        if iv.hi.is_successor:
            return (iv.lo, iv.hi.predecessor())
        budget = self.params.e_budget + 1
        if count is None:
            count = budget
        if count > budget:
            raise BudgetExceededError(
                f"requested {count} markers of {iv}, budget is {budget}"
            )
        seq = self._markers.setdefault(iv, [iv.lo])
        while len(seq) < count:
            k = len(seq)
            step = fundamental(iv.hi, k)
            nxt = seq[-1] + ONE
            seq.append(step if step > nxt else nxt)
        return tuple(seq[:count])

    def root_eps(self, count: Optional[int] = None) -> Tuple[Ordinal, ...]:
        return self.e_set(self.root, count)

    def eps(self, i: int) -> Ordinal:
        """The i-th root marker."""
        return self.e_set(self.root, i + 1)[i]

    # -- refinement -------------------------------------------------------

    def children(self, iv: Interval, count: Optional[int] = None) -> List[Interval]:
        """Split a node one level.

        Limit-ended nodes yield `count` (default e_budget) consecutive
        pieces; successor-ended nodes yield the front segment (dropped when
        empty) and the trailing singleton.
        """
        if iv.is_singleton or iv.is_empty:
            raise DegenerateIntervalError(f"{iv} is a leaf")
        if iv.hi.is_successor:
            prior = iv.hi.predecessor()
            out = []
            if iv.lo < prior:
                out.append(Interval(iv.lo, prior))
            out.append(Interval(prior, iv.hi))
            return out
        if count is None:
            count = self.params.e_budget
        marks = self.e_set(iv, count + 1)
        return [Interval(marks[k], marks[k + 1]) for k in range(count)]

    def locate(self, alpha: Ordinal, depth: int) -> Interval:
        """The unique depth-`depth` interval containing alpha."""
        if not self.root.contains(alpha):
            raise TreeError(f"{alpha} is outside {self.root}")
        iv = self.root
        for _ in range(depth):
            iv = self._step(iv, alpha)
        return iv

    def _step(self, iv: Interval, alpha: Ordinal) -> Interval:
        if iv.is_singleton:
            return iv
        if iv.hi.is_successor:
            prior = iv.hi.predecessor()
            if alpha < prior:
                return Interval(iv.lo, prior)
            return Interval(prior, iv.hi)
        marks = self.e_set(iv)
        if not alpha < marks[-1]:
            raise BudgetExceededError(
                f"{alpha} lies past the materialized children of {iv}"
            )
        k = bisect.bisect_right(marks, alpha) - 1
        return Interval(marks[k], marks[k + 1])

    def n_of(self, alpha: Ordinal) -> int:
        """Least depth at which alpha is a left endpoint."""
        iv = self.root
        for depth in range(self.depth_cap + 1):
            if iv.lo == alpha:
                return depth
            iv = self._step(iv, alpha)
        raise DepthCapError(
            f"{alpha} did not become a left endpoint within depth {self.depth_cap}"
        )

    def path(self, alpha: Ordinal) -> List[Interval]:
        """Containing intervals from the root down to the first one
        starting at alpha."""
        out = [self.root]
        while out[-1].lo != alpha:
            if len(out) > self.depth_cap:
                raise DepthCapError(
                    f"{alpha} did not become a left endpoint within depth {self.depth_cap}"
                )
            out.append(self._step(out[-1], alpha))
        return out

    def orbit(self, alpha: Ordinal) -> Tuple[Ordinal, ...]:
        """Markers strictly below alpha collected along its path.

        Each interval on the way down (the one starting at alpha excluded)
        contributes its markers below alpha.  Budget growth only ever
        extends paths, so previously returned orbits never change.
        """
        seen = set()
        for iv in self.path(alpha)[:-1]:
            if iv.hi.is_limit:
                marks = self.e_set(iv)
            else:
                marks = (iv.lo,) if iv.is_singleton else (iv.lo, iv.hi.predecessor())
            seen.update(m for m in marks if m < alpha)
        return tuple(sorted(seen))

    def j_and_J(
        self, alpha: Ordinal, beta
    ) -> Tuple[Optional[int], Interval]:
        """Where the paths of alpha and a higher point split.

        beta may be the right end eta itself, in which case there is no
        shared path to measure and the split interval is alpha's depth-1
        interval by convention.  Otherwise returns (j, J) with j the last
        depth at which the two paths agree and J alpha's interval one level
        deeper.
        """
        if beta == self.params.eta:
            return None, self.locate(alpha, 1)
        if not alpha < beta:
            raise TreeError(f"need alpha < beta, got {alpha} >= {beta}")
        if not self.root.contains(beta):
            raise TreeError(f"{beta} is outside {self.root}")
        iv_a = iv_b = self.root
        depth = 0
        while True:
            nxt_a, nxt_b = self._step(iv_a, alpha), self._step(iv_b, beta)
            if nxt_a != nxt_b:
                return depth, nxt_a
            if depth > self.depth_cap:
                raise DepthCapError(
                    f"paths of {alpha} and {beta} did not split within depth "
                    f"{self.depth_cap}"
                )
            iv_a, iv_b = nxt_a, nxt_b
            depth += 1

    # -- truncations ------------------------------------------------------

    def levels(self, depth: int, count: Optional[int] = None) -> List[List[Interval]]:
        """Full truncation: the materialized strata 0..depth, singletons
        carried forward."""
        strata = [[self.root]]
        for _ in range(depth):
            nxt: List[Interval] = []
            for iv in strata[-1]:
                if iv.is_singleton:
                    nxt.append(iv)
                else:
                    nxt.extend(self.children(iv, count))
            strata.append(nxt)
        return strata

    def dump(self, depth: int, count: Optional[int] = None) -> str:
        """Indented text truncation, one `I=[lo,hi) depth=n E=[...]` line
        per node."""
        lines: List[str] = []

        def walk(iv: Interval, d: int):
            marks = ", ".join(str(m) for m in self.e_set(iv, count))
            lines.append("  " * d + f"I={iv} depth={d} E=[{marks}]")
            if d < depth and not iv.is_singleton:
                for child in self.children(iv, count):
                    walk(child, d + 1)

        walk(self.root, 0)
        return "\n".join(lines)


@dataclass
class AxiomReport:
    ok: bool
    checks: Dict[str, int]
    failures: List[str]


def tree_axiom_report(
    tree: IntervalTree,
    depth: int,
    count: Optional[int] = None,
    sample_points: Sequence[Ordinal] = (),
) -> AxiomReport:
    """Check the tree laws on a full truncation.

    Laminarity and the partition law are local facts here: every parent's
    children start at the parent's left end, are consecutive, nonempty, and
    stay inside the parent, so distinct nodes of a stratum are disjoint and
    each stratum tiles exactly the materialized prefix of the one above.
    The checks below verify those local facts on every materialized node,
    plus the strict endpoint drop into limit-ended parents, and endpoint
    realization on the given sample points.
    """
    checks = {
        "child-start": 0,
        "child-consecutive": 0,
        "child-nonempty": 0,
        "child-inside": 0,
        "limit-endpoint-drop": 0,
        "endpoint-realized": 0,
    }
    failures: List[str] = []

    def note(name: str, ok: bool, detail: str):
        checks[name] += 1
        if not ok:
            failures.append(f"{name}: {detail}")

    frontier = [tree.root]
    for _ in range(depth):
        nxt: List[Interval] = []
        for iv in frontier:
            if iv.is_singleton:
                nxt.append(iv)
                continue
            kids = tree.children(iv, count)
            note("child-start", kids[0].lo == iv.lo, f"{iv} first child {kids[0]}")
            for a, b in zip(kids, kids[1:]):
                note("child-consecutive", a.hi == b.lo, f"{iv}: {a} then {b}")
            for kid in kids:
                note("child-nonempty", not kid.is_empty, f"{iv}: {kid}")
                note(
                    "child-inside",
                    iv.lo <= kid.lo and kid.hi <= iv.hi,
                    f"{iv}: {kid}",
                )
                if iv.hi.is_limit:
                    note("limit-endpoint-drop", kid.hi < iv.hi, f"{iv}: {kid}")
            nxt.extend(kids)
        frontier = nxt

    for alpha in sample_points:
        try:
            n = tree.n_of(alpha)
            note(
                "endpoint-realized",
                tree.locate(alpha, n).lo == alpha,
                f"{alpha}: n={n}",
            )
        except TreeError as err:
            note("endpoint-realized", False, f"{alpha}: {err}")

    return AxiomReport(not failures, checks, failures)
