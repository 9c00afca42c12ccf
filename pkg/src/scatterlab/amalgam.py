"""Pairwise amalgamation machinery for grid conditions.

Everything in this module is about taking two (or a family of) valid
conditions and producing a common extension, the way a chain-condition
argument would at full cardinality, except here every step is a finite
computation that gets re-verified after construction.

The module provides, in dependency order:

* ``delta_root``: sunflower extraction over finite point-sets.
* adequacy checks and canonical pairings between conditions.
* ``SeparatedFamily`` with its refinement and report functions.
* ``kerneldown_check``: root pairs must meet inside the root.
* ``amalgamate_omega``: union-order amalgamation for the top-heavy
  dialect, with cross meets given by the root filter.
* interval stamps (``equivalence_stamp``) assigning each point level a
  tag interval with a marker window usable for fresh interpolants.
* ``push_down`` / ``amalgamate_eta`` / ``pull_back``: the three-stage
  pipeline that flattens top points to a reserved high level, amalgamates
  inside the grid, and transports the result back.

Construction functions never return silently-wrong output: each one
re-validates its result and raises with the offending clause otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .conditions import (
    TOP,
    Condition,
    ConditionError,
    Point,
    Violation,
    leq,
    level_lt,
    make_condition,
    point_key,
    validate,
)
from .intervals import Interval, IntervalTree, TreeError
from .ordinals import ONE, ZERO, Ordinal
from .unbounded import UnboundedFn


class AmalgamError(ValueError):
    """Base class for amalgamation failures."""


class InfeasibleTargetError(AmalgamError):
    """Requested subfamily size cannot be met; carries the best found."""

    def __init__(self, message: str, best=None, root=None):
        super().__init__(message)
        self.best = best
        self.root = root


class RefineError(AmalgamError):
    """Separated refinement fell short; carries the failure report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report or []


class HypothesisViolationError(AmalgamError):
    """A stated amalgamation precondition fails; never patched silently."""

    def __init__(self, message: str, details=None):
        super().__init__(message)
        self.details = details


class SearchExhaustedError(AmalgamError):
    """Constrained search ran out of placements."""

    def __init__(self, message: str, partial=None, constraint=None):
        super().__init__(message)
        self.partial = partial
        self.constraint = constraint


class MaxUndefinedError(AmalgamError):
    """Meet candidates of a pulled-back pair have no maximum."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class FGapError(AmalgamError):
    """The unbounded-function gap hypothesis fails for a column pair."""


# ---------------------------------------------------------------------------
# sunflower extraction


def _set_key(s):
    return tuple(sorted(point_key(x) if isinstance(x, Point) else (2, x, 0) for x in s))


def _max_disjoint(petals: List[FrozenSet]) -> List[int]:
    """Largest index set with pairwise disjoint petals, branch and bound."""
    best: List[int] = []

    def grow(start: int, chosen: List[int], used: FrozenSet) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (len(petals) - start) <= len(best):
            return
        for i in range(start, len(petals)):
            if petals[i] & used:
                continue
            chosen.append(i)
            grow(i + 1, chosen, used | petals[i])
            chosen.pop()

    grow(0, [], frozenset())
    return best


def delta_root(family: Sequence, target: int):
    """Extract a sunflower: a subfamily whose pairwise intersections
    all equal one root set.

    Exact (branch and bound over candidate roots) below 20 sets, greedy
    above.  Returns ``(subfamily, root)``; raises InfeasibleTargetError
    with the best attempt attached when target cannot be met.
    """
    sets = [frozenset(s) for s in family]
    if target > len(sets):
        raise InfeasibleTargetError(
            f"target {target} exceeds family size {len(sets)}", best=[], root=frozenset()
        )
    if len(sets) == 1:
        return list(sets), sets[0]

    candidates = {frozenset()}
    for a, b in itertools.combinations(sets, 2):
        candidates.add(a & b)
    ordered = sorted(candidates, key=lambda r: (-len(r), _set_key(r)))

    exact = len(sets) < 20
    best_rows: List[int] = []
    best_root: FrozenSet = frozenset()
    for root in ordered:
        rows = [i for i, s in enumerate(sets) if s >= root]
        if len(rows) <= len(best_rows):
            continue
        petals = [sets[i] - root for i in rows]
        if exact:
            picked = _max_disjoint(petals)
        else:
            picked, used = [], frozenset()
            for j, petal in enumerate(petals):
                if not petal & used:
                    picked.append(j)
                    used |= petal
        if len(picked) > len(best_rows):
            best_rows = [rows[j] for j in picked]
            best_root = root
    sub = [sets[i] for i in best_rows]
    if len(sub) < target:
        raise InfeasibleTargetError(
            f"best sunflower has {len(sub)} members, target {target}",
            best=sub,
            root=best_root,
        )
    if len(sub) == 1:
        best_root = sub[0]
    return sub, best_root


# ---------------------------------------------------------------------------
# adequacy and separated families


def check_adequate(g: Mapping[Point, Point]) -> List[str]:
    """Clause names violated by the bijection g (empty list when adequate).

    Clauses: strata preserved, relative level order preserved, column
    preserved below top, column order preserved on top.
    """
    out = []
    items = sorted(g.items(), key=lambda kv: point_key(kv[0]))
    if len(set(g.values())) != len(g):
        out.append("strata: mapping not injective")
    for s, gs in items:
        if s.is_top != gs.is_top:
            out.append(f"strata: {s} maps across the top boundary")
    for (s, gs), (t, gt) in itertools.combinations(items, 2):
        if level_lt(s.level, t.level) != level_lt(gs.level, gt.level):
            out.append(f"level-order: ({s}, {t}) reordered")
        if s.is_top and t.is_top and ((s.xi < t.xi) != (gs.xi < gt.xi)):
            out.append(f"top-column-order: ({s}, {t}) reordered")
    for s, gs in items:
        if not s.is_top and s.xi != gs.xi:
            out.append(f"column-preserved: {s} maps to column {gs.xi}")
    return out


def canonical_pairing(p: Condition, q: Condition) -> Dict[Point, Point]:
    """Point-order pairing X_p -> X_q: k-th sub-top point to k-th sub-top
    point, k-th top point to k-th top point."""
    for side in (True, False):
        a = [x for x in p.sorted_points() if x.is_top == side]
        b = [x for x in q.sorted_points() if x.is_top == side]
        if len(a) != len(b):
            raise AmalgamError(
                f"stratum size mismatch: {len(a)} vs {len(b)} "
                f"({'top' if side else 'grid'})"
            )
    return dict(zip(p.sorted_points(), q.sorted_points()))


@dataclass
class SeparatedFamily:
    """A family of conditions with one sunflower root and pairwise
    adequate, root-fixing, structure-preserving bijections."""

    members: Tuple[Condition, ...]
    root: FrozenSet[Point]
    bijections: Dict[Tuple[int, int], Dict[Point, Point]] = field(default_factory=dict)

    def pairing(self, i: int, j: int) -> Dict[Point, Point]:
        if i == j:
            return {s: s for s in self.members[i].points}
        if (i, j) in self.bijections:
            return self.bijections[(i, j)]
        back = self.bijections[(j, i)]
        return {v: k for k, v in back.items()}


def _meets_transported(p: Condition, q: Condition, h: Mapping[Point, Point]) -> bool:
    for s, t in p.pairs():
        image = frozenset(h[v] for v in p.meet(s, t))
        if image != q.meet(h[s], h[t]):
            return False
    return True


def separated_report(fam: SeparatedFamily) -> List[str]:
    """Re-verify every separatedness clause from scratch; empty means ok."""
    out = []
    members = fam.members
    root = fam.root
    for i, j in itertools.combinations(range(len(members)), 2):
        inter = members[i].points & members[j].points
        if inter != root:
            out.append(f"delta: members {i},{j} intersect off-root")

    root_levels = {x.level for x in root if not x.is_top}
    owners: Dict = {}
    for i, m in enumerate(members):
        for x in m.points:
            if x.is_top or x in root:
                continue
            if x.level in root_levels:
                out.append(f"level-sharing: member {i} adds {x} at a root level")
            else:
                prev = owners.setdefault(x.level, i)
                if prev != i:
                    out.append(
                        f"level-sharing: level {x.level} used by members {prev},{i}"
                    )

    for i, j in itertools.combinations(range(len(members)), 2):
        h = fam.pairing(i, j)
        p, q = members[i], members[j]
        if set(h) != set(p.points) or set(h.values()) != set(q.points):
            out.append(f"bijection: pairing {i},{j} has wrong domain or range")
            continue
        for clause in check_adequate(h):
            out.append(f"pair {i},{j} {clause}")
        for s in root:
            if h[s] != s:
                out.append(f"pair {i},{j} root-fixing: moves {s}")
        for s, t in itertools.combinations(p.sorted_points(), 2):
            if p.lt(s, t) != q.lt(h[s], h[t]) or p.lt(t, s) != q.lt(h[t], h[s]):
                out.append(f"pair {i},{j} order: ({s}, {t}) not preserved")
        if not _meets_transported(p, q, h):
            out.append(f"pair {i},{j} meets: not transported")
    return out


def separated_refine(family: Sequence[Condition], target: int) -> SeparatedFamily:
    """Thin a family down to a separated subfamily of size >= target.

    Steps: sunflower extraction over point sets, per-level exclusivity
    filter, then grouping by canonical-pairing compatibility.  Raises
    RefineError with the failure report when target cannot be met.
    """
    if not family:
        raise RefineError("empty family", ["no members"])
    dialects = {p.dialect for p in family}
    if len(dialects) > 1:
        raise RefineError("mixed dialects", [f"dialects {sorted(dialects)}"])

    try:
        subsets, root = delta_root([p.points for p in family], target)
    except InfeasibleTargetError as err:
        raise RefineError(f"sunflower stage: {err}", [str(err)]) from err
    chosen = []
    pool = list(family)
    for s in subsets:
        for k, p in enumerate(pool):
            if p is not None and p.points == s:
                chosen.append(p)
                pool[k] = None
                break

    report = []
    root_levels = {x.level for x in root if not x.is_top}
    kept: List[Condition] = []
    used_levels: Dict = {}
    for p in chosen:
        extra = [x for x in p.points - root if not x.is_top]
        if any(x.level in root_levels for x in extra):
            report.append("dropped member adding points at a root level")
            continue
        levels = {x.level for x in extra}
        if any(lv in used_levels for lv in levels):
            report.append("dropped member reusing another member's level")
            continue
        for lv in levels:
            used_levels[lv] = True
        kept.append(p)

    classes: List[List[Condition]] = []
    for p in kept:
        placed = False
        for cls in classes:
            rep = cls[0]
            try:
                h = canonical_pairing(rep, p)
            except AmalgamError:
                continue
            if check_adequate(h):
                continue
            if any(h[s] != s for s in root):
                continue
            ok_order = all(
                rep.lt(s, t) == p.lt(h[s], h[t]) and rep.lt(t, s) == p.lt(h[t], h[s])
                for s, t in itertools.combinations(rep.sorted_points(), 2)
            )
            if ok_order and _meets_transported(rep, p, h):
                cls.append(p)
                placed = True
                break
        if not placed:
            classes.append([p])

    best = max(classes, key=len, default=[])
    if len(best) < target:
        report.append(
            f"largest compatible class has {len(best)} members, target {target}"
        )
        raise RefineError("refinement fell short", report)

    members = tuple(best)
    bijections = {}
    for i, j in itertools.combinations(range(len(members)), 2):
        bijections[(i, j)] = canonical_pairing(members[i], members[j])
    fam = SeparatedFamily(members, frozenset(root), bijections)
    residue = separated_report(fam)
    if residue:
        raise RefineError("refined family fails re-verification", residue)
    return fam


def kerneldown_check(fam: SeparatedFamily):
    """Check that meets of root pairs anchored below top stay in the root.

    Returns None when the conclusion holds everywhere, else the first
    counterexample as (member index, (s, t), meet value).
    """
    for idx, p in enumerate(fam.members):
        for s, t in p.pairs():
            if s not in fam.root or t not in fam.root:
                continue
            if s.is_top and t.is_top:
                continue
            if p.comparable(s, t) or not p.compatible(s, t):
                continue
            value = p.meet(s, t)
            if not value <= fam.root:
                return idx, (s, t), value
    return None


# ---------------------------------------------------------------------------
# top-heavy dialect amalgamation


def _root_agreement(p: Condition, q: Condition, root: FrozenSet[Point]) -> List[str]:
    out = []
    rp = {(s, t) for (s, t) in p.strict if s in root and t in root}
    rq = {(s, t) for (s, t) in q.strict if s in root and t in root}
    if rp != rq:
        out.append("root order disagrees between the members")
    for s, t in itertools.combinations(sorted(root, key=point_key), 2):
        if p.meet(s, t) != q.meet(s, t):
            out.append(f"root meet disagrees at ({s}, {t})")
    return out


def amalgamate_omega(
    p: Condition,
    q: Condition,
    root: FrozenSet[Point],
    F: UnboundedFn,
    tree: Optional[IntervalTree] = None,
) -> Condition:
    """Union amalgam for the top-heavy dialect.

    Order is the plain union, cross meets are the root filter
    {u in root: u below both}.  All hypotheses (sunflower root, level
    exclusivity, initial-segment root levels, root agreement, F gap
    over the top root level) are checked and raise
    HypothesisViolationError; the result is re-validated when a tree
    is supplied.
    """
    if p.dialect != "omega" or q.dialect != "omega":
        raise HypothesisViolationError("both members must use the omega dialect")
    if p.points & q.points != root:
        raise HypothesisViolationError(
            "root is not the intersection of the member point sets"
        )

    problems: List[str] = []
    root_levels = {x.level for x in root if not x.is_top}
    delta = max(root_levels, default=ZERO)
    p_extra = {x for x in p.points - root if not x.is_top}
    q_extra = {x for x in q.points - root if not x.is_top}
    if {x.level for x in p_extra} & {x.level for x in q_extra}:
        problems.append("level-sharing: members reuse a sub-top level")
    for name, extra in (("first", p_extra), ("second", q_extra)):
        for x in extra:
            if x.level in root_levels:
                problems.append(f"{name} member adds {x} at a root level")
            elif root_levels and not delta < x.level:
                problems.append(
                    f"initial-segment: {name} member point {x} below root top level"
                )
    problems.extend(_root_agreement(p, q, root))
    if problems:
        raise HypothesisViolationError("omega amalgam hypotheses fail", problems)

    a = sorted(x.xi for x in p.points - root if x.is_top)
    b = sorted(x.xi for x in q.points - root if x.is_top)
    for xi, xj in itertools.product(a, b):
        if not delta < F.value(xi, xj):
            raise FGapError(
                f"F({xi},{xj}) = {F.value(xi, xj)} not above root top level {delta}"
            )

    points = p.points | q.points
    rel = set(p.strict) | set(q.strict)
    meets = {}
    for (s, t), value in p.meets:
        meets[(s, t)] = value
    for (s, t), value in q.meets:
        meets.setdefault((s, t), value)
    for x in sorted(p.points - root, key=point_key):
        for y in sorted(q.points - root, key=point_key):
            filt = frozenset(
                u for u in root if p.lt(u, x) and q.lt(u, y)
            )
            meets[(x, y)] = filt
    r = make_condition("omega", points, rel, meets)
    if not (leq(r, p) and leq(r, q)):
        raise AmalgamError("amalgam is not below both members")
    if tree is not None:
        found = validate(r, tree, F)
        if found:
            raise AmalgamError(
                "omega amalgam failed validation: "
                + "; ".join(str(v) for v in found)
            )
    return r


# ---------------------------------------------------------------------------
# interval stamps


@dataclass
class EquivalenceStamp:
    """Per-level interval tags plus marker windows for fresh points.

    ``tags`` maps each member point to its tag interval; singleton tags
    mark levels that admit no fresh-point window.  For every non-singleton
    tag I: ``xi_of[I]`` is the first marker index clearing all root levels
    inside I, ``gamma_of[I]`` the marker kappa_w steps later, and
    ``d_of[I]`` the kappa_w markers in between, the candidate levels for
    fresh interpolants.  ``gamma`` bounds every candidate level strictly.
    """

    tags: Dict[Point, Interval]
    intervals: Tuple[Interval, ...]
    xi_of: Dict[Interval, int]
    gamma_of: Dict[Interval, Ordinal]
    d_of: Dict[Interval, Tuple[Ordinal, ...]]
    gamma: Ordinal
    root_levels: Tuple[Ordinal, ...]


def _interval_data(tree: IntervalTree, iv: Interval, root_levels, cache):
    if iv in cache:
        return cache[iv]
    kw = tree.params.kappa_w
    inside = [b for b in root_levels if iv.contains(b)]
    count = kw + 1
    eps = tree.e_set(iv, count)
    xi = 0
    if inside:
        top = max(inside)
        while not top < eps[-1]:
            count += 1
            eps = tree.e_set(iv, count)
        xi = next(i for i, e in enumerate(eps) if top < e)
    if len(eps) < xi + kw + 1:
        eps = tree.e_set(iv, xi + kw + 1)
    data = (xi, eps[xi + kw], tuple(eps[xi : xi + kw]))
    cache[iv] = data
    return data


def _tag_of(tree: IntervalTree, alpha: Ordinal, root_levels, cache) -> Interval:
    k = 0
    while True:
        iv = tree.locate(alpha, k)
        if iv.is_singleton or iv.lo == alpha:
            return Interval(alpha, alpha + ONE)
        if iv.hi.is_limit:
            _, gamma, _ = _interval_data(tree, iv, root_levels, cache)
            if not alpha < gamma:
                return iv
        k += 1


def equivalence_stamp(fam: SeparatedFamily, tree: IntervalTree) -> EquivalenceStamp:
    """Compute tag intervals for every member point and verify that the
    family is pairwise equivalent (tags agree through every pairing)."""
    root_levels = tuple(
        sorted({x.level for x in fam.root if not x.is_top})
    )
    cache: Dict = {}
    tags: Dict[Point, Interval] = {}
    for m in fam.members:
        for s in m.sorted_points():
            if s.is_top:
                raise HypothesisViolationError(
                    f"stamps require top-free members, found {s}"
                )
            if s not in tags:
                tags[s] = _tag_of(tree, s.level, root_levels, cache)
    for i, j in itertools.combinations(range(len(fam.members)), 2):
        h = fam.pairing(i, j)
        for s, hs in h.items():
            if tags[s] != tags[hs]:
                raise HypothesisViolationError(
                    f"not pairwise equivalent: {s} tags {tags[s]}, "
                    f"{hs} tags {tags[hs]}"
                )

    jset = tuple(
        sorted(
            {tags[s] for s in fam.members[0].points},
            key=lambda iv: (iv.lo, iv.hi),
        )
    ) if fam.members else ()
    xi_of: Dict[Interval, int] = {}
    gamma_of: Dict[Interval, Ordinal] = {}
    d_of: Dict[Interval, Tuple[Ordinal, ...]] = {}
    for iv in jset:
        if iv.is_singleton:
            continue
        xi, gamma, window = _interval_data(tree, iv, root_levels, cache)
        xi_of[iv] = xi
        gamma_of[iv] = gamma
        d_of[iv] = window
    levels = sorted({b for window in d_of.values() for b in window})
    gamma = (levels[-1] + ONE) if levels else ONE
    return EquivalenceStamp(tags, jset, xi_of, gamma_of, d_of, gamma, root_levels)


# ---------------------------------------------------------------------------
# push down


def push_down(r: Condition, zeta: int, tree: IntervalTree):
    """Flatten every top point of r to the reserved marker level eps[zeta].

    zeta must be a positive multiple of kappa_w (a designated limit-role
    position) and every sub-top level of r must sit below eps[zeta-1],
    which keeps the witness level of any isolated pair strictly below the
    landing level.  Returns (r', g) with g mapping the points of r' to
    the points of r; g is the identity off the pushed points.
    """
    params = tree.params
    kw = params.kappa_w
    if zeta < kw or zeta % kw != 0:
        raise HypothesisViolationError(
            f"zeta {zeta} is not a positive multiple of kappa_w {kw}"
        )
    eps = tree.root_eps(zeta + 1)
    landing = eps[zeta]
    fence = eps[zeta - 1]
    offenders = [
        x for x in r.sorted_points() if not x.is_top and not x.level < fence
    ]
    if offenders:
        raise HypothesisViolationError(
            "sub-top levels reach the landing fence",
            offenders,
        )
    tops = sorted((x for x in r.points if x.is_top), key=lambda x: x.xi)
    if len(tops) > kw:
        raise HypothesisViolationError(
            f"{len(tops)} top points exceed the column budget {kw}"
        )

    fwd = {x: x for x in r.points if not x.is_top}
    for i, x in enumerate(tops):
        fwd[x] = Point(landing, i)
    back = {v: k for k, v in fwd.items()}
    points = set(back)
    rel = {(fwd[s], fwd[t]) for s, t in r.strict}
    meets = {}
    for (s, t), value in r.meets:
        meets[(fwd[s], fwd[t])] = frozenset(fwd[v] for v in value)
    pushed = make_condition(r.dialect, points, rel, meets)
    found = validate(pushed, tree)
    if found:
        raise AmalgamError(
            "push-down failed validation: " + "; ".join(str(v) for v in found)
        )
    return pushed, back


# ---------------------------------------------------------------------------
# grid amalgamation


@dataclass(frozen=True)
class AmalgamResult:
    condition: Condition
    gamma: Ordinal
    fresh_points: Tuple[Point, ...]


def r2_report(
    r: Condition,
    pp: Condition,
    qq: Condition,
    pairing: Mapping[Point, Point],
) -> List[str]:
    """Re-verify the cross-structure contract of a grid amalgam.

    Fresh points must relate symmetrically through the pairing, every
    old point below a fresh one must pass through a root point, and
    cross order must be exactly the root-interpolant relation.
    """
    out = []
    root = pp.points & qq.points
    fresh = sorted(r.points - pp.points - qq.points, key=point_key)
    for y in fresh:
        for s in pp.sorted_points():
            if r.lt(y, s) != r.lt(y, pairing[s]):
                out.append(f"mirror-up: ({y}, {s}) breaks the pairing")
            if r.lt(s, y) != r.lt(pairing[s], y):
                out.append(f"mirror-down: ({s}, {y}) breaks the pairing")
        for s in sorted(pp.points | qq.points, key=point_key):
            if r.lt(s, y) and not any(
                r.le(s, w) and r.lt(w, y) for w in root
            ):
                out.append(f"root-passage: {s} reaches {y} off the root")
    for s in sorted(pp.points - root, key=point_key):
        for t in sorted(qq.points - root, key=point_key):
            want = any(pp.lt(s, u) and qq.lt(u, t) for u in root)
            if r.lt(s, t) != want:
                out.append(f"cross-order: ({s}, {t}) disagrees with interpolants")
            want = any(qq.lt(t, u) and pp.lt(u, s) for u in root)
            if r.lt(t, s) != want:
                out.append(f"cross-order: ({t}, {s}) disagrees with interpolants")
    return out


def _strict_common(cond: Condition, s: Point, t: Point):
    return {x for x in cond.points if cond.lt(x, s) and cond.lt(x, t)}


def _first_deficient(cond, base_keys, orbit_of):
    for s, t in cond.pairs():
        if frozenset((s, t)) in base_keys:
            continue
        if cond.comparable(s, t):
            continue
        common = _strict_common(cond, s, t)
        if not common:
            continue
        maxima = [x for x in common if not any(cond.lt(x, y) for y in common)]
        if len(maxima) == 1 and maxima[0].level in orbit_of(
            s.level
        ) and maxima[0].level in orbit_of(t.level):
            continue
        return s, t
    return None


def amalgamate_eta(
    pp: Condition,
    qq: Condition,
    pairing: Mapping[Point, Point],
    stamps: EquivalenceStamp,
    tree: IntervalTree,
    max_fresh: int = 8,
) -> AmalgamResult:
    """Amalgamate two top-free, pairwise-equivalent conditions.

    The base is the union plus the root-interpolant cross order.  Cross
    pairs whose common lower bounds lack a unique, orbit-compatible
    maximum receive one fresh point placed at the least admissible
    marker level from the stamp windows; placement backtracks on any
    downstream validation failure and raises SearchExhaustedError with
    the blocking pair when no placement survives.
    """
    if pp.dialect != "kappa" or qq.dialect != "kappa":
        raise HypothesisViolationError("grid amalgamation expects the kappa dialect")
    for cond, name in ((pp, "first"), (qq, "second")):
        if any(x.is_top for x in cond.points):
            raise HypothesisViolationError(f"{name} member is not top-free")
    if pp == qq:
        return AmalgamResult(pp, stamps.gamma, ())

    root = pp.points & qq.points
    bad = check_adequate(dict(pairing))
    if bad:
        raise HypothesisViolationError("pairing is not adequate", bad)
    if any(pairing[s] != s for s in root):
        raise HypothesisViolationError("pairing moves a root point")

    mirror: Dict[Point, Point] = {}
    for s in pp.points:
        mirror[s] = pairing[s]
        mirror[pairing[s]] = s

    rel = set(pp.strict) | set(qq.strict)
    p_only = sorted(pp.points - root, key=point_key)
    q_only = sorted(qq.points - root, key=point_key)
    for s in p_only:
        for t in q_only:
            if any(pp.lt(s, u) and qq.lt(u, t) for u in root):
                rel.add((s, t))
            if any(qq.lt(t, u) and pp.lt(u, s) for u in root):
                rel.add((t, s))

    base_meets: Dict = {}
    for (s, t), value in pp.meets:
        base_meets[(s, t)] = value
    for (s, t), value in qq.meets:
        key = frozenset((s, t))
        clash = next(
            (v for (a, b), v in base_meets.items() if frozenset((a, b)) == key),
            None,
        )
        if clash is None:
            base_meets[(s, t)] = value
        elif clash != value:
            raise HypothesisViolationError(
                f"members disagree on the root meet of ({s}, {t})"
            )
    base_keys = {frozenset(k) for k in base_meets}
    orbit_cache: Dict = {}

    def orbit_of(level):
        if level not in orbit_cache:
            orbit_cache[level] = set(tree.orbit(level))
        return orbit_cache[level]

    blocked = []

    def attempt(points, rel_now, fresh):
        cond = make_condition("kappa", points, rel_now, base_meets, complete=True)
        task = _first_deficient(cond, base_keys, orbit_of)
        if task is None:
            if validate(cond, tree):
                return None
            if r2_report(cond, pp, qq, mirror):
                return None
            if not (leq(cond, pp) and leq(cond, qq)):
                return None
            if any(not v.level < stamps.gamma for v in fresh):
                return None
            return cond, fresh
        if len(fresh) >= max_fresh:
            blocked.append((cond, task))
            return None
        s, t = task
        corners = {s, t, mirror.get(s, s), mirror.get(t, t)}
        lower = _strict_common(cond, s, t) | _strict_common(
            cond, mirror.get(s, s), mirror.get(t, t)
        )
        # candidate levels: the marker windows of every stamped corner,
        # intersected; fresh corners carry no stamp and are screened by
        # the orbit filter below instead
        windows = [
            set(stamps.d_of.get(stamps.tags[c], ()))
            for c in corners
            if c in stamps.tags
        ]
        cand = sorted(set.intersection(*windows)) if windows else []
        # two attachment shapes: just below the four corners, or below the
        # whole fence of points above the shared cluster (both are mirror
        # symmetric, the second catches corners with incomparable tops)
        options = [corners]
        if lower:
            fence = corners | {
                x for x in points if all(cond.lt(w, x) for w in lower)
            }
            if fence != corners:
                options.append(fence)
        placed_any = False
        for beta in cand:
            if not all(w.level < beta for w in lower):
                continue
            used = {x.xi for x in points if not x.is_top and x.level == beta}
            col = next(i for i in itertools.count() if i not in used)
            if col >= tree.params.kappa_w:
                continue
            v = Point(beta, col)
            for ups in options:
                if not all(
                    beta < c.level and beta in orbit_of(c.level) for c in ups
                ):
                    continue
                placed_any = True
                grown = rel_now | {(w, v) for w in lower} | {(v, c) for c in ups}
                hit = attempt(points | {v}, grown, fresh + (v,))
                if hit is not None:
                    return hit
        if not placed_any:
            blocked.append((cond, task))
        return None

    hit = attempt(pp.points | qq.points, rel, ())
    if hit is None:
        partial, task = blocked[0] if blocked else (None, None)
        raise SearchExhaustedError(
            "no fresh-point placement satisfies the contract",
            partial=partial,
            constraint=task,
        )
    cond, fresh = hit
    return AmalgamResult(cond, stamps.gamma, fresh)


# ---------------------------------------------------------------------------
# pull back


def _meet_max(rp: Condition, cands: List[FrozenSet[Point]], pair):
    best: Optional[FrozenSet[Point]] = None

    def le_set(a, b):
        return all(any(rp.le(x, y) for y in b) for x in a)

    for c in cands:
        if best is None or le_set(best, c):
            best = c
    for c in cands:
        if not le_set(c, best):
            raise MaxUndefinedError(
                f"meet candidates of ({pair[0]}, {pair[1]}) have no maximum",
                pair=pair,
            )
    return best


def pull_back(
    rp: Condition,
    r_nu: Condition,
    r_mu: Condition,
    g_nu: Mapping[Point, Point],
    g_mu: Mapping[Point, Point],
    tree: IntervalTree,
    F: UnboundedFn,
    gamma: Optional[Ordinal] = None,
) -> Condition:
    """Transport a grid amalgam back over the push-down bijections.

    Points of the pushed families return to their top positions; order
    takes a point below another when some preimage of the upper point
    sits above it, and each meet is the unique maximum of the preimage
    meets (MaxUndefinedError otherwise).  The gap hypothesis on F is
    checked over max(gamma, root top level) before anything is built.
    """
    pushed_nu = {k: v for k, v in g_nu.items() if k != v}
    pushed_mu = {k: v for k, v in g_mu.items() if k != v}
    missing = (set(pushed_nu) | set(pushed_mu)) - rp.points
    if missing:
        raise AmalgamError(f"pushed points missing from the amalgam: {missing}")

    keep = rp.points - set(pushed_nu) - set(pushed_mu)
    h: Dict[Point, Point] = {x: x for x in keep}
    h.update(pushed_nu)
    h.update(pushed_mu)
    preimages: Dict[Point, List[Point]] = {}
    for src, dst in sorted(h.items(), key=lambda kv: point_key(kv[0])):
        preimages.setdefault(dst, []).append(src)

    z_nu = set(pushed_nu.values())
    z_mu = set(pushed_mu.values())
    shared = r_nu.points & r_mu.points
    bar_levels = [x.level for x in shared if not x.is_top]
    gamma0 = max(bar_levels, default=ZERO)
    if gamma is not None and gamma0 < gamma:
        gamma0 = gamma
    for s in sorted(z_nu - z_mu, key=point_key):
        for t in sorted(z_mu - z_nu, key=point_key):
            if not gamma0 < F.value(s.xi, t.xi):
                raise FGapError(
                    f"F({s.xi},{t.xi}) = {F.value(s.xi, t.xi)} "
                    f"not above {gamma0}"
                )

    points = set(h.values())
    rel = set()
    for s, t in rp.strict:
        if s in keep:
            rel.add((s, h[t]))

    meets: Dict = {}
    ordered = sorted(points, key=point_key)
    for s, t in itertools.combinations(ordered, 2):
        cands = []
        for sp in preimages[s]:
            for tp in preimages[t]:
                cands.append(rp.meet(sp, tp))
        value = _meet_max(rp, cands, (s, t))
        meets[(s, t)] = frozenset(h[v] for v in value)

    r = make_condition("kappa", points, rel, meets)
    found = validate(r, tree, F)
    if found:
        raise AmalgamError(
            "pull-back failed validation: " + "; ".join(str(v) for v in found)
        )
    for member, name in ((r_nu, "first"), (r_mu, "second")):
        if not leq(r, member):
            raise AmalgamError(f"pull-back is not below the {name} member")
    return r
