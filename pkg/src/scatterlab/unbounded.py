"""Symmetric pair-colorings with large values on disjoint families.

The object of interest is a total symmetric function F on unordered pairs
from a finite index set, taking values among materialized root markers.
The property checked here: for a family of pairwise-disjoint small index
sets and a threshold gamma, some two members a, b of the family satisfy
F(i, j) > gamma for every i in a and j in b.  `star_verify` checks one
family, `star_search` sweeps all families of a given shape, and
`f_generate` builds tables either at random or greedily against a probe
set.

Throughout the package, "the pair value contains an ordinal" is read as
strict order: an ordinal is the set of everything smaller, so membership
in a value means being strictly below it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .intervals import Params
from .ordinals import Ordinal

__all__ = [
    "UnboundedFn",
    "StarOutcome",
    "SearchResult",
    "FamilyError",
    "BlowupGuardError",
    "GenerationError",
    "star_verify",
    "star_search",
    "f_generate",
    "save",
    "load",
]

FORMAT_HEADER = "# scatterlab-fmt 1 unbounded"


class FamilyError(ValueError):
    """A family violates disjointness, size, or range requirements."""


class BlowupGuardError(ValueError):
    """A search would enumerate more families than the configured cap."""


class GenerationError(ValueError):
    """No table assignment satisfied the probe set."""

    def __init__(self, message: str, report: List[str]):
        super().__init__(message)
        self.report = report


class UnboundedFn:
    """Total symmetric table on unordered pairs below lambda_w.

    Entries are indices into `eps`, the materialized marker list supplying
    the actual ordinal values.  Instances are immutable after construction.
    """

    def __init__(
        self,
        lambda_w: int,
        eps: Sequence[Ordinal],
        entries: Dict,
    ):
        if lambda_w < 2:
            raise FamilyError("lambda_w must be at least 2")
        if not eps:
            raise FamilyError("no materialized marker values")
        self.lambda_w = lambda_w
        self.eps = tuple(eps)
        table: Dict[FrozenSet[int], int] = {}
        for key, idx in entries.items():
            pair = frozenset(key)
            if len(pair) != 2 or not all(0 <= i < lambda_w for i in pair):
                raise FamilyError(f"bad pair {set(key)}")
            if not 0 <= idx < len(self.eps):
                raise FamilyError(f"marker index {idx} out of range for pair {set(key)}")
            if table.setdefault(pair, idx) != idx:
                raise FamilyError(f"conflicting entries for pair {set(key)}")
        expected = lambda_w * (lambda_w - 1) // 2
        if len(table) != expected:
            raise FamilyError(f"table has {len(table)} pairs, needs {expected}")
        self._table = table

    def index(self, i: int, j: int) -> int:
        if i == j:
            raise FamilyError(f"pair requires distinct indices, got {i},{j}")
        return self._table[frozenset((i, j))]

    def value(self, i: int, j: int) -> Ordinal:
        return self.eps[self.index(i, j)]

    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.lambda_w) for j in range(i + 1, self.lambda_w)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnboundedFn):
            return NotImplemented
        return (
            self.lambda_w == other.lambda_w
            and self.eps == other.eps
            and self._table == other._table
        )


@dataclass(frozen=True)
class StarOutcome:
    ok: bool
    gamma: Ordinal
    witness: Optional[Tuple[FrozenSet[int], FrozenSet[int]]]
    pairs_checked: int


@dataclass(frozen=True)
class SearchResult:
    ok: bool
    instances: int
    counterexample: Optional[Tuple[Tuple[FrozenSet[int], ...], Ordinal]]


def _check_family(
    F: UnboundedFn,
    family: Sequence[FrozenSet[int]],
    max_size: Optional[int],
) -> List[FrozenSet[int]]:
    members = [frozenset(a) for a in family]
    seen: set = set()
    for a in members:
        if not a:
            raise FamilyError("family members must be nonempty")
        if not all(0 <= i < F.lambda_w for i in a):
            raise FamilyError(f"member {set(a)} outside index range")
        if max_size is not None and len(a) >= max_size:
            raise FamilyError(f"member {set(a)} is not small (size cap {max_size})")
        if a & seen:
            raise FamilyError(f"member {set(a)} overlaps the rest of the family")
        seen |= a
    return members


def star_verify(
    F: UnboundedFn,
    gamma: Ordinal,
    family: Sequence[Iterable[int]],
    max_size: Optional[int] = None,
) -> StarOutcome:
    """Find two family members with all cross values strictly above gamma.

    Pairs are scanned in the family's given order, so the returned witness
    is deterministic.  A False outcome means the whole family was swept
    with no qualifying pair.
    """
    members = _check_family(F, [frozenset(a) for a in family], max_size)
    checked = 0
    for a, b in combinations(members, 2):
        checked += 1
        if all(F.value(i, j) > gamma for i in a for j in b):
            return StarOutcome(True, gamma, (a, b), checked)
    return StarOutcome(False, gamma, None, checked)


def family_count(lambda_w: int, m: int, nu: int) -> int:
    """Number of unordered families of m pairwise-disjoint nu-subsets."""
    total = 1
    remaining = lambda_w
    for _ in range(m):
        total *= math.comb(remaining, nu)
        remaining -= nu
    return total // math.factorial(m)


def _families(lambda_w: int, m: int, nu: int):
    """Canonical enumeration: families as lex-increasing tuples of sorted
    nu-subsets."""
    subsets = list(combinations(range(lambda_w), nu))

    def extend(prefix: List[Tuple[int, ...]], used: set, start: int):
        if len(prefix) == m:
            yield tuple(frozenset(s) for s in prefix)
            return
        for idx in range(start, len(subsets)):
            s = subsets[idx]
            if used.isdisjoint(s):
                prefix.append(s)
                yield from extend(prefix, used | set(s), idx + 1)
                prefix.pop()

    yield from extend([], set(), 0)


def star_search(
    F: UnboundedFn,
    m: int,
    nu: int,
    gammas: Sequence[Ordinal],
    family_cap: int = 10_000_000,
    force: bool = False,
) -> SearchResult:
    """Sweep every family of m pairwise-disjoint nu-subsets against every
    threshold.

    Returns a certificate (every instance had a witness pair) or the first
    failing instance in canonical order.  Instances whose family count
    exceeds family_cap are refused unless force is set.
    """
    if m < 2:
        raise FamilyError("family size m must be at least 2")
    if nu < 1 or m * nu > F.lambda_w:
        raise FamilyError(f"cannot fit {m} disjoint {nu}-subsets below {F.lambda_w}")
    count = family_count(F.lambda_w, m, nu)
    if count > family_cap and not force:
        raise BlowupGuardError(
            f"{count} families exceeds the cap {family_cap}; pass force to override"
        )
    instances = 0
    for family in _families(F.lambda_w, m, nu):
        for gamma in gammas:
            instances += 1
            if not star_verify(F, gamma, family).ok:
                return SearchResult(False, instances, (family, gamma))
    return SearchResult(True, instances, None)


Probe = Tuple[int, int, Sequence[Ordinal]]


def f_generate(
    params: Params,
    eps: Sequence[Ordinal],
    strategy: str = "random",
    seed: int = 0,
    probes: Sequence[Probe] = (),
) -> UnboundedFn:
    """Build a table over lambda_w indices with values among eps.

    "random" draws every entry from a seeded generator.  "greedy" walks the
    pairs in lexicographic order and keeps each entry as large as possible
    subject to all probes (m, nu, gammas triples) passing; since raising an
    entry never breaks the swept property, a greedy failure means no table
    over these markers can pass.
    """
    lam = params.lambda_w
    pairs = [(i, j) for i in range(lam) for j in range(i + 1, lam)]
    if not eps:
        raise GenerationError("no materialized marker values", [])
    if strategy == "random":
        rng = random.Random(seed)
        entries = {pair: rng.randrange(len(eps)) for pair in pairs}
        return UnboundedFn(lam, eps, entries)
    if strategy != "greedy":
        raise ValueError(f"unknown strategy {strategy!r}")

    top = len(eps) - 1
    entries = {pair: top for pair in pairs}
    report: List[str] = []

    def passes() -> Optional[str]:
        table = UnboundedFn(lam, eps, entries)
        for m, nu, gammas in probes:
            result = star_search(table, m, nu, list(gammas))
            if not result.ok:
                family, gamma = result.counterexample
                return f"probe m={m} nu={nu} fails at gamma={gamma}"
        return None

    for pair in pairs:
        chosen = None
        for idx in range(top, -1, -1):
            entries[pair] = idx
            failure = passes()
            if failure is None:
                chosen = idx
                break
            report.append(f"pair {pair} index {idx}: {failure}")
        if chosen is None:
            raise GenerationError(f"no value for pair {pair} satisfies the probes", report)
    return UnboundedFn(lam, eps, entries)


def save(F: UnboundedFn, path) -> None:
    lines = [FORMAT_HEADER, f"lambda_w {F.lambda_w}"]
    for i, j in F.pairs():
        lines.append(f"{i} {j} {F.index(i, j)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path, eps: Sequence[Ordinal]) -> UnboundedFn:
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise FamilyError(f"{path}: missing header {FORMAT_HEADER!r}")
    if len(lines) < 2 or not lines[1].startswith("lambda_w "):
        raise FamilyError(f"{path}: missing lambda_w line")
    lam = int(lines[1].split()[1])
    entries = {}
    for line in lines[2:]:
        i, j, idx = (int(tok) for tok in line.split())
        entries[(i, j)] = idx
    return UnboundedFn(lam, eps, entries)
