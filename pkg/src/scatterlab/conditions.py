"""Finite graded posets with explicit meet tables, in two dialects.

A condition is a finite set of grid points (level, column), a strict order
that only ever climbs levels, and a total meet table assigning each point
pair the set of maximal common lower bounds it is accountable for.  The
"omega" dialect allows finite meet sets, forbids same-level meets below
the top, and requires a predecessor-level interpolant under points at
successor levels.  The "kappa" dialect allows at most one meet point,
constrains where meets of incomparable-but-compatible pairs may sit (via
orbits, root markers, and the pair coloring), and requires an interpolant
at the right end of any split interval that isolates the lower point of a
related pair.

`make_condition` normalizes and transitively closes input; `validate`
reports every violated clause by name; `extend_below` is the point
insertion that plants a fresh point under a target while preserving
validity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .intervals import IntervalTree, Params, TreeError
from .ordinals import ZERO, Ordinal
from .ordinals import parse as parse_ordinal
from .unbounded import UnboundedFn

__all__ = [
    "TOP",
    "Level",
    "Point",
    "Condition",
    "Violation",
    "ConditionError",
    "UnmaterializedLevelError",
    "LevelBudgetError",
    "level_lt",
    "level_le",
    "point_key",
    "make_condition",
    "validate",
    "leq",
    "extend_below",
    "condition_to_text",
    "condition_from_text",
]

FORMAT_HEADER = "# scatterlab-fmt 1 condition"


class ConditionError(ValueError):
    """Structurally malformed condition or bad operation arguments."""


class UnmaterializedLevelError(ConditionError):
    """A check needed tree structure beyond the materialized budget."""


class LevelBudgetError(ConditionError):
    """No free column remains at a requested level."""


class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"


TOP = _Top()
Level = Union[Ordinal, _Top]


def level_lt(a: Level, b: Level) -> bool:
    if a is TOP:
        return False
    if b is TOP:
        return True
    return a < b


def level_le(a: Level, b: Level) -> bool:
    return a is b or a == b or level_lt(a, b)


def _level_sort_key(level: Level):
    return (1, ZERO) if level is TOP else (0, level)


@dataclass(frozen=True)
class Point:
    """A grid point: ordinal level (or TOP) and column index."""

    level: Level
    xi: int

    @property
    def is_top(self) -> bool:
        return self.level is TOP

    def __str__(self) -> str:
        return f"({'TOP' if self.is_top else self.level}, {self.xi})"


def point_key(p: Point):
    return (*_level_sort_key(p.level), p.xi)


def _pair_key(s: Point, t: Point) -> Tuple[Point, Point]:
    return (s, t) if point_key(s) <= point_key(t) else (t, s)


class Condition:
    """Immutable points + strict order + total meet table.

    Assumes normalized input: build through `make_condition`.  The strict
    set is transitively closed and irreflexive; the meet table has exactly
    one entry per unordered pair, canonically keyed.
    """

    __slots__ = ("dialect", "points", "strict", "meets", "_meet_map", "_hash")

    def __init__(
        self,
        dialect: str,
        points: FrozenSet[Point],
        strict: FrozenSet[Tuple[Point, Point]],
        meets: Tuple[Tuple[Tuple[Point, Point], FrozenSet[Point]], ...],
    ):
        self.dialect = dialect
        self.points = points
        self.strict = strict
        self.meets = meets
        self._meet_map = dict(meets)
        self._hash = None

    @property
    def size(self) -> int:
        return len(self.points)

    def sorted_points(self) -> List[Point]:
        return sorted(self.points, key=point_key)

    def lt(self, s: Point, t: Point) -> bool:
        return (s, t) in self.strict

    def le(self, s: Point, t: Point) -> bool:
        return s == t or (s, t) in self.strict

    def meet(self, s: Point, t: Point) -> FrozenSet[Point]:
        return self._meet_map.get(_pair_key(s, t), frozenset())

    def down(self, s: Point) -> Set[Point]:
        return {x for x in self.points if self.le(x, s)}

    def comparable(self, s: Point, t: Point) -> bool:
        return self.le(s, t) or self.le(t, s)

    def compatible(self, s: Point, t: Point) -> bool:
        return any(self.le(x, s) and self.le(x, t) for x in self.points)

    def pairs(self) -> List[Tuple[Point, Point]]:
        return list(itertools.combinations(self.sorted_points(), 2))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Condition):
            return NotImplemented
        return (
            self.dialect == other.dialect
            and self.points == other.points
            and self.strict == other.strict
            and self.meets == other.meets
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dialect, self.points, self.strict, self.meets))
        return self._hash

    def __repr__(self) -> str:
        return f"<Condition {self.dialect} |X|={self.size}>"


def _transitive_closure(
    points: FrozenSet[Point], rel: Iterable[Tuple[Point, Point]]
) -> FrozenSet[Tuple[Point, Point]]:
    adj: Dict[Point, Set[Point]] = {p: set() for p in points}
    for s, t in rel:
        if s not in adj or t not in adj:
            raise ConditionError(f"order pair ({s}, {t}) mentions unknown points")
        adj[s].add(t)
    changed = True
    while changed:
        changed = False
        for s in points:
            extra = set()
            for t in adj[s]:
                extra |= adj[t] - adj[s]
            if extra:
                adj[s] |= extra
                changed = True
    for s in points:
        if s in adj[s]:
            raise ConditionError(f"order cycle through {s}")
    return frozenset((s, t) for s in points for t in adj[s])


def make_condition(
    dialect: str,
    points: Iterable[Point],
    rel: Iterable[Tuple[Point, Point]] = (),
    meets: Optional[Mapping] = None,
    complete: bool = False,
) -> Condition:
    """Normalize raw parts into a Condition.

    `rel` is any generating set of strict pairs; it is transitively closed
    here, and cycles are rejected.  `meets` maps pairs (tuples or
    frozensets) to point iterables.  Missing pairs default to the empty
    set, or, with `complete`, to the forced value: the lower point for
    comparable pairs, the maximal common lower bounds otherwise.  Meet
    CONTENT is not judged here; `validate` does that.
    """
    if dialect not in ("omega", "kappa"):
        raise ConditionError(f"unknown dialect {dialect!r}")
    pts = frozenset(points)
    strict = _transitive_closure(pts, rel)

    cond = Condition(dialect, pts, strict, ())

    table: Dict[Tuple[Point, Point], FrozenSet[Point]] = {}
    for key, val in (meets or {}).items():
        s, t = tuple(key)
        if s not in pts or t not in pts:
            raise ConditionError(f"meet entry ({s}, {t}) mentions unknown points")
        if s == t:
            raise ConditionError(f"meet entry for identical points {s}")
        value = frozenset(val)
        if not value <= pts:
            raise ConditionError(f"meet of ({s}, {t}) has unknown points")
        canon = _pair_key(s, t)
        if table.setdefault(canon, value) != value:
            raise ConditionError(f"conflicting meet entries for ({s}, {t})")

    for s, t in itertools.combinations(sorted(pts, key=point_key), 2):
        canon = _pair_key(s, t)
        if canon in table:
            continue
        if not complete:
            table[canon] = frozenset()
        elif cond.le(s, t):
            table[canon] = frozenset({s})
        elif cond.le(t, s):
            table[canon] = frozenset({t})
        else:
            common = cond.down(s) & cond.down(t)
            maximal = {
                x for x in common if not any(cond.lt(x, y) for y in common)
            }
            table[canon] = frozenset(maximal)

    ordered = tuple(
        sorted(table.items(), key=lambda kv: (point_key(kv[0][0]), point_key(kv[0][1])))
    )
    return Condition(dialect, pts, strict, ordered)


EMPTY_OMEGA = make_condition("omega", ())
EMPTY_KAPPA = make_condition("kappa", ())


@dataclass(frozen=True)
class Violation:
    clause: str
    points: Tuple[Point, ...]
    detail: str

    def __str__(self) -> str:
        names = ", ".join(str(p) for p in self.points)
        return f"{self.clause} [{names}]: {self.detail}"


def _tree_orbit(tree: IntervalTree, alpha: Ordinal, cache: Dict) -> Set[Ordinal]:
    if alpha not in cache:
        try:
            cache[alpha] = set(tree.orbit(alpha))
        except TreeError as err:
            raise UnmaterializedLevelError(f"orbit({alpha}): {err}") from err
    return cache[alpha]


def _tree_split(tree: IntervalTree, alpha: Ordinal, beta: Ordinal):
    try:
        return tree.j_and_J(alpha, beta)[1]
    except TreeError as err:
        raise UnmaterializedLevelError(f"split({alpha}, {beta}): {err}") from err


def _marker_membership(tree: IntervalTree, beta: Ordinal) -> bool:
    eps = tree.root_eps()
    if beta in eps:
        return True
    if beta < eps[-1]:
        return False
    raise UnmaterializedLevelError(f"{beta} is past the materialized root markers")


def validate(
    p: Condition, tree: IntervalTree, F: Optional[UnboundedFn] = None
) -> List[Violation]:
    """Every violated clause, empty iff the condition is valid.

    Clause names: size-cap, grid, level-monotone, meet-axiom, and then per
    dialect: meet-arity / meet-location / isolation-interpolant (kappa),
    top-meet-bound / same-level-meet / successor-interpolant (omega).
    Checks that would need tree structure past the budget raise
    UnmaterializedLevelError instead of reporting a violation.
    """
    params = tree.params
    out: List[Violation] = []
    pts = p.sorted_points()
    orbit_cache: Dict = {}

    if p.size > params.size_cap:
        out.append(Violation("size-cap", (), f"{p.size} points exceed cap {params.size_cap}"))

    for s in pts:
        if s.is_top:
            if not 0 <= s.xi < params.lambda_w:
                out.append(Violation("grid", (s,), f"top column {s.xi} out of range"))
        else:
            if not s.level < params.eta:
                out.append(Violation("grid", (s,), f"level {s.level} not below {params.eta}"))
            elif not 0 <= s.xi < params.kappa_w:
                out.append(Violation("grid", (s,), f"column {s.xi} out of range"))

    for s, t in sorted(p.strict, key=lambda st: (point_key(st[0]), point_key(st[1]))):
        if not level_lt(s.level, t.level):
            out.append(Violation("level-monotone", (s, t), "related points must climb levels"))

    for s, t in p.pairs():
        value = p.meet(s, t)
        common = {x for x in pts if p.le(x, s) and p.le(x, t)}
        covered = {x for x in pts if any(p.le(x, v) for v in value)}
        if common != covered:
            missed = common ^ covered
            out.append(
                Violation(
                    "meet-axiom",
                    (s, t),
                    f"lower-bound set mismatch at {{{', '.join(str(x) for x in sorted(missed, key=point_key))}}}",
                )
            )
        if p.dialect == "kappa" and len(value) > 1:
            out.append(Violation("meet-arity", (s, t), f"{len(value)} meet points"))

    if p.dialect == "kappa":
        _validate_kappa(p, tree, F, out, orbit_cache)
    else:
        _validate_omega(p, tree, F, out)
    return out


def _validate_kappa(p, tree, F, out, orbit_cache):
    params = tree.params
    for s, t in p.pairs():
        if p.comparable(s, t) or not p.compatible(s, t):
            continue
        for v in p.meet(s, t):
            if v.is_top:
                out.append(Violation("meet-location", (s, t), "meet point at the top level"))
                continue
            beta = v.level
            if not s.is_top and not t.is_top:
                ok = beta in _tree_orbit(tree, s.level, orbit_cache) and beta in _tree_orbit(
                    tree, t.level, orbit_cache
                )
                why = "below both paths" if ok else f"{beta} outside orbit overlap"
            elif s.is_top and t.is_top:
                if F is None:
                    raise ConditionError("top-top meet check needs the pair coloring F")
                bound = F.value(s.xi, t.xi)
                ok = beta < bound and _marker_membership(tree, beta)
                why = f"{beta} not a root marker below F value {bound}" if not ok else ""
            else:
                ordinary = t if s.is_top else s
                ok = beta in _tree_orbit(tree, ordinary.level, orbit_cache) and _marker_membership(
                    tree, beta
                )
                why = f"{beta} not a shared root marker on the path" if not ok else ""
            if not ok:
                out.append(Violation("meet-location", (s, t), why))

    for s, t in sorted(p.strict, key=lambda st: (point_key(st[0]), point_key(st[1]))):
        if s.is_top or not level_lt(s.level, t.level):
            continue
        beta = params.eta if t.is_top else t.level
        lam = _tree_split(tree, s.level, beta)
        if not (lam.lo < s.level and lam.hi <= beta):
            continue
        witnesses = [
            u
            for u in p.points
            if not u.is_top and u.level == lam.hi and p.le(s, u) and p.le(u, t)
        ]
        if not witnesses:
            out.append(
                Violation(
                    "isolation-interpolant",
                    (s, t),
                    f"split interval {lam} isolates but no point sits at {lam.hi}",
                )
            )


def _validate_omega(p, tree, F, out):
    for s, t in p.pairs():
        if s.is_top and t.is_top:
            for v in p.meet(s, t):
                if F is None:
                    raise ConditionError("top-top meet check needs the pair coloring F")
                bound = F.value(s.xi, t.xi)
                if v.is_top or not v.level < bound:
                    out.append(
                        Violation(
                            "top-meet-bound",
                            (s, t),
                            f"meet point {v} not below F value {bound}",
                        )
                    )
        elif not s.is_top and not t.is_top and s.level == t.level:
            if p.meet(s, t):
                out.append(
                    Violation("same-level-meet", (s, t), "same-level pairs meet nothing")
                )

    for s, t in sorted(p.strict, key=lambda st: (point_key(st[0]), point_key(st[1]))):
        if t.is_top or not t.level.is_successor:
            continue
        prior = t.level.predecessor()
        witnesses = [
            u
            for u in p.points
            if not u.is_top and u.level == prior and p.le(s, u) and p.lt(u, t)
        ]
        if not witnesses:
            out.append(
                Violation(
                    "successor-interpolant",
                    (s, t),
                    f"no point at {prior} between {s} and {t}",
                )
            )


def leq(q: Condition, p: Condition) -> bool:
    """True iff q extends p: superset points, order restricting exactly,
    meet table agreeing on p's pairs."""
    if q.dialect != p.dialect:
        return False
    if not p.points <= q.points:
        return False
    restricted = {(s, t) for (s, t) in q.strict if s in p.points and t in p.points}
    if restricted != set(p.strict):
        return False
    return all(q.meet(s, t) == p.meet(s, t) for s, t in p.pairs())


def _fresh_column(
    p: Condition, level: Level, floor: int, cap: int, taken: Set[Point]
) -> Point:
    used = {x.xi for x in p.points if x.level is level or x.level == level}
    used |= {x.xi for x in taken if x.level is level or x.level == level}
    xi = floor
    while xi in used:
        xi += 1
    if xi >= cap:
        raise LevelBudgetError(f"no free column at level {level} (cap {cap})")
    return Point(level, xi)


def extend_below(
    p: Condition,
    tgt: Point,
    alpha: Ordinal,
    nu_floor: int,
    tree: IntervalTree,
) -> Tuple[Condition, Point]:
    """Insert a fresh point s at level alpha, column >= nu_floor, tied to
    tgt: for every old x, s sits below x exactly when tgt does.

    The kappa dialect adds one auxiliary point at the right end of each
    interval that isolates the new point from the target, strictly below
    the target's level (instances whose isolating interval ends exactly at
    the target's level are witnessed by the target itself).  The omega
    dialect adds the finite ladder filling the levels from which the
    target's successor level is reachable by finite steps.  All new points
    relate upward only, so their meets are forced.
    """
    if tgt not in p.points:
        raise ConditionError(f"target {tgt} is not in the condition")
    if not level_lt(alpha, tgt.level):
        raise ConditionError(f"need alpha below the target, got {alpha} vs {tgt.level}")
    if not alpha < tree.params.eta:
        raise ConditionError(f"alpha {alpha} is not below {tree.params.eta}")

    params = tree.params
    above = [y for y in p.points if p.le(tgt, y)]
    taken: Set[Point] = set()

    if p.dialect == "kappa":
        try:
            trail = tree.path(alpha)
        except TreeError as err:
            raise UnmaterializedLevelError(f"path({alpha}): {err}") from err
        bound = params.eta if tgt.is_top else tgt.level
        isolating = [iv for iv in trail[:-1] if iv.hi < bound]
        s = _fresh_column(p, alpha, nu_floor, params.kappa_w, taken)
        taken.add(s)
        chain: List[Point] = []
        for iv in isolating:
            c = _fresh_column(p, iv.hi, 0, params.kappa_w, taken)
            taken.add(c)
            chain.append(c)
        new_points = [s] + chain
        rel = set(p.strict)
        rel |= {(s, c) for c in chain}
        rel |= {(w, y) for w in new_points for y in above}
        rel |= {(chain[j], chain[i]) for i in range(len(chain)) for j in range(i + 1, len(chain))}
        meets = dict(p.meets)
        for c in chain:
            meets[_pair_key(s, c)] = frozenset({s})
        for i, j in itertools.combinations(range(len(chain)), 2):
            meets[_pair_key(chain[i], chain[j])] = frozenset({chain[max(i, j)]})
        for w in new_points:
            for y in p.points:
                meets[_pair_key(w, y)] = frozenset({w}) if y in above else frozenset()
        p2 = make_condition("kappa", set(p.points) | set(new_points), rel, meets)
        return p2, s

    ladder_levels: List[Ordinal] = [alpha]
    tlevel = tgt.level
    if not tgt.is_top and tlevel.is_successor:
        base = Ordinal(tlevel.terms[:-1])
        steps = tlevel.terms[-1][1]
        ladder_levels += [base + k for k in range(steps) if alpha < base + k]
    rungs: List[Point] = []
    for depth, lev in enumerate(ladder_levels):
        floor = nu_floor if depth == 0 else 0
        rung = _fresh_column(p, lev, floor, params.kappa_w, taken)
        taken.add(rung)
        rungs.append(rung)
    s = rungs[0]
    rel = set(p.strict)
    rel |= {(w, y) for w in rungs for y in above}
    rel |= {(rungs[j], rungs[k]) for j in range(len(rungs)) for k in range(j + 1, len(rungs))}
    meets = dict(p.meets)
    for j, k in itertools.combinations(range(len(rungs)), 2):
        meets[_pair_key(rungs[j], rungs[k])] = frozenset({rungs[min(j, k)]})
    for w in rungs:
        for y in p.points:
            meets[_pair_key(w, y)] = frozenset({w}) if y in above else frozenset()
    p2 = make_condition("omega", set(p.points) | set(rungs), rel, meets)
    return p2, s


# --- corpus file format ------------------------------------------------------


def _level_token(level: Level) -> str:
    return "TOP" if level is TOP else str(level).replace(" ", "")


def _parse_level(token: str) -> Level:
    return TOP if token == "TOP" else parse_ordinal(token)


def condition_to_text(p: Condition, params: Params) -> str:
    pts = p.sorted_points()
    index = {pt: i for i, pt in enumerate(pts)}
    lines = [
        FORMAT_HEADER,
        f"dialect {p.dialect}",
        f"eta {str(params.eta).replace(' ', '')}",
        f"params kappa_w={params.kappa_w} lambda_w={params.lambda_w} "
        f"e_budget={params.e_budget} size_cap={params.size_cap}",
        f"points {len(pts)}",
    ]
    for i, pt in enumerate(pts):
        lines.append(f"{i} {_level_token(pt.level)} {pt.xi}")
    order = sorted((index[s], index[t]) for s, t in p.strict)
    lines.append(f"order {len(order)}")
    lines.extend(f"{i} {j}" for i, j in order)
    lines.append(f"meets {len(p.meets)}")
    for (s, t), value in p.meets:
        ids = " ".join(str(k) for k in sorted(index[v] for v in value))
        lines.append(f"{index[s]} {index[t]} : {ids}".rstrip())
    return "\n".join(lines) + "\n"


def condition_from_text(text: str) -> Tuple[Condition, Params]:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ConditionError(f"missing header {FORMAT_HEADER!r}")
    if not lines[1].startswith("dialect ") or not lines[2].startswith("eta "):
        raise ConditionError("missing dialect/eta lines")
    dialect = lines[1].split()[1]
    eta = parse_ordinal(lines[2].split()[1])
    kv = dict(tok.split("=") for tok in lines[3].split()[1:])
    params = Params(
        eta=eta,
        kappa_w=int(kv["kappa_w"]),
        lambda_w=int(kv["lambda_w"]),
        e_budget=int(kv["e_budget"]),
        size_cap=int(kv["size_cap"]),
    )
    npts = int(lines[4].split()[1])
    at = 5
    pts: List[Point] = []
    for line in lines[at : at + npts]:
        idx, level, xi = line.split()
        assert int(idx) == len(pts)
        pts.append(Point(_parse_level(level), int(xi)))
    at += npts
    norder = int(lines[at].split()[1])
    at += 1
    rel = []
    for line in lines[at : at + norder]:
        i, j = (int(tok) for tok in line.split())
        rel.append((pts[i], pts[j]))
    at += norder
    nmeets = int(lines[at].split()[1])
    at += 1
    meets = {}
    for line in lines[at : at + nmeets]:
        head, _, tail = line.partition(":")
        i, j = (int(tok) for tok in head.split())
        value = [pts[int(tok)] for tok in tail.split()]
        meets[(pts[i], pts[j])] = value
    cond = make_condition(dialect, pts, rel, meets)
    return cond, params
