"""Finite slices of the generic object, plus the structural checkers.

A schedule of requirements (realize a point, insert a predecessor tied to
a target) is met by a descending chain of conditions built with
`extend_below`.  The union of the chain is returned as a `FinitePoset`
together with full provenance.  The checkers interrogate that poset
directly: the graded-poset clauses at an explicit witness budget, the
bone-level test per level, and the tightness counting argument on a
planted family.  Every check recomputes from the raw order relation and
never trusts the meet table it is handed.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from .conditions import (
    TOP,
    Condition,
    ConditionError,
    Level,
    Point,
    extend_below,
    leq,
    level_lt,
    make_condition,
    point_key,
)
from .conditions import _level_token as level_token
from .conditions import _pair_key as pair_key
from .conditions import _parse_level as parse_level
from .conditions import validate
from .intervals import IntervalTree, TreeError
from .ordinals import ONE, Ordinal
from .unbounded import UnboundedFn

FORMAT_HEADER_SCHEDULE = "# scatterlab-fmt 1 schedule"
FORMAT_HEADER_POSET = "# scatterlab-fmt 1 poset"


class GenericError(ValueError):
    pass


class ScheduleError(GenericError):
    """A requirement could not be met; carries the partial chain."""

    def __init__(self, msg, trace=(), step=None, requirement=None):
        super().__init__(msg)
        self.trace = tuple(trace)
        self.step = step
        self.requirement = requirement


class ProbeInconclusiveError(GenericError):
    pass


# --- requirements and schedules ------------------------------------------------


@dataclass(frozen=True)
class RealizePoint:
    """Demand that the point (level, xi) exists, inserting it isolated."""

    level: Level
    xi: int


@dataclass(frozen=True)
class PredecessorBelow:
    """Demand a fresh point at `level` tied to `target` from column
    `xi_floor` up: the new point sits below exactly what the target sits
    below-or-at."""

    target: Point
    level: Ordinal
    xi_floor: int = 0


Requirement = Union[RealizePoint, PredecessorBelow]


@dataclass(frozen=True)
class Schedule:
    steps: Tuple[Requirement, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


def schedule_to_text(sch: Schedule) -> str:
    lines = [FORMAT_HEADER_SCHEDULE, f"seed {sch.seed}", f"steps {len(sch.steps)}"]
    for req in sch.steps:
        if isinstance(req, RealizePoint):
            lines.append(f"realize {level_token(req.level)} {req.xi}")
        else:
            lines.append(
                f"below {level_token(req.target.level)} {req.target.xi} "
                f"{level_token(req.level)} {req.xi_floor}"
            )
    return "\n".join(lines) + "\n"


def schedule_from_text(text: str) -> Schedule:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER_SCHEDULE:
        raise GenericError(f"missing header {FORMAT_HEADER_SCHEDULE!r}")
    seed = int(lines[1].split()[1])
    count = int(lines[2].split()[1])
    steps: List[Requirement] = []
    for line in lines[3 : 3 + count]:
        toks = line.split()
        if toks[0] == "realize":
            steps.append(RealizePoint(parse_level(toks[1]), int(toks[2])))
        elif toks[0] == "below":
            steps.append(
                PredecessorBelow(
                    Point(parse_level(toks[1]), int(toks[2])),
                    parse_level(toks[3]),
                    int(toks[4]),
                )
            )
        else:
            raise GenericError(f"unknown requirement {toks[0]!r}")
    if len(steps) != count:
        raise GenericError(f"expected {count} requirements, found {len(steps)}")
    return Schedule(tuple(steps), seed)


# --- the finite poset ------------------------------------------------------------


class FinitePoset:
    """Union of a descending chain of conditions: same raw data as a
    condition but with no size cap, plus the chain itself and the list of
    (level, target) pairs the schedule aimed predecessors at."""

    __slots__ = (
        "dialect",
        "points",
        "strict",
        "meets",
        "targeted",
        "provenance",
        "_le",
        "_meet",
    )

    def __init__(self, dialect, points, strict, meets, targeted=(), provenance=()):
        self.dialect = dialect
        self.points: FrozenSet[Point] = frozenset(points)
        self.strict: FrozenSet[Tuple[Point, Point]] = frozenset(strict)
        if isinstance(meets, dict):
            meets = meets.items()
        self.meets: Tuple = tuple(
            sorted(meets, key=lambda kv: (point_key(kv[0][0]), point_key(kv[0][1])))
        )
        self.targeted: Tuple[Tuple[Level, Point], ...] = tuple(targeted)
        self.provenance: Tuple[Condition, ...] = tuple(provenance)
        self._le = self.strict | {(x, x) for x in self.points}
        self._meet: Dict = dict(self.meets)

    def le(self, s: Point, t: Point) -> bool:
        return (s, t) in self._le

    def lt(self, s: Point, t: Point) -> bool:
        return (s, t) in self.strict

    def meet(self, s: Point, t: Point) -> Optional[FrozenSet[Point]]:
        return self._meet.get(pair_key(s, t))

    def sorted_points(self) -> List[Point]:
        return sorted(self.points, key=point_key)

    def pairs(self) -> List[Tuple[Point, Point]]:
        pts = self.sorted_points()
        return list(itertools.combinations(pts, 2))

    def points_at(self, level: Level) -> List[Point]:
        return sorted(
            (x for x in self.points if x.level == level or x.level is level),
            key=point_key,
        )

    def sub_top_levels(self) -> List[Ordinal]:
        return sorted({x.level for x in self.points if not x.is_top})

    def __eq__(self, other):
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return (
            self.dialect == other.dialect
            and self.points == other.points
            and self.strict == other.strict
            and self.meets == other.meets
            and self.targeted == other.targeted
        )

    def __repr__(self):
        return (
            f"FinitePoset({self.dialect}, {len(self.points)} points, "
            f"{len(self.strict)} pairs, chain {len(self.provenance)})"
        )


def poset_from_condition(
    p: Condition, targeted=(), provenance=()
) -> FinitePoset:
    return FinitePoset(
        p.dialect, p.points, p.strict, p.meets, targeted, provenance
    )


def poset_to_text(T: FinitePoset) -> str:
    pts = T.sorted_points()
    index = {pt: i for i, pt in enumerate(pts)}
    lines = [
        FORMAT_HEADER_POSET,
        f"dialect {T.dialect}",
        f"points {len(pts)}",
    ]
    for i, pt in enumerate(pts):
        lines.append(f"{i} {level_token(pt.level)} {pt.xi}")
    order = sorted((index[s], index[t]) for s, t in T.strict)
    lines.append(f"order {len(order)}")
    lines.extend(f"{i} {j}" for i, j in order)
    lines.append(f"meets {len(T.meets)}")
    for (s, t), value in T.meets:
        ids = " ".join(str(k) for k in sorted(index[v] for v in value))
        lines.append(f"{index[s]} {index[t]} : {ids}".rstrip())
    lines.append(f"targeted {len(T.targeted)}")
    for level, pt in T.targeted:
        lines.append(f"{level_token(level)} {index[pt]}")
    return "\n".join(lines) + "\n"


def poset_from_text(text: str) -> FinitePoset:
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER_POSET:
        raise GenericError(f"missing header {FORMAT_HEADER_POSET!r}")
    dialect = lines[1].split()[1]
    npts = int(lines[2].split()[1])
    at = 3
    pts: List[Point] = []
    for line in lines[at : at + npts]:
        idx, level, xi = line.split()
        assert int(idx) == len(pts)
        pts.append(Point(parse_level(level), int(xi)))
    at += npts
    norder = int(lines[at].split()[1])
    at += 1
    rel = set()
    for line in lines[at : at + norder]:
        i, j = (int(tok) for tok in line.split())
        rel.add((pts[i], pts[j]))
    at += norder
    nmeets = int(lines[at].split()[1])
    at += 1
    meets = {}
    for line in lines[at : at + nmeets]:
        left, _, right = line.partition(":")
        i, j = (int(tok) for tok in left.split())
        value = frozenset(pts[int(tok)] for tok in right.split())
        meets[pair_key(pts[i], pts[j])] = value
    at += nmeets
    ntargeted = int(lines[at].split()[1])
    at += 1
    targeted = []
    for line in lines[at : at + ntargeted]:
        level, i = line.split()
        targeted.append((parse_level(level), pts[int(i)]))
    return FinitePoset(dialect, pts, rel, meets.items(), targeted)


# --- running a schedule ----------------------------------------------------------


def _insert_isolated(p: Condition, x: Point) -> Condition:
    meets = dict(p.meets)
    for y in p.points:
        meets[pair_key(x, y)] = frozenset()
    return make_condition(p.dialect, set(p.points) | {x}, p.strict, meets)


def run_schedule(
    sch: Schedule,
    tree: IntervalTree,
    F: Optional[UnboundedFn],
    dialect: str,
) -> FinitePoset:
    """Meet the schedule's requirements one per step, keeping every prefix
    a valid condition, and return the union with the chain attached.

    Raises ScheduleError with the partial chain when a requirement cannot
    be met inside the width caps or breaks validity.
    """
    params = tree.params
    p = make_condition(dialect, [])
    chain: List[Condition] = [p]
    targeted: List[Tuple[Level, Point]] = []

    def fail(msg, k, req):
        raise ScheduleError(
            f"step {k} {req!r}: {msg}", trace=chain, step=k, requirement=req
        )

    for k, req in enumerate(sch.steps):
        if isinstance(req, RealizePoint):
            x = Point(req.level, req.xi)
            cap = params.lambda_w if x.is_top else params.kappa_w
            if req.xi < 0 or req.xi >= cap:
                fail(f"column {req.xi} outside width cap {cap}", k, req)
            if not x.is_top:
                if not x.level < params.eta:
                    fail(f"level {x.level} is not below {params.eta}", k, req)
                try:
                    tree.path(x.level)
                except TreeError as err:
                    fail(f"level not materialized: {err}", k, req)
            p2 = p if x in p.points else _insert_isolated(p, x)
        elif isinstance(req, PredecessorBelow):
            if req.target not in p.points:
                fail("target point has not been realized", k, req)
            try:
                p2, _ = extend_below(p, req.target, req.level, req.xi_floor, tree)
            except (ConditionError, TreeError) as err:
                fail(str(err), k, req)
            targeted.append((req.level, req.target))
        else:
            fail(f"unknown requirement kind {type(req).__name__}", k, req)

        found = validate(p2, tree, F)
        if found:
            fail("; ".join(str(v) for v in found), k, req)
        if not leq(p2, p):
            fail("step does not extend the previous condition", k, req)
        p = p2
        chain.append(p)

    return poset_from_condition(p, targeted, chain)


# --- graded-poset check -----------------------------------------------------------


@dataclass(frozen=True)
class SposetReport:
    """Per-clause findings; empty tuples mean the clause passed.  The
    density clause is reported as measurements, one per targeted
    (level, point) pair, never silently collapsed to a boolean."""

    partition: Tuple[str, ...]
    level_order: Tuple[str, ...]
    meet_witness: Tuple[str, ...]
    density: Tuple[Tuple[Level, Point, int], ...]
    budget: int

    @property
    def core_ok(self) -> bool:
        return not (self.partition or self.level_order or self.meet_witness)

    @property
    def density_failures(self) -> Tuple[Tuple[Level, Point, int], ...]:
        return tuple(row for row in self.density if row[2] < self.budget)

    @property
    def ok(self) -> bool:
        return self.core_ok and not self.density_failures


def sposet_check(T: FinitePoset, budget: int) -> SposetReport:
    partition: List[str] = []
    level_order: List[str] = []
    meet_witness: List[str] = []

    seen: Set[Tuple[Level, int]] = set()
    for x in T.sorted_points():
        if x.xi < 0:
            partition.append(f"negative column: {x}")
        key = (x.level, x.xi)
        if key in seen:
            partition.append(f"duplicate grid slot: {x}")
        seen.add(key)
    for s, t in T.strict:
        if s == t:
            partition.append(f"reflexive strict pair: {s}")
        if (t, s) in T.strict:
            partition.append(f"two-cycle: {s} / {t}")
    for s, t in T.strict:
        for u in T.points:
            if (t, u) in T.strict and (s, u) not in T.strict:
                partition.append(f"not transitive: {s} < {t} < {u}")

    for s, t in sorted(T.strict, key=lambda st: (point_key(st[0]), point_key(st[1]))):
        if not level_lt(s.level, t.level):
            level_order.append(f"order does not climb levels: {s} < {t}")

    for s, t in T.pairs():
        value = T.meet(s, t)
        if value is None:
            meet_witness.append(f"no recorded meet for {s}, {t}")
            continue
        for v in value:
            if not (T.le(v, s) and T.le(v, t)):
                meet_witness.append(f"meet point {v} of {s}, {t} is not below both")
        for u in T.sorted_points():
            below_both = T.le(u, s) and T.le(u, t)
            witnessed = any(T.le(u, v) for v in value)
            if below_both != witnessed:
                meet_witness.append(
                    f"meet axiom fails at {u} for pair {s}, {t}"
                )
                break

    density: List[Tuple[Level, Point, int]] = []
    for level, tgt in dict.fromkeys(T.targeted):
        count = sum(1 for s in T.points_at(level) if T.lt(s, tgt))
        density.append((level, tgt, count))

    return SposetReport(
        tuple(partition),
        tuple(level_order),
        tuple(meet_witness),
        tuple(density),
        budget,
    )


# --- bone levels -----------------------------------------------------------------


@dataclass(frozen=True)
class SkeletonReport:
    verdicts: Tuple[Tuple[Ordinal, Tuple[str, ...]], ...]

    @property
    def bones(self) -> Tuple[Ordinal, ...]:
        return tuple(level for level, found in self.verdicts if not found)

    @property
    def ok(self) -> bool:
        return all(not found for _, found in self.verdicts)


def skeleton_check(T: FinitePoset, levels: Sequence[Ordinal]) -> SkeletonReport:
    """Bone-level test per level: same-level meets are empty, and every
    strict lower bound of a next-level point is routed through the level."""
    verdicts: List[Tuple[Ordinal, Tuple[str, ...]]] = []
    for gamma in sorted(set(levels)):
        found: List[str] = []
        rank = T.points_at(gamma)
        for s, t in itertools.combinations(rank, 2):
            value = T.meet(s, t)
            if value:
                found.append(f"same-level-meet: {s}, {t} -> {sorted(value, key=point_key)}")
        for x in T.points_at(gamma + ONE):
            for y in T.sorted_points():
                if not T.lt(y, x):
                    continue
                if not any(T.le(y, z) and T.lt(z, x) for z in rank):
                    found.append(f"interpolant: no route for {y} < {x} through level {gamma}")
        verdicts.append((gamma, tuple(found)))
    return SkeletonReport(tuple(verdicts))


# --- tightness -------------------------------------------------------------------


@dataclass(frozen=True)
class TightnessReport:
    alpha: Ordinal
    u_set: Tuple[Point, ...]
    witnesses: Tuple[Tuple[Point, Point], ...]
    violations: Tuple[Tuple[Point, Tuple[Point, ...]], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def tightness_probe(
    T: FinitePoset, x: Point, A: Sequence[Point]
) -> TightnessReport:
    """Counting step of the tightness argument: collect the level-below
    points under x reachable from A, pick one witness each, and verify no
    strict lower bound of x sits above two witnesses."""
    if x not in T.points:
        raise GenericError(f"{x} is not in the poset")
    if x.is_top or not x.level.is_successor:
        raise GenericError(f"{x} must sit at a successor-indexed level")
    A = sorted(set(A), key=point_key)
    for a in A:
        if not T.lt(a, x):
            raise GenericError(f"family point {a} is not strictly below {x}")
    alpha = x.level.predecessor()
    u_set = [
        u
        for u in T.points_at(alpha)
        if T.lt(u, x) and any(T.le(a, u) for a in A)
    ]
    if not u_set:
        raise ProbeInconclusiveError(
            f"no level-{alpha} point below {x} is reachable from the family"
        )
    witnesses = tuple((u, next(a for a in A if T.le(a, u))) for u in u_set)
    b_set = sorted({a for _, a in witnesses}, key=point_key)
    violations = []
    for y in T.sorted_points():
        if not T.lt(y, x):
            continue
        hits = tuple(b for b in b_set if T.le(b, y))
        if len(hits) > 1:
            violations.append((y, hits))
    return TightnessReport(alpha, tuple(u_set), witnesses, tuple(violations))


# --- cardinal profile --------------------------------------------------------------


@dataclass(frozen=True)
class CardinalProfile:
    widths: Tuple[Tuple[Ordinal, int], ...]
    top_width: int

    def __str__(self):
        body = ", ".join(str(n) for _, n in self.widths)
        return f"({body} | {self.top_width})"


def cardinal_profile(T: FinitePoset) -> CardinalProfile:
    """Point counts per materialized level, the top level kept separate.

    Refuses when the meet-witness clause fails: levels of a poset without
    coherent meets do not track anything."""
    report = sposet_check(T, 0)
    if not report.core_ok:
        raise GenericError(
            "profile refused: "
            + "; ".join(report.partition + report.level_order + report.meet_witness)
        )
    widths = tuple(
        (level, len(T.points_at(level))) for level in T.sub_top_levels()
    )
    return CardinalProfile(widths, len(T.points_at(TOP)))
