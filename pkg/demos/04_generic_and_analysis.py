"""Schedule-driven construction runs and derivative analysis.

A schedule realizes grid points and hangs budgeted predecessors below
them; the run replays every step against the validator and returns a
finite poset with structural checkers.  The analysis half computes
exact derivative levels where exactness is possible.

Run as: python3 demos/04_generic_and_analysis.py
"""

from scatterlab import (
    TOP,
    FiniteSpace,
    IntervalTree,
    Params,
    Point,
    PredecessorBelow,
    RealizePoint,
    Schedule,
    UnboundedFn,
    cardinal_profile,
    finite_cb,
    ordinal_space_levels,
    parse,
    run_schedule,
    skeleton_check,
    space_from_poset,
    sposet_check,
    tightness_probe,
)

params = Params(parse("w^2"), kappa_w=8, lambda_w=12, e_budget=16)
tree = IntervalTree(params)
eps = tree.root_eps()
pairs = [(i, j) for i in range(12) for j in range(i + 1, 12)]
F = UnboundedFn(12, eps, {p: 12 for p in pairs})

top = Point(TOP, 0)
steps = [RealizePoint(TOP, 0)]
steps += [PredecessorBelow(top, parse("w*2"), 0)] * 3
T = run_schedule(Schedule(tuple(steps)), tree, F, "kappa")
print("poset from a 4-step schedule:", sorted(str(x) for x in T.points))
print("profile:", cardinal_profile(T))

rep = sposet_check(T, 3)
print("core clauses clean:", rep.core_ok, "density:", list(rep.density))
skel = skeleton_check(T, T.sub_top_levels())
print("skeleton ok:", skel.ok, "bones:", [str(b) for b in skel.bones])

x = Point(parse("w") + parse("1"), 0)
steps = [RealizePoint(x.level, 0)]
steps += [PredecessorBelow(x, parse("w"), 0)] * 2
T = run_schedule(Schedule(tuple(steps)), tree, F, "kappa")
us = [u for u in T.points_at(parse("w")) if T.lt(u, x)]
steps += [PredecessorBelow(u, parse("1"), 0) for u in us]
T = run_schedule(Schedule(tuple(steps)), tree, F, "kappa")
probe = tightness_probe(T, x, list(T.points_at(parse("1"))))
print("tightness probe ok:", probe.ok, "witnesses:", len(probe.witnesses))
print()

sierpinski = FiniteSpace(frozenset("ab"), (frozenset("a"),))
print("two-point derivative levels:", finite_cb(sierpinski).levels)

space = space_from_poset(T)
print("poset space degenerates to one level:", len(finite_cb(space).levels) == 1)

levels = ordinal_space_levels(parse("w^2*2"))
print("symbolic levels of [0, w^2*2]:")
for e, tag in levels.tags:
    print(f"    level {e}: {tag}")
print("height:", levels.height, " reduced height:", levels.ht_minus)
