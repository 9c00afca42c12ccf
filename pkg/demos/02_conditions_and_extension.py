"""Finite conditions: building, validating, and extending below a target.

The two dialects differ in their meet discipline: the kappa dialect
keeps single-valued meets with orbit-located witnesses, the omega
dialect keeps set-valued meets with same-level pairs meeting nothing.

Run as: python3 demos/02_conditions_and_extension.py
"""

from scatterlab import (
    TOP,
    IntervalTree,
    Params,
    Point,
    condition_to_text,
    extend_below,
    leq,
    make_condition,
    parse,
    validate,
)

params = Params(parse("w^2"), kappa_w=3, lambda_w=6, e_budget=16)
tree = IntervalTree(params)
eps = tree.root_eps()

u = Point(eps[1], 0)
s = Point(eps[3], 0)
z = Point(TOP, 0)
p = make_condition("kappa", [u, s, z], [(u, s), (s, z), (u, z)], complete=True)
print("kappa condition:")
print(condition_to_text(p, params))
print("violations:", validate(p, tree))

p2, fresh = extend_below(p, z, parse("w*5"), 0, tree)
print("extended below the top at w*5; fresh point:", fresh)
print("still valid:", validate(p2, tree) == [])
print("extension refines:", leq(p2, p))
print("mirror contract:", all(p2.le(fresh, x) == p2.le(z, x) for x in p.points))
print()

q = make_condition("omega", [u, z], [(u, z)], complete=True)
q2, ladder = extend_below(q, z, parse("w + 2"), 0, tree)
print("omega extension below a successor-adjacent level adds a ladder:")
for x in q2.sorted_points():
    print("   ", x)
print("still valid:", validate(q2, tree) == [])
