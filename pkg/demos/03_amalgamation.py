"""Both amalgamation routes on small hand-built inputs.

The union route joins two conditions sharing a sunflower root; cross
meets are the root filter.  The grid route pushes private tops down to
interior levels, amalgamates the pushed copies, then pulls the result
back over the bijections.

Run as: python3 demos/03_amalgamation.py
"""

from scatterlab import (
    TOP,
    IntervalTree,
    Params,
    Point,
    SeparatedFamily,
    UnboundedFn,
    amalgamate_eta,
    amalgamate_omega,
    canonical_pairing,
    equivalence_stamp,
    leq,
    make_condition,
    parse,
    pull_back,
    push_down,
    validate,
)

params = Params(parse("w^2"), kappa_w=3, lambda_w=8, e_budget=16)
tree = IntervalTree(params)
eps = tree.root_eps()
pairs = [(i, j) for i in range(8) for j in range(i + 1, 8)]
F = UnboundedFn(8, eps, {p: 14 for p in pairs})

u = Point(eps[1], 0)
z = Point(TOP, 0)
root = frozenset({u, z})

a = Point(eps[4], 0)
b = Point(eps[6], 0)
p = make_condition("omega", [u, z, a], [(u, z), (u, a), (a, z)], complete=True)
q = make_condition("omega", [u, z, b], [(u, z), (u, b), (b, z)], complete=True)
r = amalgamate_omega(p, q, root, F, tree)
print("union amalgam points:", [str(x) for x in r.sorted_points()])
print("valid:", validate(r, tree, F) == [])
print("cross meet of the private points:", [str(x) for x in r.meet(a, b)])
print()

u2 = Point(eps[2], 0)
t_nu = Point(TOP, 1)
t_mu = Point(TOP, 2)
r_nu = make_condition("kappa", [u, u2, t_nu], [(u, t_nu), (u2, t_nu)], complete=True)
r_mu = make_condition("kappa", [u, u2, t_mu], [(u, t_mu), (u2, t_mu)], complete=True)

pp, g_nu = push_down(r_nu, 9, tree)
qq, g_mu = push_down(r_mu, 12, tree)
print("pushed tops:", [str(x) for x in sorted(pp.points - r_nu.points, key=str)])

pairing = canonical_pairing(pp, qq)
fam = SeparatedFamily((pp, qq), pp.points & qq.points, {(0, 1): pairing})
stamps = equivalence_stamp(fam, tree)
res = amalgamate_eta(pp, qq, pairing, stamps, tree)
print("grid amalgam fresh points:", [str(x) for x in res.fresh_points])

out = pull_back(res.condition, r_nu, r_mu, g_nu, g_mu, tree, F, res.gamma)
print("pulled back points:", [str(x) for x in out.sorted_points()])
print("valid:", validate(out, tree, F) == [])
print("below both inputs:", leq(out, r_nu) and leq(out, r_mu))
