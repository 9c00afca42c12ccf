"""Tour of the symbolic ordinal layer and the refining interval tree.

Run as: python3 demos/01_ordinals_and_trees.py
"""

from scatterlab import IntervalTree, Params, fundamental, parse, tree_axiom_report

a = parse("w^2*3 + w*4 + 5")
b = parse("w^3")
print("a          =", a)
print("b          =", b)
print("a + b      =", a + b)
print("b + a      =", b + a)
print("a < b      =", a < b)
print("fund(w^2)  =", [str(fundamental(parse("w^2"), n)) for n in range(5)])

tree = IntervalTree(Params(parse("w^2"), e_budget=8))
print()
print("interval tree over [0, w^2), 9 root markers:")
print(tree.dump(1))

alpha = parse("w*3 + 7")
print("path to", alpha)
for iv in tree.path(alpha):
    print("   ", iv)
print("orbit:", [str(x) for x in tree.orbit(alpha)])

j, J = tree.j_and_J(parse("w*3 + 7"), parse("w*5"))
print("paths split at depth", j, "inside", J)

report = tree_axiom_report(tree, 3)
print("axiom report ok:", report.ok, "checks:", sum(report.checks.values()))
