import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scatterlab.intervals import (
    BudgetExceededError,
    DegenerateIntervalError,
    DepthCapError,
    Interval,
    IntervalTree,
    Params,
    TreeError,
    tree_axiom_report,
)
from scatterlab.ordinals import ZERO, Ordinal, from_int, parse


def iv(lo: str, hi: str) -> Interval:
    return Interval(parse(lo), parse(hi))


def make_tree(eta: str, e_budget: int = 16, depth_cap: int = 32) -> IntervalTree:
    return IntervalTree(Params(eta=parse(eta), e_budget=e_budget), depth_cap=depth_cap)


def test_interval_basics():
    assert str(iv("w", "w*2")) == "[w, w*2)"
    assert iv("5", "6").is_singleton
    assert iv("5", "5").is_empty
    assert iv("w", "w*2").contains(parse("w + 3"))
    assert not iv("w", "w*2").contains(parse("w*2"))
    with pytest.raises(TreeError):
        iv("w", "3")


def test_params_validation():
    with pytest.raises(TreeError):
        Params(eta=parse("w + 1"))
    with pytest.raises(TreeError):
        Params(eta=parse("w^2"), kappa_w=1)
    with pytest.raises(TreeError):
        Params(eta=parse("w^2"), kappa_w=4, lambda_w=4)
    with pytest.raises(TreeError):
        Params(eta=parse("w^2"), e_budget=1)


def test_children_limit_case():
    t = make_tree("w^2")
    assert t.children(iv("0", "w^2"), 3) == [iv("0", "w"), iv("w", "w*2"), iv("w*2", "w*3")]
    assert t.children(iv("w", "w*2"), 2) == [iv("w", "w + 1"), iv("w + 1", "w + 2")]


def test_children_successor_case():
    t = make_tree("w^2")
    assert t.children(iv("5", "7")) == [iv("5", "6"), iv("6", "7")]
    with pytest.raises(DegenerateIntervalError):
        t.children(iv("6", "7"))


def test_children_budget():
    t = make_tree("w^2", e_budget=4)
    assert len(t.children(t.root)) == 4
    with pytest.raises(BudgetExceededError):
        t.children(t.root, 5)


def test_e_set_examples():
    t = make_tree("w^2")
    assert t.e_set(t.root, 4) == tuple(parse(s) for s in ["0", "w", "w*2", "w*3"])
    assert t.e_set(iv("5", "7")) == (from_int(5), from_int(6))
    assert t.e_set(iv("6", "7")) == (from_int(6),)
    # a cut falling at or below the left end is pushed strictly inside
    deep = IntervalTree(Params(eta=parse("w^w")))
    assert deep.e_set(iv("w", "w^2"), 3) == tuple(parse(s) for s in ["w", "w + 1", "w*2"])


def test_locate_examples():
    t = make_tree("w^2")
    a = parse("w*2 + 5")
    assert t.locate(a, 0) == t.root == iv("0", "w^2")
    assert t.locate(a, 1) == iv("w*2", "w*3")
    assert t.locate(a, 2) == iv("w*2 + 5", "w*2 + 6")
    assert t.locate(a, 4) == iv("w*2 + 5", "w*2 + 6")  # singletons persist
    with pytest.raises(TreeError):
        t.locate(parse("w^2"), 0)


def test_locate_budget_error():
    t = make_tree("w^2", e_budget=2)
    with pytest.raises(BudgetExceededError):
        t.locate(parse("w*5"), 1)


def test_n_of_examples():
    t = make_tree("w^2")
    assert t.n_of(ZERO) == 0
    assert t.n_of(parse("w*2")) == 1
    assert t.n_of(parse("w*2 + 5")) == 2


def test_n_of_depth_cap():
    t = make_tree("w^2", depth_cap=1)
    with pytest.raises(DepthCapError):
        t.n_of(parse("w*2 + 5"))


def test_orbit_examples():
    t = make_tree("w^2")
    assert t.orbit(ZERO) == ()
    assert t.orbit(parse("w*2")) == (ZERO, parse("w"))
    assert t.orbit(parse("w*2 + 5")) == tuple(
        parse(s) for s in ["0", "w", "w*2", "w*2 + 1", "w*2 + 2", "w*2 + 3", "w*2 + 4"]
    )


def test_j_and_J_examples():
    t = make_tree("w^2")
    assert t.j_and_J(parse("w + 3"), parse("w*2 + 5")) == (0, iv("w", "w*2"))
    assert t.j_and_J(parse("w + 3"), parse("w^2")) == (None, iv("w", "w*2"))
    assert t.j_and_J(parse("w + 3"), parse("w*2")) == (0, iv("w", "w*2"))
    j, J = t.j_and_J(parse("w + 3"), parse("w + 5"))
    assert (j, J) == (1, iv("w + 3", "w + 4"))
    with pytest.raises(TreeError):
        t.j_and_J(parse("w + 3"), parse("w + 3"))


def scan_locate(tree: IntervalTree, alpha: Ordinal, depth: int) -> Interval:
    """Independent route: enumerate the whole stratum and scan for membership."""
    stratum = tree.levels(depth)[-1]
    hits = [node for node in stratum if node.contains(alpha)]
    assert len(hits) == 1
    return hits[0]


def test_locate_matches_stratum_scan():
    t = make_tree("w^2", e_budget=8)
    rng = random.Random(7)
    for _ in range(60):
        a, b = rng.randint(0, 7), rng.randint(0, 20)
        alpha = Ordinal(((from_int(1), a),)) + b if a else from_int(b)
        for depth in (0, 1, 2, 3):
            try:
                found = t.locate(alpha, depth)
            except BudgetExceededError:
                continue
            assert found == scan_locate(t, alpha, depth)


def test_orbit_via_stratum_scan():
    t = make_tree("w^2", e_budget=8)
    rng = random.Random(11)
    for _ in range(40):
        a, b = rng.randint(0, 7), rng.randint(0, 7)
        alpha = Ordinal(((from_int(1), a),)) + b if a else from_int(b)
        n = t.n_of(alpha)
        expected = set()
        for m in range(n):
            node = scan_locate(t, alpha, m)
            expected.update(e for e in t.e_set(node) if e < alpha)
        assert t.orbit(alpha) == tuple(sorted(expected))


def test_orbit_claim_small():
    t = make_tree("w^2", e_budget=16)
    eps = t.root_eps()
    for nu in range(16):
        assert t.orbit(eps[nu]) == tuple(eps[:nu])


def test_split_interval_claim_seeded():
    t = make_tree("w^2", e_budget=12)
    eps = t.root_eps()
    rng = random.Random(3)
    for _ in range(200):
        zeta = rng.randint(0, 10)
        alpha = eps[zeta] + rng.randint(0, 9)
        hi_choices = [eps[z] + rng.randint(0, 9) for z in range(zeta + 1, 12)]
        beta = rng.choice(hi_choices + [t.params.eta])
        if not beta <= t.params.eta or not alpha < beta:
            continue
        _, J = t.j_and_J(alpha, beta)
        assert J == Interval(eps[zeta], eps[zeta + 1])


def test_orbit_monotone_under_budget_growth():
    small = make_tree("w^2", e_budget=8)
    big = make_tree("w^2", e_budget=24)
    rng = random.Random(5)
    for _ in range(50):
        a, b = rng.randint(0, 7), rng.randint(0, 7)
        alpha = Ordinal(((from_int(1), a),)) + b if a else from_int(b)
        assert small.orbit(alpha) == big.orbit(alpha)


@pytest.mark.parametrize("eta", ["w*5", "w^2", "w^2*3", "w^3"])
def test_axioms_on_truncations(eta):
    t = make_tree(eta, e_budget=8)
    samples = [ZERO, parse("w + 3"), parse("w*2")]
    report = tree_axiom_report(t, depth=4, sample_points=samples)
    assert report.ok, report.failures
    assert report.checks["child-start"] > 0
    assert report.checks["limit-endpoint-drop"] > 0


def test_axiom_report_catches_seeded_breakage():
    t = make_tree("w^2", e_budget=8)
    report = tree_axiom_report(t, depth=2, sample_points=[parse("w^2") + 0])
    assert not report.ok  # the sample lies outside the root
    assert any("endpoint-realized" in f for f in report.failures)


@given(st.integers(0, 7), st.integers(0, 30), st.integers(0, 4))
def test_locate_contains_and_nests(a, b, depth):
    t = make_tree("w^2", e_budget=8)
    alpha = Ordinal(((from_int(1), a),)) + b if a else from_int(b)
    try:
        chain = [t.locate(alpha, d) for d in range(depth + 1)]
    except BudgetExceededError:
        return
    for node in chain:
        assert node.contains(alpha)
    for outer, inner in zip(chain, chain[1:]):
        assert outer.lo <= inner.lo and inner.hi <= outer.hi


@given(st.integers(0, 7), st.integers(0, 7))
def test_orbit_strictly_below(a, b):
    t = make_tree("w^2", e_budget=8)
    alpha = Ordinal(((from_int(1), a),)) + b if a else from_int(b)
    orb = t.orbit(alpha)
    assert all(x < alpha for x in orb)
    assert list(orb) == sorted(set(orb))


def test_e_set_strictly_increasing_inside():
    t = IntervalTree(Params(eta=parse("w^3"), e_budget=10))
    for node in [t.root, iv("w^2", "w^2*2"), iv("w", "w*2"), iv("w^2*2", "w^2*3")]:
        marks = t.e_set(node)
        assert marks[0] == node.lo
        assert all(x < y for x, y in zip(marks, marks[1:]))
        assert all(node.contains(m) for m in marks)


def test_dump_shape():
    t = make_tree("w^2", e_budget=2)
    text = t.dump(2)
    lines = text.splitlines()
    assert lines[0].startswith("I=[0, w^2) depth=0 E=[0, w, w*2]")
    assert any(line.strip().startswith("I=[w, w*2) depth=1") for line in lines)
    assert all("E=[" in line for line in lines)
