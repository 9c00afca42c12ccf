"""Seeded instance builders shared by the heavier test modules.

Everything here is deterministic in the passed rng.  Builders return
fully validated conditions; they raise AssertionError if a template
ever stops validating, so tests fail loudly on generator rot.
"""

import random

from scatterlab.conditions import (
    TOP,
    Point,
    extend_below,
    make_condition,
    validate,
)
from scatterlab.intervals import IntervalTree, Params
from scatterlab.ordinals import Ordinal, parse
from scatterlab.unbounded import UnboundedFn


def flat_F(tree, lambda_w, index):
    """Constant table: every pair gets the index-th root marker."""
    eps = tree.root_eps()
    entries = {
        (i, j): index for i in range(lambda_w) for j in range(i + 1, lambda_w)
    }
    return UnboundedFn(lambda_w, eps, entries)


# --- omega pairs -------------------------------------------------------------


def omega_tree():
    return IntervalTree(Params(parse("w^2"), kappa_w=3, lambda_w=12, e_budget=16))


def omega_instance(tree, rng: random.Random):
    """A pair of omega conditions satisfying every union-amalgam hypothesis.

    Returns (p, q, root_points, F).  Shared part: a root chain of one or
    two marker-level points under a shared top.  Each member adds points
    at its own marker levels (disjoint pools) and possibly a private top.
    """
    eps = tree.root_eps()
    root_n = rng.randint(1, 2)
    chain = [Point(eps[i], 0) for i in range(root_n)]
    z = Point(TOP, 0)
    root = chain + [z]

    pool = list(range(root_n, 10))
    rng.shuffle(pool)
    cut = rng.randint(1, len(pool) - 2)
    pools = (sorted(pool[:cut]), sorted(pool[cut:]))
    top_cols = ([1, 2], [3, 4])

    def member(side):
        pts = list(root)
        rel = [(a, b) for a, b in zip(chain, chain[1:])]
        rel += [(chain[-1], z)]
        n_mid = rng.randint(1, min(2, len(pools[side])))
        levels = sorted(rng.sample(pools[side], n_mid))
        mids = [Point(eps[i], 0) for i in levels]
        for m in mids:
            pts.append(m)
            rel.append((chain[-1], m))
            if rng.random() < 0.7:
                rel.append((m, z))
        if len(mids) == 2 and rng.random() < 0.5:
            rel.append((mids[0], mids[1]))
        if rng.random() < 0.6:
            w = Point(TOP, top_cols[side][rng.randint(0, 1)])
            pts.append(w)
            for m in mids:
                if rng.random() < 0.7:
                    rel.append((m, w))
            if rng.random() < 0.5:
                rel.append((chain[0], w))
        return make_condition("omega", pts, rel, complete=True)

    p = member(0)
    q = member(1)
    F = flat_F(tree, tree.params.lambda_w, 12 + rng.randint(0, 3))
    for cond in (p, q):
        found = validate(cond, tree, F)
        assert not found, f"omega template broke: {found}"
    return p, q, frozenset(root), F


# --- kappa members with tops -------------------------------------------------


def kappa_tree():
    return IntervalTree(Params(parse("w^2"), kappa_w=3, lambda_w=8, e_budget=16))


def kappa_instance(tree, rng: random.Random):
    """Two kappa conditions with private tops over a shared sub-top root.

    Returns (r_nu, r_mu, zeta_nu, zeta_mu, F).  Root points sit at low
    markers, each member adds at most one point at a high marker plus one
    top.  Shapes rotate through: chained root (amalgam needs no fresh
    point), incomparable root with the member point under its top, and
    incomparable root with the top anchored on one root point only.
    """
    eps = tree.root_eps()
    shape = rng.choice(
        ["chain-root", "chained-top", "one-anchor", "top-only", "shared-top"]
    )
    u1, u2 = Point(eps[1], 0), Point(eps[2], 0)
    root_rel = [(u1, u2)] if shape == "chain-root" else []
    root = [u1, u2]
    z_shared = Point(TOP, 0)
    if shape == "shared-top":
        root = root + [z_shared]
        root_rel = [(u1, z_shared), (u2, z_shared)]

    lv_nu, lv_mu = rng.sample([6, 7], 2)
    col_nu, col_mu = rng.sample(range(1, tree.params.lambda_w), 2)
    chain_member = rng.random() < 0.5

    def member(level_idx, col):
        t = Point(TOP, col)
        pts = root + [t]
        r = list(root_rel)
        if shape == "top-only":
            r += [(u1, t), (u2, t)]
            return make_condition("kappa", pts, r, complete=True)
        s = Point(eps[level_idx], 0)
        pts.append(s)
        r += [(u1, s), (u2, s)]
        if shape == "chain-root":
            r += [(u1, t), (u2, t)]
            if chain_member:
                r.append((s, t))
        elif shape == "chained-top":
            r += [(u1, t), (u2, t), (s, t)]
        elif shape == "shared-top":
            # member point under both tops; tops share every lower bound
            r += [(u1, t), (u2, t), (s, t), (s, z_shared)]
        else:  # one-anchor: top sits over u1 alone
            r.append((u1, t))
        return make_condition("kappa", pts, r, complete=True)

    r_nu = member(lv_nu, col_nu)
    r_mu = member(lv_mu, col_mu)
    F = flat_F(tree, tree.params.lambda_w, 12 + rng.randint(0, 3))
    for cond in (r_nu, r_mu):
        found = validate(cond, tree, F)
        assert not found, f"kappa template broke: {found}"
    zeta_nu, zeta_mu = 9, 12
    return r_nu, r_mu, zeta_nu, zeta_mu, F


# --- random conditions by extension walks -------------------------------------


def walk_condition(tree, dialect, rng: random.Random, steps=3):
    """Grow a condition from a top seed by repeated fresh-point extension."""
    z = Point(TOP, 0)
    cond = make_condition(dialect, [z])
    eps = tree.root_eps()
    # keep two spare markers so witness chains stay splittable
    cap = len(eps) - 3
    for _ in range(steps):
        tgt = rng.choice(sorted(cond.points, key=str))
        if tgt.is_top:
            hi = cap
        else:
            hi = next(i for i, e in enumerate(eps) if not e < tgt.level) - 1
            hi = min(hi, cap)
        if hi < 1:
            continue
        idx = rng.randint(1, hi)
        alpha = eps[idx]
        if rng.random() < 0.5:
            # interior level: forces witness chains (kappa) or gives later
            # extensions a successor-level target to ladder up to (omega)
            alpha = alpha + rng.randint(1, 3)
        try:
            cond, _ = extend_below(cond, tgt, alpha, 0, tree)
        except Exception:
            continue
    return cond


def drop_meet(cond, rng: random.Random):
    """Meet-axiom mutant: blank one nonempty meet entry.

    Returns None when the condition has no nonempty meets to break.
    """
    rows = [(k, v) for k, v in cond.meets if v]
    if not rows:
        return None
    key, _ = rows[rng.randrange(len(rows))]
    table = dict(cond.meets)
    table[key] = frozenset()
    return make_condition(cond.dialect, cond.points, cond.strict, table)


def drop_witness(cond, tree, rng: random.Random):
    """Isolation mutant: delete one interpolant point outright.

    Picks a point that is the unique witness of some isolating split and
    rebuilds the condition without it, recomputing meets so only the
    witness clause breaks.  Returns None when no pair qualifies.
    """
    from scatterlab.conditions import point_key

    candidates = []
    for s, t in sorted(cond.strict, key=lambda st: (point_key(st[0]), point_key(st[1]))):
        if s.is_top:
            continue
        beta = tree.params.eta if t.is_top else t.level
        lam = tree.j_and_J(s.level, beta)[1]
        if not (lam.lo < s.level and lam.hi <= beta):
            continue
        ws = [
            u
            for u in cond.points
            if not u.is_top and u.level == lam.hi and cond.le(s, u) and cond.le(u, t)
        ]
        if len(ws) == 1 and ws[0] not in (s, t):
            candidates.append(ws[0])
    if not candidates:
        return None
    pool = sorted(set(candidates), key=point_key)
    victim = pool[rng.randrange(len(pool))]
    pts = cond.points - {victim}
    rel = {(a, b) for a, b in cond.strict if victim not in (a, b)}
    return make_condition(cond.dialect, pts, rel, complete=True)
