import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capkit.content import (ContentParams, ContentTooLarge, candidate_balls, content_bnb,
                            content_bruteforce, content_exact, content_greedy, content_line)
from capkit.space import PointSet, ball, build_grid, make_space, random_space


def oracle_content(space, F, d, rho):
    """Minimum cover cost by exhaustive search, with its own candidate list.

    Radii are every distinct distance up to ρ, ρ itself and the midpoints in
    between, so the check also covers radii the solver never considers.
    """
    F = list(F)
    if not F:
        return 0.0
    balls = {}
    for x in range(space.n):
        ds = np.unique(np.concatenate([space.dist[x][(space.dist[x] > 0) & (space.dist[x] <= rho)],
                                       [rho]]))
        mids = (ds[1:] + ds[:-1]) / 2
        for r in np.concatenate([ds, mids, [ds[0] / 2]]):
            inside = frozenset(np.flatnonzero(space.dist[x] < r).tolist())
            trace = frozenset(inside & set(F))
            if not trace:
                continue
            cost = space.mass[list(inside)].sum() * r ** (-d)
            if cost < balls.get(trace, math.inf):
                balls[trace] = cost
    full = frozenset(F)
    best = {frozenset(): 0.0}
    frontier = [frozenset()]
    # shortest path over covered sets
    while frontier:
        nxt = []
        for S in frontier:
            for T, c in balls.items():
                U = S | T
                v = best[S] + c
                if v < best.get(U, math.inf) - 1e-15:
                    best[U] = v
                    nxt.append(U)
        frontier = nxt
    return best[full]


def test_three_chain_examples(chain):
    res = content_exact(chain, [0, 1, 2], ContentParams(1.0, 2.0))
    assert res.value == 1.5
    assert res.cover == [("1", 2.0)]
    g = content_greedy(chain, [0, 1, 2], ContentParams(1.0, 2.0))
    assert 1.5 <= g.value <= 3.0


def test_empty_set(chain):
    assert content_exact(chain, [], ContentParams(1.0, 1.0)).value == 0.0
    assert content_greedy(chain, [], ContentParams(1.0, 1.0)).value == 0.0


def test_zero_codimension_is_cover_mass():
    sp = random_space(np.random.default_rng(4), 8, 2)
    F = [0, 2, 5]
    res = content_exact(sp, F, ContentParams(0.0, 2 * sp.diam))
    whole = sp.total_mass
    assert res.value <= whole + 1e-15
    for x in range(sp.n):
        r = sp.dist[x, F].max() + 1e-9
        assert res.value <= sp.mass[ball(sp, x, r).idx].sum() + 1e-12


def _random_instance(rng):
    for _ in range(100):
        n = int(rng.integers(3, 11))
        sp = random_space(rng, n, int(rng.integers(1, 3)), 0.8)
        F = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        params = ContentParams(float(rng.uniform(0, 2)), float(rng.uniform(0.1, 1.2) * sp.diam))
        if len(candidate_balls(sp, F, params, dedupe=False)) <= 40:
            return sp, F, params
    raise RuntimeError("no small instance found")


def test_exact_matches_enumeration_on_fifty_instances():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        sp, F, params = _random_instance(rng)
        exact = content_exact(sp, F, params).value
        bnb = content_bnb(sp, F, params).value
        brute = content_bruteforce(sp, F, params)
        ref = oracle_content(sp, F, params.d, params.rho)
        assert math.isclose(exact, ref, rel_tol=1e-12)
        assert math.isclose(bnb, ref, rel_tol=1e-12)
        assert math.isclose(brute, ref, rel_tol=1e-12)
        assert content_greedy(sp, F, params).value >= exact * (1 - 1e-12)


def test_line_dp_matches_bnb():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(4, 16))
        x = np.sort(rng.random(n))
        sp = make_space([f"x{i}" for i in range(n)], rng.random(n) + 0.1, "euclidean",
                        coords=x[:, None], meta={"metric": "euclidean"})
        F = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        params = ContentParams(float(rng.uniform(0, 1.5)), float(rng.uniform(0.05, 1)))
        a = content_line(sp, F, params)
        b = content_bnb(sp, F, params)
        assert math.isclose(a.value, b.value, rel_tol=1e-12)
        # the cover is a real cover at the stated cost
        covered = set()
        for cid, r in a.cover:
            covered |= set(ball(sp, sp.index_of(cid), r).idx.tolist())
        assert set(F.tolist()) <= covered


def test_bnb_limits():
    sp = build_grid(2, 3)
    with pytest.raises(ContentTooLarge):
        content_bnb(sp, np.arange(30), ContentParams(1.0, 0.5))


def test_ball_lower_bound():
    """r^{-d} μ(B(x,r)) ≤ content of the closed ball with ρ = r."""
    for sp in (build_grid(1, 6), random_space(np.random.default_rng(1), 12, 2)):
        for x in (0, sp.n // 2):
            for r in np.unique(sp.dist[x])[1:6]:
                F = ball(sp, x, r, closed=True)
                for d in (0.3, 1.0):
                    val = content_exact(sp, F, ContentParams(d, r)).value
                    assert r ** (-d) * sp.mass[ball(sp, x, r).idx].sum() <= val * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_monotone_and_subadditive(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(rng, int(rng.integers(4, 10)), 2)
    d, rho = float(rng.uniform(0, 2)), float(rng.uniform(0.2, 1.0) * sp.diam)
    P = ContentParams(d, rho)
    A = set(rng.choice(sp.n, size=int(rng.integers(1, sp.n)), replace=False).tolist())
    B = set(rng.choice(sp.n, size=int(rng.integers(1, sp.n)), replace=False).tolist())
    cA = content_exact(sp, sorted(A), P).value
    cB = content_exact(sp, sorted(B), P).value
    cU = content_exact(sp, sorted(A | B), P).value
    assert cA <= cU * (1 + 1e-12)
    assert cU <= (cA + cB) * (1 + 1e-12)
    # a smaller radius bound can only raise the content
    cA_small = content_exact(sp, sorted(A), ContentParams(d, rho / 2)).value
    assert cA_small >= cA * (1 - 1e-12)


def test_candidate_radii_are_right_endpoints(chain):
    for c in candidate_balls(chain, [0, 1, 2], ContentParams(1.0, 2.0), dedupe=False):
        ds = chain.dist[c.center]
        assert c.radius == 2.0 or c.radius in ds


def test_cover_tie_break_is_deterministic():
    sp = build_grid(1, 3)
    a = content_exact(sp, [2, 5], ContentParams(0.5, 0.3))
    b = content_exact(sp, [2, 5], ContentParams(0.5, 0.3))
    assert a.cover == b.cover
