import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capkit.capacity import (CapacityError, CapacityParams, cap_relative, cap_riesz, cap_tl_dual,
                             cap_tl_primal, tl_lower_bound, validate_certificate)
from capkit.operators import PointMeasure, potential_H
from capkit.space import PointSet, build_grid, make_space, random_space
from oracles import cp_capacity, relative_capacity, riesz_capacity

P22 = CapacityParams(0.5, 2.0, 2.0)


# --------------------------------------------------------------------------
# closed forms

def test_two_point_primal_and_dual(two_point):
    E = PointSet.from_ids(two_point, ["a"])
    pr = cap_tl_primal(two_point, E, P22)
    du = cap_tl_dual(two_point, E, P22)
    assert abs(pr.value - 1 / 3) < 1e-6 and abs(pr.dual_value - 1 / 3) < 1e-6
    assert abs(du.dual_value - 1 / 3) < 1e-6
    assert pr.rel_gap <= 1e-6


def test_two_point_dual_measure_evaluation(two_point):
    w = cap_tl_primal(two_point, ["a"], P22).primal["f"].window
    for t in (1.0, 0.01, 37.0):
        nu = PointMeasure.delta(two_point, "a", t)
        assert math.isclose(tl_lower_bound(two_point, nu, P22, w), 1 / 3)


def test_truncating_the_tail_would_be_wrong(two_point):
    # dropping the analytic tail slot leaves 1/(1/2+1/2+1) = 1/2
    E = PointSet.from_ids(two_point, ["a"])
    assert abs(cap_tl_primal(two_point, E, P22).value - 0.5) > 0.1


def test_empty_sets(two_point, chain):
    assert cap_tl_primal(two_point, [], P22).value == 0.0
    assert cap_tl_dual(two_point, [], P22).value == 0.0
    assert cap_relative(chain, [], 0, 0.6, CapacityParams(0.5, 2, 2, 8)).value == 0.0
    assert cap_riesz(two_point, [], 0.5, 2.0).value == 0.0


def test_three_chain_relative(chain):
    cert = cap_relative(chain, PointSet([0]), 0, 0.6, CapacityParams(0.5, 2, 2, 5))
    assert abs(cert.value - 5 / 12) < 1e-6
    assert abs(cert.dual_value - 5 / 12) < 1e-6


def test_two_point_relative_is_zero(two_point):
    cert = cap_relative(two_point, PointSet([0]), 0, 1.0, CapacityParams(0.5, 2, 2, 2))
    assert cert.value <= 1e-9


@pytest.mark.parametrize("beta,p", [(0.5, 2.0), (0.3, 3.0), (0.9, 1.5)])
def test_two_point_riesz(two_point, beta, p):
    cert = cap_riesz(two_point, ["a"], beta, p)
    assert abs(cert.value - 1.0) < 1e-6


def test_riesz_mass_doubling(two_point):
    sp2 = make_space(["a", "b"], [2.0, 2.0], two_point.dist)
    a = cap_riesz(two_point, ["a"], 0.5, 2.0).value
    b = cap_riesz(sp2, ["a"], 0.5, 2.0).value
    assert math.isclose(b, 2 * a, rel_tol=1e-6)


def test_parameter_validation():
    with pytest.raises(CapacityError):
        CapacityParams(0.5, 1.0)
    with pytest.raises(CapacityError):
        CapacityParams(0.5, 2.0, 0.5)
    with pytest.raises(CapacityError):
        CapacityParams(-0.1, 2.0)
    with pytest.raises(CapacityError):
        CapacityParams(0.5, 2.0, 2.0, 1.5)


# --------------------------------------------------------------------------
# independent oracles

def _instances(count, seed, n=(3, 9)):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        sp = random_space(rng, int(rng.integers(*n)), int(rng.integers(1, 3)), 0.6)
        E = np.sort(rng.choice(sp.n, size=int(rng.integers(1, sp.n)), replace=False))
        out.append((sp, E))
    return out


# the p = 3 oracle goes through a slow cone rewriting, so it runs once
@pytest.mark.parametrize("p,q,k", [(2.0, 2.0, 0), (2.0, 2.0, 1), (2.0, 2.0, 2), (2.0, math.inf, 0),
                                   (2.0, math.inf, 1), (2.0, math.inf, 2), (2.0, 1.0, 0),
                                   (2.0, 1.0, 1), (2.0, 1.0, 2), (3.0, 1.5, 0)])
def test_tl_against_oracle(p, q, k):
    sp, E = _instances(3, 100 + int(p * 10 + min(q, 9)))[k]
    params = CapacityParams(0.5, p, q)
    ours = cap_tl_primal(sp, PointSet(E), params)
    ref = cp_capacity(sp, E, 0.5, p, q)
    assert math.isclose(ours.value, ref, rel_tol=2e-5)
    assert ours.dual_value <= ref * (1 + 2e-5)


@pytest.mark.parametrize("q", [2.0, 1.0, math.inf])
@pytest.mark.parametrize("k", range(3))
def test_relative_against_oracle(q, k):
    rng = np.random.default_rng(300 + k)
    sp = random_space(rng, 10, 2, 0.5)
    c = int(rng.integers(sp.n))
    r = min(float(np.sort(sp.dist[c])[3]), 0.4 * sp.dist[c].max()) + 1e-9
    inside = np.flatnonzero(sp.dist[c] <= r)
    E = np.sort(rng.choice(inside, size=max(1, inside.size // 2), replace=False))
    params = CapacityParams(0.5, 2.0, q, 3.0)
    ours = cap_relative(sp, PointSet(E), c, r, params)
    ref = relative_capacity(sp, E, c, r, 0.5, 2.0, q, 3.0)
    assert ref > 1e-3
    assert math.isclose(ours.value, ref, rel_tol=2e-5)


@pytest.mark.parametrize("p", [2.0, 3.0, 1.5])
def test_riesz_against_oracle(p):
    for sp, E in _instances(3, 400 + int(10 * p)):
        ours = cap_riesz(sp, PointSet(E), 0.5, p)
        ref = riesz_capacity(sp, E, 0.5, p)
        assert math.isclose(ours.value, ref, rel_tol=2e-5)
        assert ours.dual_value <= ours.value * (1 + 1e-9)


# --------------------------------------------------------------------------
# properties

def test_strong_duality_random():
    for sp, E in _instances(12, 7, n=(3, 20)):
        for p, q in [(2.0, 2.0), (2.0, math.inf), (3.0, 1.5), (2.0, 1.0)]:
            params = CapacityParams(0.5, p, q)
            pr = cap_tl_primal(sp, PointSet(E), params)
            du = cap_tl_dual(sp, PointSet(E), params)
            assert du.dual_value <= pr.value * (1 + 1e-9)
            assert (pr.value - du.dual_value) / pr.value <= 1e-4


def test_tail_collapse_is_exact():
    for sp, E in _instances(6, 21):
        for q in (1.0, 2.0, math.inf):
            params = CapacityParams(0.5, 2.0, q)
            a = cap_tl_primal(sp, PointSet(E), params).value
            b = cap_tl_primal(sp, PointSet(E), params, extra=3).value
            assert abs(a - b) <= 1e-8 * a + 1e-7 * a


def test_primal_feasibility_and_certificates():
    for sp, E in _instances(6, 31):
        E = PointSet(E)
        cert = cap_tl_primal(sp, E, CapacityParams(0.5, 2.0, 1.5))
        f = cert.primal["f"]
        Hf = potential_H(sp, f, 0.5, 1.5)
        assert np.all(Hf[E.idx] >= 1 - 1e-8) and f.min() >= 0
        assert validate_certificate(sp, cert)["ok"]
        assert validate_certificate(sp, cap_tl_dual(sp, E, CapacityParams(0.5, 2.0, 3.0)))["ok"]
        assert validate_certificate(sp, cap_riesz(sp, E, 0.5, 2.0))["ok"]
    g = build_grid(1, 5)
    E = PointSet(np.arange(14, 18))
    rel = cap_relative(g, E, 16, 0.1, CapacityParams(0.5, 2.0, 2.0, 3.0))
    chk = validate_certificate(g, rel)
    assert chk["ok"] and chk["residual"] <= 1e-8


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_set_monotonicity(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(rng, int(rng.integers(4, 10)), 2)
    E = rng.choice(sp.n, size=int(rng.integers(2, sp.n)), replace=False)
    F = E[: max(1, len(E) // 2)]
    params = CapacityParams(0.5, 2.0, 2.0)
    tol = 2e-6
    assert cap_tl_primal(sp, F, params).value <= cap_tl_primal(sp, E, params).value * (1 + tol)
    assert cap_riesz(sp, F, 0.5, 2.0).value <= cap_riesz(sp, E, 0.5, 2.0).value * (1 + tol)
    c = int(E[0])
    r = float(sp.dist[c, E].max()) + 1e-9
    rp = CapacityParams(0.5, 2.0, 2.0, 3.0)
    a = cap_relative(sp, PointSet(F), c, r, rp).value if c in F else None
    if a is not None:
        # zero-capacity instances come back at solver noise of order 1e-9
        assert a <= cap_relative(sp, PointSet(E), c, r, rp).value * (1 + tol) + 1e-8


def test_q_monotonicity():
    for sp, E in _instances(5, 41):
        vals = [cap_tl_primal(sp, PointSet(E), CapacityParams(0.5, 2.0, q)).value
                for q in (1.0, 1.5, 2.0, 4.0, math.inf)]
        assert all(b <= a * (1 + 2e-6) for a, b in zip(vals, vals[1:]))
    g = build_grid(1, 5)
    E = PointSet(np.arange(14, 19))
    rel = [cap_relative(g, E, 16, 0.1, CapacityParams(0.5, 2.0, q, 3.0)).value
           for q in (1.0, 2.0, math.inf)]
    assert rel[0] >= rel[1] * (1 - 2e-6) and rel[1] >= rel[2] * (1 - 2e-6)


def test_symmetry_reduction_matches_full_program():
    for dim, lev in [(1, 6), (2, 3)]:
        g = build_grid(dim, lev)
        c = int(np.argmin(((g.coords - 0.5) ** 2).sum(1)))
        r = 0.2
        E = PointSet(np.flatnonzero(g.dist[c] <= r))
        params = CapacityParams(0.5, 2.0, 2.0, 3.0)
        a = cap_relative(g, E, c, r, params, symmetry="auto")
        b = cap_relative(g, E, c, r, params, symmetry=None)
        assert math.isclose(a.value, b.value, rel_tol=1e-5)
        assert a.dual_value <= b.value * (1 + 1e-9)
