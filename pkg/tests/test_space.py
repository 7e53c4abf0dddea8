import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capkit.space import (PointSet, SpaceError, ball, ball_measure, build_cantor, build_grid,
                          doubling_constant, estimate_stats, make_space, random_space,
                          reverse_doubling_fit, scale_window, validate_metric)
from conftest import matrix_space


def test_two_point_is_valid(two_point):
    rep = validate_metric(two_point)
    assert rep.ok
    assert all(rep.checks.values())


def test_symmetry_violation_names_pair():
    sp = make_space(["a", "b"], [1, 1], [[0, 1], [2, 0]])
    rep = validate_metric(sp)
    assert not rep.ok
    assert rep.failures["symmetry"] == ("a", "b")


def test_triangle_violation_names_triple():
    sp = matrix_space([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    rep = validate_metric(sp)
    assert rep.failures["triangle"] == ("0", "1", "2")


def test_nonpositive_mass_and_duplicate_ids():
    sp = make_space(["a", "b"], [1, 0], [[0, 1], [1, 0]])
    assert "positive_mass" in validate_metric(sp).failures
    with pytest.raises(SpaceError):
        make_space([], [], np.zeros((0, 0)))


def test_scale_window_two_point(two_point):
    w = scale_window(two_point)
    assert (w.n0, w.n_max) == (-1, 0)
    assert w.tail_start == 1


def test_scale_window_chain(chain):
    assert scale_window(chain).n0 == -2


@pytest.mark.parametrize("lam", [2.0, 0.5, 4.0, 3.0, 0.3])
def test_scale_window_rescaling(chain, lam):
    w0 = scale_window(chain)
    w1 = scale_window(chain.scaled(lam))
    # recompute the defining inequality directly
    n = math.ceil(-math.log2(2 * chain.diam * lam))
    while 2.0 ** (-n) > 2 * chain.diam * lam:
        n += 1
    while 2.0 ** (-(n - 1)) <= 2 * chain.diam * lam:
        n -= 1
    assert w1.n0 == n
    if lam == 2.0:
        assert w1.n0 == w0.n0 - 1


def test_window_singletons_past_n_max():
    rng = np.random.default_rng(3)
    for _ in range(10):
        sp = random_space(rng, 9, 2)
        w = scale_window(sp)
        for n in range(w.tail_start, w.tail_start + 4):
            assert np.all((sp.dist < 2.0 ** (-n)).sum(1) == 1)
        assert np.any((sp.dist < 2.0 ** (-w.n_max + 1)).sum(1) > 1)
        assert 2.0 ** (-w.n0) <= 2 * sp.diam < 2.0 ** (-w.n0 + 1)


def test_ball_boundaries(two_point, chain):
    assert ball(two_point, 0, 1).ids(two_point) == ["a"]
    assert ball(two_point, 0, 2).ids(two_point) == ["a", "b"]
    assert ball_measure(two_point, 0, 2) == 2.0
    assert ball(chain, 0, 1, closed=True).ids(chain) == ["0", "1"]


def test_two_point_doubling(two_point):
    assert doubling_constant(two_point) == 2.0


def test_grid_sigma_near_one():
    st_ = estimate_stats(build_grid(1, 10))
    assert abs(st_.sigma - 1) <= 0.1


def test_stats_satisfy_definitions():
    rng = np.random.default_rng(11)
    for _ in range(5):
        sp = random_space(rng, 10, 2)
        s = estimate_stats(sp)
        d = np.unique(sp.dist[sp.dist > 0])
        radii = np.concatenate([d, d / 2, [2 * sp.diam]])
        for x in range(sp.n):
            m = sp.ball_mass_many(x, radii)
            m2 = sp.ball_mass_many(x, 2 * radii)
            assert np.all(m2 <= s.c_mu * m * (1 + 1e-12))
            R = np.concatenate([d, [2 * sp.diam]])
            mr = sp.ball_mass_many(x, R)
            for a in range(R.size):
                for b in range(a + 1, R.size):
                    assert mr[a] / mr[b] <= s.c_sigma * (R[a] / R[b]) ** s.sigma * (1 + 1e-9)


def test_grid_builders():
    g = build_grid(1, 2)
    assert np.allclose(g.coords[:, 0], [1 / 8, 3 / 8, 5 / 8, 7 / 8])
    assert np.allclose(g.mass, 0.25)
    g2 = build_grid(2, 1)
    assert g2.n == 4 and math.isclose(g2.diam, math.sqrt(2) / 2)
    g12 = build_grid(1, 12)
    assert g12.n == 4096 and abs(g12.total_mass - 1) < 1e-12


def test_cantor_builders():
    sp, E = build_cantor(1 / 3, 1)
    x = sp.coords[E.idx, 0]
    assert np.all((x <= 1 / 3) | (x >= 2 / 3))
    sp, E = build_cantor(0.25, 0)
    assert len(E) == sp.n
    for depth in range(1, 6):
        sp, E = build_cantor(1 / 3, depth, 10)
        expected = (2 / 3) ** depth * sp.n
        assert abs(len(E) - expected) <= 2 ** depth


def test_size_cap():
    with pytest.raises(SpaceError):
        build_grid(2, 7)


def test_reverse_doubling_degenerate_single_scale(two_point):
    sigma, c_sigma, deg = reverse_doubling_fit(two_point)
    assert c_sigma >= 1 or deg


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2 ** 31 - 1), st.floats(0.1, 10))
def test_window_shift_property(n, seed, lam):
    sp = random_space(np.random.default_rng(seed), n, 2)
    w = scale_window(sp)
    w2 = scale_window(sp.scaled(lam))
    assert 2.0 ** (-w2.n0) <= 2 * sp.diam * lam * (1 + 1e-12)
    assert abs((w2.n0 - w.n0) + math.log2(lam)) <= 1 + 1e-9


def test_pointset_from_ids(two_point):
    E = PointSet.from_ids(two_point, ["b"])
    assert E.ids(two_point) == ["b"] and 1 in E
