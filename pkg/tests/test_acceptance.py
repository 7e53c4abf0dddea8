"""Acceptance criteria, each run at its stated tolerance.

Every test appends one ``CRITERION`` line to the terminal summary, pass or
fail. Criteria whose literal reading cannot hold are kept as strict xfails
next to the reading that does hold.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from capkit.capacity import (CapacityParams, cap_relative, cap_tl_dual, cap_tl_primal)
from capkit.content import ContentParams, candidate_balls, content_bruteforce, content_exact
from capkit.space import PointSet, ball, build_grid, random_space, three_chain, two_point_space
from capkit.verify import (ball_example_scan, build_instance, default_suite, density_scan,
                           run_check, run_suite, summarize_density)

pytestmark = pytest.mark.slow


def report(label, ok, msg):
    ACCEPTANCE_LINES.append(f"CRITERION {label}: {'PASS' if ok else 'FAIL'}  {msg}")
    return ok


# 1. strong duality

def test_criterion_1_strong_duality():
    two = two_point_space()
    E = PointSet.from_ids(two, ["a"])
    P = CapacityParams(0.5, 2.0, 2.0)
    pr, du = cap_tl_primal(two, E, P), cap_tl_dual(two, E, P)
    closed = max(abs(v - 1 / 3) for v in (pr.value, pr.dual_value, du.value, du.dual_value))

    rng = np.random.default_rng(1)
    pairs = [(2.0, 2.0), (2.0, math.inf), (3.0, 1.5), (2.0, 1.0)]
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(200):
        n = int(rng.integers(2, 65))
        sp = random_space(rng, n, int(rng.integers(1, 3)), 0.7)
        E = PointSet(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        for p, q in pairs:
            P = CapacityParams(0.5, p, q)
            a, b = cap_tl_primal(sp, E, P), cap_tl_dual(sp, E, P)
            cross = (a.value - b.dual_value) / a.value
            worst = max(worst, a.rel_gap, b.rel_gap, cross)
    secs = time.perf_counter() - t0
    ok = closed <= 1e-6 and worst <= 1e-4 and secs < 60
    report(1, ok, f"two-point err {closed:.1e}; worst rel_gap {worst:.1e} over 200 spaces x 4 (p,q); {secs:.1f}s")
    assert closed <= 1e-6
    assert worst <= 1e-4
    assert secs < 60


# 2. relative capacity oracle

def test_criterion_2_three_chain_relative():
    chain = three_chain()
    t0 = time.perf_counter()
    cert = cap_relative(chain, PointSet([0]), 0, 0.6, CapacityParams(0.5, 2.0, 2.0, 5.0))
    secs = time.perf_counter() - t0
    err = max(abs(cert.value - 5 / 12), abs(cert.dual_value - 5 / 12))
    ok = err <= 1e-6 and secs < 1
    report(2, ok, f"value {cert.value:.9f} vs 5/12, err {err:.1e}; {secs:.2f}s")
    assert err <= 1e-6 and secs < 1


# 3. ball scaling

_BALL_CACHE: dict = {}


def _ball_slopes():
    if not _BALL_CACHE:
        G = build_grid(1, 10)
        c = int(np.argmin(np.abs(G.coords[:, 0] - 0.5)))
        rs = np.array([2.0 ** -k for k in range(7, 2, -1)])
        t0 = time.perf_counter()
        for beta, p in [(0.5, 2.0), (0.25, 2.0), (0.5, 3.0)]:
            vals, mus = [], []
            for r in rs:
                E = ball(G, c, r, closed=True)
                vals.append(cap_relative(G, E, c, r, CapacityParams(beta, p, 2.0, 3.0)).value)
                mus.append(G.mass[E.idx].sum())
            vals, mus = np.array(vals), np.array(mus)
            _BALL_CACHE[(beta, p)] = (float(np.polyfit(np.log(rs), np.log(vals), 1)[0]),
                                      float(np.polyfit(np.log(rs), np.log(vals / mus), 1)[0]))
        _BALL_CACHE["secs"] = time.perf_counter() - t0
    return _BALL_CACHE


def test_criterion_3_ball_scaling_per_unit_mass():
    """cap(B̄)/μ(B) scales like r^{-βp}, which is the two-sided ball estimate."""
    res = _ball_slopes()
    errs = {k: abs(v[1] + k[0] * k[1]) for k, v in res.items() if k != "secs"}
    ok = max(errs.values()) <= 0.15 and res["secs"] < 180
    report("3", ok, "slopes of cap/mu(B) " + ", ".join(
        f"(b={k[0]},p={k[1]}) {res[k][1]:.3f} vs {-k[0] * k[1]}" for k in errs) + f"; {res['secs']:.0f}s")
    assert max(errs.values()) <= 0.15
    assert res["secs"] < 180


@pytest.mark.xfail(strict=True, reason="cap(B̄) itself scales like r^{-βp}μ(B) = r^{1-βp} on the line")
def test_criterion_3_literal_unnormalized_slope():
    res = _ball_slopes()
    errs = {k: abs(v[0] + k[0] * k[1]) for k, v in res.items() if k != "secs"}
    ok = max(errs.values()) <= 0.15
    report("3 (literal, unnormalized)", ok, "slopes of cap " + ", ".join(
        f"(b={k[0]},p={k[1]}) {res[k][0]:.3f} vs {-k[0] * k[1]}" for k in errs) + " [expected fail]")
    assert ok


# 4. zero-capacity decay

_SCAN: dict = {}


def _example_scan():
    if not _SCAN:
        _SCAN.update(ball_example_scan(range(4, 9), beta=0.25, p=2.0, q=1.0, r=0.125))
    return _SCAN


def test_criterion_4_zero_capacity_decay():
    s = _example_scan()
    zero = max(s["lambda2"])
    err = abs(s["exponent_polylog"] - s["target"])
    ok = zero <= 1e-6 and err <= 0.2
    report(4, ok, f"Lambda=2 values <= {zero:.1e}; one-cell collar exponent {s['exponent_polylog']:.3f} "
                  f"(raw {s['exponent_raw']:.3f}, (j+2)^p divided out) vs {s['target']}")
    assert zero <= 1e-6
    assert err <= 0.2


@pytest.mark.xfail(strict=True, reason="at Λ = 2 exactly the capacity is zero, so no rate can be fitted")
def test_criterion_4_literal_lambda_two_fit():
    s = _example_scan()
    vals = np.maximum(np.array(s["lambda2"]), 1e-300)
    slope = float(np.polyfit(np.array(s["levels"], float), np.log2(vals), 1)[0])
    ok = abs(slope - s["target"]) <= 0.2
    report("4 (literal, Lambda=2 fit)", ok, f"fitted exponent of solver-zero values {slope:.3f} [expected fail]")
    assert ok


# 5. explicit-constant inequalities

def test_criterion_5_explicit_inequalities():
    explicit = {"disc_vs_H", "m_twosided", "riesz_twosided", "riesz_vs_tl"}
    suite = [e for e in default_suite() if e[0] in explicit]
    results = run_suite(suite, seed=0)
    bad = [(r.check_id, r.instance, r.status) for r in results if r.status != "pass"]
    worst = max(r.measured_constant / r.explicit_bound for r in results)
    report(5, not bad, f"{len(results)} explicit checks, {len(bad)} failures; "
                       f"worst lhs/(bound*rhs) {worst:.3f}")
    assert not bad


# 6. q-independence

def test_criterion_6_q_independence():
    res = run_check("q_indep", build_instance("grid1d-L6"), {"sets": 20}, seed=0)
    drift = res.details.get("drift", math.inf)
    ok = res.passed and math.isfinite(res.measured_constant)
    report(6, ok, f"max/min over q: L6 {res.measured_constant:.3f}, "
                  f"L7 {res.details.get('refined_constant', math.nan):.3f}, drift {drift:.3f}")
    assert ok and drift <= 0.25


# 7. Muckenhoupt–Wheeden

def test_criterion_7_muckenhoupt_wheeden():
    res = run_check("mw", build_instance("grid1d-L7"), {"samples": 32}, seed=0)
    drift = res.details.get("drift", math.inf)
    ok = res.passed and math.isfinite(res.measured_constant)
    report(7, ok, f"constant L7 {res.measured_constant:.3f}, "
                  f"L8 {res.details.get('refined_constant', math.nan):.3f}, drift {drift:.3f}")
    assert ok and drift <= 0.25


# 8. Hausdorff content exactness

def _small_content_instance(rng):
    while True:
        n = int(rng.integers(3, 11))
        sp = random_space(rng, n, int(rng.integers(1, 3)), 0.8)
        F = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
        params = ContentParams(float(rng.uniform(0, 2)), float(rng.uniform(0.1, 1.2) * sp.diam))
        if len(candidate_balls(sp, F, params, dedupe=False)) <= 40:
            return sp, F, params


def test_criterion_8_content_exactness():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        sp, F, params = _small_content_instance(rng)
        a, b = content_exact(sp, F, params).value, content_bruteforce(sp, F, params)
        worst = max(worst, abs(a - b) / max(b, 1e-300))
    chain = content_exact(three_chain(), [0, 1, 2], ContentParams(1.0, 2.0)).value
    ok = worst <= 1e-12 and chain == 1.5
    report(8, ok, f"50 instances, worst rel diff {worst:.1e}; three-chain {chain}")
    assert worst <= 1e-12
    assert chain == 1.5


# 9. content lower bound and equivalences

def test_criterion_9_content_and_equivalence():
    """Finite positive constants wherever the recorded hypotheses hold.

    Refinement drift is reported but not asserted here; at level 7 the
    radius 2^-7 is a single grid cell.
    """
    suite = [(cid, name, {}) for cid in ("hc_lower", "equiv_upper", "equiv_lower")
             for name in ("grid1d-L7", "grid1d-L8", "grid1d-L9")]
    results = run_suite(suite, seed=0)
    held = [r for r in results if r.status != "hypothesis-skipped"]
    bad = [(r.check_id, r.instance) for r in held
           if not (math.isfinite(r.measured_constant) and r.measured_constant > 0)]
    consts = ", ".join(f"{r.check_id}@{r.instance[-2:]} {r.measured_constant:.3g}"
                       f" (drift {r.details.get('drift', math.nan):.2f})" for r in held)
    skipped = ", ".join(f"{r.check_id}@{r.instance}" for r in results if r.status == "hypothesis-skipped")
    ids_run = {r.check_id for r in held}
    ok = not bad and ids_run == {"hc_lower", "equiv_upper", "equiv_lower"}
    report(9, ok, f"constants {consts}; hypotheses not met: {skipped or 'none'}")
    assert ids_run == {"hc_lower", "equiv_upper", "equiv_lower"}
    assert not bad


# 10. density scan

def _density(beta):
    s = density_scan(depths=(3, 4, 5, 6), beta=beta, p=2.0, q=2.0, Lambda=41.0, level=10,
                     single_levels=(8, 9, 10) if beta > 0.5 else (7, 8, 9))
    return summarize_density(s)


def _fmt(summ):
    lo = ", ".join(f"{k} {v:.2f}" for k, v in summ["cantor_min"].items())
    ex = ", ".join(f"{k} {v:.2f}" for k, v in summ["single_exponent"].items())
    return f"Cantor minima {lo}; single-point decay per level {ex}"


def test_criterion_10_density_scan_below_critical():
    """β = 1/4: Cantor codimension 1 − log2/log3 < βp, and points are polar."""
    summ = _density(0.25)
    ok = summ["all_bounded"] and summ["all_degenerate"]
    report("10 (beta=0.25)", ok, _fmt(summ))
    assert summ["all_bounded"]
    assert summ["all_degenerate"]


@pytest.mark.xfail(strict=True, reason="with βp = 1.8 above the line's dimension points have positive "
                                       "capacity, so the single-point ratios do not degenerate")
def test_criterion_10_literal_beta_09():
    summ = _density(0.9)
    ok = summ["all_bounded"] and summ["all_degenerate"]
    report("10 (literal, beta=0.9)", ok, _fmt(summ) + " [expected fail]")
    assert ok
