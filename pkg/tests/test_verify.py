import math

import numpy as np
import pytest

from capkit.space import build_grid, three_chain, two_point_space
from capkit.verify import (CHECK_IDS, CheckResult, ball_construction, build_instance,
                           default_suite, random_compact, random_field, refine, report_csv,
                           report_dict, run_check, run_suite)

EXPLICIT = ("disc_vs_H", "m_twosided", "riesz_twosided", "riesz_vs_tl", "leibniz", "duality")


def test_check_table_is_complete():
    assert len(CHECK_IDS) == 18
    assert {c for c, _, _ in default_suite()} == set(CHECK_IDS)


def test_duality_two_point():
    r = run_check("duality", two_point_space(), {"E": ["a"], "pq": [(2.0, 2.0)]})
    assert r.passed
    assert abs(r.lhs - 1 / 3) < 1e-6 and abs(r.rhs - 1 / 3) < 1e-6


@pytest.mark.parametrize("check_id", EXPLICIT)
@pytest.mark.parametrize("name", ["grid1d-L5", "grid2d-L3", "cantor-d3-L6", "three_chain", "two_point"])
def test_explicit_checks_hold_everywhere(check_id, name):
    opts = {"E": ["a"]} if name == "two_point" and check_id in ("duality", "riesz_vs_tl") else {}
    if check_id == "duality" and name != "two_point":
        opts = {"sets": 1, "pq": [(2.0, 2.0), (2.0, math.inf)]}
    r = run_check(check_id, build_instance(name), opts, seed=3)
    assert r.status == "pass", r.details
    assert r.explicit_bound is not None


def test_hypothesis_failure_is_never_a_pass():
    # σ ≈ 1 on the line, so β p = 1.8 breaks σ > βp
    r = run_check("pot_sobolev", build_grid(1, 6), {"beta": 0.9})
    assert r.status == "hypothesis-skipped" and not r.passed
    r = run_check("equiv_lower", build_grid(1, 6), {"Lambda": 10.0})
    assert r.status == "hypothesis-skipped" and not r.passed
    r = run_check("ball_lower", build_grid(1, 6), {"r": 0.2})
    assert r.status == "hypothesis-skipped"


def test_existential_check_reports_drift():
    r = run_check("mw", build_grid(1, 6), {"samples": 4})
    assert r.passed
    assert r.details["refined_instance"] == "grid1d-L7"
    assert r.details["drift"] <= 0.25


def test_refine_and_inputs_are_continuum_defined():
    g = build_grid(1, 5)
    f = refine(g)
    assert f.n == 2 * g.n
    u, v = random_field(g, 1, 2), random_field(f, 1, 2)
    assert abs(u.mean() - v.mean()) < 0.05 * u.mean()
    E = random_compact(g, 16, 0.2, 0, 0)
    E2 = random_compact(f, 32, 0.2, 0, 0)
    assert abs(g.mass[E.idx].sum() - f.mass[E2.idx].sum()) <= 4 / g.n
    assert refine(two_point_space()) is None


def test_ball_construction_is_admissible():
    from capkit.operators import is_fractional_gradient
    g = build_grid(1, 7)
    phi, rho, LB = ball_construction(g, 64, 0.1, 0.5, 3.0)
    assert is_fractional_gradient(g, phi, rho, 0.5, omega=LB)[0]
    assert np.all(phi[g.dist[64] < 0.1] == 1)


def test_suite_determinism_and_exports():
    suite = [("disc_vs_H", "grid1d-L5", {}), ("m_twosided", "three_chain", {}),
             ("duality", "two_point", {"E": ["a"], "pq": [(2.0, 2.0)]})]
    a = run_suite(suite, seed=7)
    b = run_suite(suite, seed=7)
    assert report_dict(a, 7) == report_dict(b, 7)
    assert report_csv(a).splitlines()[0] == "check_id,instance,lhs,rhs,ratio"
    assert len(report_csv(a).splitlines()) == 4
    assert report_dict(run_suite([], seed=1), 1)["records"] == []


def test_suite_survives_failing_entry():
    out = run_suite([("duality", "no-such-instance", {}), ("m_twosided", "three_chain", {})])
    assert out[0].status == "fail" and "error" in out[0].details
    assert out[1].passed


def test_unknown_check():
    with pytest.raises(KeyError):
        run_check("nope", three_chain())


def test_result_record_schema():
    r = run_check("m_twosided", three_chain())
    rec = r.record()
    for key in ("check_id", "instance", "hypotheses", "lhs", "rhs", "measured_constant",
                "explicit_bound", "passed", "status", "details"):
        assert key in rec
    assert "runtime" not in rec and "runtime" in r.record(runtime=True)
    assert isinstance(r, CheckResult)
