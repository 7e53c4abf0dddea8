"""
Running inequality checks
=========================

Each check evaluates both sides of an inequality on an instance. Explicit
checks compare against a stated constant; existential ones record the
measured constant and its drift when the grid is refined once.
"""
import json

from capkit.verify import report_dict, run_suite

suite = [
    ("m_twosided", "grid1d-L6", {}),
    ("riesz_twosided", "cantor-d4-L7", {}),
    ("disc_vs_H", "grid2d-L4", {}),
    ("duality", "two_point", {"E": ["a"], "pq": [(2.0, 2.0)]}),
    ("mw", "grid1d-L6", {"samples": 8}),
]
results = run_suite(suite, seed=3)
for r in results:
    print(f"{r.check_id:15s} {r.instance:14s} {r.status:5s} constant {r.measured_constant:.4g}")

report = report_dict(results, seed=3)
print(json.dumps(report["records"][0], indent=1)[:600])
