"""Command-line front end.

Exit codes are 0 on success, 1 on invalid input (malformed files, metric
violations, out-of-range parameters, failed checks) and 2 when a solver
stops short of its tolerance.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as cio
from .capacity import (CapacityError, CapacityParams, cap_relative, cap_riesz, cap_tl_dual,
                       cap_tl_primal, validate_certificate)
from .content import ContentParams, ContentTooLarge, content_exact, content_greedy
from .operators import (PartitionFamily, ScaleSequence, frac_max, hdual_sequence, potential_H,
                        potential_L, riesz_I)
from .space import (PointSet, SpaceError, ball, build_cantor, build_grid, require_valid,
                    three_chain, two_point_space, validate_metric)
from .verify import CHECK_IDS, default_suite, report_csv, report_dict, run_check, run_suite

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


class CliError(Exception):
    """Input problem reported with exit code 1."""


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture (``two_point.json``, ``nonsymmetric.json``)."""
    return Path(str(resources.files("capkit") / "fixtures" / name))


def _float(text: str) -> float:
    """Float parser that accepts ``inf``."""
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


# --------------------------------------------------------------------------
# Inputs

def load_space(spec: str):
    """A space from a file path or a builder spec.

    Builder specs: ``two_point``, ``three_chain``, ``grid:DIM:LEVEL`` and
    ``cantor:RATIO:DEPTH[:LEVEL]``. Fixture names (``fixture:NAME``) resolve
    to the shipped files.
    """
    if spec == "two_point":
        return two_point_space()
    if spec == "three_chain":
        return three_chain()
    if spec.startswith("grid:"):
        _, dim, level = spec.split(":")
        return build_grid(int(dim), int(level))
    if spec.startswith("cantor:"):
        parts = spec.split(":")
        lev = int(parts[3]) if len(parts) > 3 else None
        return build_cantor(float(parts[1]), int(parts[2]), lev)[0]
    if spec.startswith("fixture:"):
        return cio.read_space(fixture_path(spec.split(":", 1)[1]))
    path = Path(spec)
    if not path.exists():
        raise CliError(f"space file not found: {spec}")
    return cio.read_space(path)


def load_set(space, spec: str | None) -> PointSet:
    """A point set from ``{a,b}``, ``ball:ID:R``, ``cantor`` or a JSON file."""
    if spec is None:
        raise CliError("a point set is required (--set)")
    s = spec.strip()
    if s.startswith("{") and s.endswith("}"):
        ids = [t.strip() for t in s[1:-1].split(",") if t.strip()]
        return cio.parse_pointset(space, ids)
    if s.startswith("ball:"):
        _, pid, r = s.split(":")
        return ball(space, space.index_of(pid), float(r), closed=True)
    if s == "cantor":
        m = space.meta
        if m.get("kind") != "cantor":
            raise CliError("--set cantor needs a Cantor space")
        return build_cantor(m["ratio"], m["depth"], m["level"])[1]
    if Path(s).exists():
        return cio.read_pointset(space, s)
    raise CliError(f"cannot read point set {spec!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# Commands

def cmd_space(a) -> int:
    if a.action == "validate":
        space = load_space(a.space)
        rep = validate_metric(space)
        print(rep.summary())
        if not rep.ok:
            axiom, w = next(iter(rep.failures.items()))
            print(f"invalid: {axiom} violated at ({', '.join(w)})", file=sys.stderr)
            return EXIT_INVALID
        return EXIT_OK
    space = load_space(a.space)
    text = cio.dumps(cio.space_to_dict(space))
    _emit(text, a.out)
    if a.set_out and space.meta.get("kind") == "cantor":
        E = load_set(space, "cantor")
        cio.write_pointset(space, E, a.set_out)
    return EXIT_OK


def _random_input(space, kind, seed, window=None):
    rng = np.random.default_rng(seed)
    if kind == "sequence":
        f = ScaleSequence.zeros(space.n, window)
        f.head[:] = rng.random(f.head.shape)
        return f
    return rng.random(space.n)


def cmd_op(a) -> int:
    space = require_valid(load_space(a.space))
    if a.which in ("H", "L"):
        if a.input:
            f = cio.sequence_from_table(space, Path(a.input).read_text(),
                                        window=cio.scale_window(space))
        else:
            f = _random_input(space, "sequence", a.seed, cio.scale_window(space))
        if a.which == "H":
            v = potential_H(space, f, a.beta, a.q)
        else:
            v = potential_L(space, f, a.beta, PartitionFamily(space, f.window))
        _emit(cio.vector_to_table(space, v, a.which), a.out)
        return EXIT_OK
    if a.input:
        nu = cio.measure_from_table(space, Path(a.input).read_text()).mass
    else:
        nu = _random_input(space, "measure", a.seed)
    if a.which == "riesz":
        v = riesz_I(space, nu, a.beta)
        _emit(cio.vector_to_table(space, v, "riesz"), a.out)
    elif a.which == "maxfrac":
        v = frac_max(space, nu, a.beta)
        _emit(cio.vector_to_table(space, v, "maxfrac"), a.out)
    else:
        qd = 1.0 if a.q is None else a.q
        hd = hdual_sequence(space, nu, a.beta, qd)
        seq = ScaleSequence(hd.head, hd.tail, hd.window)
        _emit(cio.sequence_to_table(space, seq), a.out)
    return EXIT_OK


def cmd_content(a) -> int:
    space = require_valid(load_space(a.space))
    F = load_set(space, a.set)
    params = ContentParams(a.d, a.rho)
    res = content_greedy(space, F, params) if a.greedy else content_exact(space, F, params)
    cover = ", ".join(f"B({c}, {r:.6g})" for c, r in res.cover)
    print(f"content {res.value!r}")
    print(f"exact {str(res.exact).lower()}")
    print(f"cover {cover}")
    if a.out:
        Path(a.out).write_text(cio.dumps({"value": res.value, "exact": res.exact,
                                          "cover": [[c, r] for c, r in res.cover]}))
    return EXIT_OK


def cmd_cap(a) -> int:
    space = require_valid(load_space(a.space))
    if a.kind == "validate":
        cert = cio.read_certificate(space, a.cert)
        chk = validate_certificate(space, cert)
        print(f"residual {chk['residual']!r}")
        print(f"value {chk['value']!r}")
        print(f"dual_value {chk['dual_value']!r}")
        print("ok" if chk["ok"] else "FAILED")
        return EXIT_OK if chk["ok"] else EXIT_INVALID
    E = load_set(space, a.set)
    if a.kind == "riesz":
        cert = cap_riesz(space, E, a.beta, a.p, tol=a.tol)
    else:
        params = CapacityParams(a.beta, a.p, a.q, a.Lambda)
        if a.kind == "tl":
            cert = cap_tl_primal(space, E, params, tol=a.tol)
        elif a.kind == "tl-dual":
            cert = cap_tl_dual(space, E, params, tol=a.tol)
        else:
            if a.center is None or a.r is None:
                raise CliError("relative capacity needs --center and --r")
            c = space.index_of(a.center)
            if not np.all(space.dist[c, E.idx] <= a.r):
                raise CliError("E must lie in the closed ball B̄(center, r)")
            cert = cap_relative(space, E, c, a.r, params, tol=a.tol)
    print(f"value {cert.value:.10g}")
    print(f"dual_value {cert.dual_value:.10g}")
    print(f"gap {cert.rel_gap:.3e}")
    print(f"solver {cert.solver_id} status {cert.status}")
    if a.out:
        cio.write_certificate(space, cert, a.out)
    if not cert.converged:
        print("solver did not reach the tolerance", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _check_opts(a) -> dict:
    opts = {}
    for key in ("beta", "p", "q", "Lambda", "r"):
        v = getattr(a, key, None)
        if v is not None:
            opts[key] = v
    if a.set:
        opts["E"] = [t.strip() for t in a.set.strip("{}").split(",") if t.strip()]
    return opts


def cmd_verify(a) -> int:
    if a.action == "check":
        if a.check_id not in CHECK_IDS:
            raise CliError(f"unknown check {a.check_id!r}; one of {', '.join(CHECK_IDS)}")
        space = load_space(a.space)
        results = [run_check(a.check_id, space, _check_opts(a), a.seed)]
    else:
        suite = default_suite()
        if a.only:
            keep = set(a.only.split(","))
            suite = [s for s in suite if s[0] in keep]
        results = run_suite(suite, seed=a.seed, jobs=a.jobs)
    for r in results:
        print(f"{r.check_id:20s} {r.instance:24s} {r.status:20s} C={r.measured_constant:.4g}")
    doc = cio.dumps(report_dict(results, a.seed))
    if a.out:
        Path(a.out).write_text(doc)
    if a.csv:
        Path(a.csv).write_text(report_csv(results))
    bad = [r for r in results if r.status == "fail"]
    return EXIT_INVALID if bad else EXIT_OK


# --------------------------------------------------------------------------
# Parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capkit", description="Capacities, potentials and contents "
                                 "on finite metric measure spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("space", help="validate or build a space")
    sp.add_argument("action", choices=["validate", "build"])
    sp.add_argument("space", help="file, or two_point | three_chain | grid:DIM:LEVEL | "
                                  "cantor:RATIO:DEPTH[:LEVEL] | fixture:NAME")
    sp.add_argument("-o", "--out")
    sp.add_argument("--set-out", help="for Cantor builds, also write the marked set")
    sp.set_defaults(func=cmd_space)

    def common(p, set_required=False):
        p.add_argument("--space", required=True)
        p.add_argument("--set", required=set_required)
        p.add_argument("-o", "--out")

    op = sub.add_parser("op", help="apply an operator")
    op.add_argument("which", choices=["H", "L", "riesz", "maxfrac", "hdual"])
    common(op)
    op.add_argument("--beta", type=_float, required=True)
    op.add_argument("--q", type=_float, help="inner exponent (H tail) or dual exponent (hdual)")
    op.add_argument("--input", help="sequence table (H, L) or measure table (others)")
    op.add_argument("--seed", type=int, default=0, help="random input when --input is absent")
    op.set_defaults(func=cmd_op)

    ct = sub.add_parser("content", help="restricted Hausdorff content")
    common(ct, set_required=True)
    ct.add_argument("--d", type=_float, required=True, help="codimension")
    ct.add_argument("--rho", type=_float, required=True, help="radius bound")
    ct.add_argument("--greedy", action="store_true", help="greedy upper bound instead of exact")
    ct.set_defaults(func=cmd_content)

    cp = sub.add_parser("cap", help="capacities with certificates")
    cp.add_argument("kind", choices=["tl", "tl-dual", "relative", "riesz", "validate"])
    common(cp)
    cp.add_argument("--beta", type=_float, default=0.5)
    cp.add_argument("--p", type=_float, default=2.0)
    cp.add_argument("--q", type=_float, default=2.0, help="inner exponent; inf allowed")
    cp.add_argument("--Lambda", "--lambda", dest="Lambda", type=_float, default=41.0)
    cp.add_argument("--center", help="relative capacity: center id")
    cp.add_argument("--r", type=_float, help="relative capacity: radius")
    cp.add_argument("--tol", type=_float, help="target relative gap (default: CAPKIT_TOL)")
    cp.add_argument("--cert", help="validate: certificate file to re-check")
    cp.set_defaults(func=cmd_cap)

    vf = sub.add_parser("verify", help="numerical checks")
    vf.add_argument("action", choices=["check", "suite"])
    vf.add_argument("check_id", nargs="?")
    vf.add_argument("--space", default="grid:1:6")
    vf.add_argument("--set")
    vf.add_argument("--beta", type=_float)
    vf.add_argument("--p", type=_float)
    vf.add_argument("--q", type=_float)
    vf.add_argument("--Lambda", "--lambda", dest="Lambda", type=_float)
    vf.add_argument("--r", type=_float)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--jobs", type=int, default=1)
    vf.add_argument("--only", help="comma-separated check ids to keep from the suite")
    vf.add_argument("-o", "--out", help="report file")
    vf.add_argument("--csv", help="CSV export")
    vf.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if getattr(a, "command", None) == "verify" and a.action == "check" and not a.check_id:
        ap.error("verify check needs a check id")
    try:
        return a.func(a)
    except (CliError, SpaceError, CapacityError, cio.FormatError, ContentTooLarge, KeyError,
            ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
