"""Reading and writing spaces, point sets, sequences, measures and certificates.

Spaces, point sets and certificates are JSON documents. Scale sequences and
point measures are tab-separated tables. Every writer is deterministic:
keys are sorted, floats are written with ``repr`` precision and rows follow
the space's listing order, so a write after a read reproduces the bytes.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .capacity import CapacityCertificate, CapacityParams
from .operators import GradientSequence, PointMeasure, ScaleSequence
from .space import (MetricMeasureSpace, PointSet, ScaleWindow, SpaceError, make_space,
                    scale_window)


class FormatError(ValueError):
    """Raised on malformed input documents."""


def _num(x):
    """JSON-safe float: infinities are spelled as strings."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _unnum(x):
    return float(x) if not isinstance(x, str) else float(x.replace("∞", "inf"))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


# spaces ------------------------------------------------------------------

def space_to_dict(space: MetricMeasureSpace) -> dict:
    """Document form of a space.

    Euclidean spaces with coordinates store only the coordinates. Other
    spaces store the lower triangle of the distance matrix, diagonal
    included, as ragged rows, unless the matrix is not symmetric, in which
    case the full square matrix is stored.
    """
    pts = []
    for i, pid in enumerate(space.ids):
        rec = {"id": pid, "mass": float(space.mass[i])}
        if space.coords is not None:
            rec["coords"] = [float(v) for v in space.coords[i]]
        pts.append(rec)
    doc = {"points": pts}
    if space.meta.get("metric") == "euclidean" and space.coords is not None:
        doc["metric"] = "euclidean"
    else:
        doc["metric"] = "explicit"
        D = space.dist
        if np.array_equal(D, D.T):
            doc["matrix"] = [[float(v) for v in D[i, : i + 1]] for i in range(space.n)]
        else:
            doc["matrix"] = [[float(v) for v in row] for row in D]
    meta = {k: v for k, v in space.meta.items() if k != "metric"}
    if meta:
        doc["meta"] = meta
    return doc


def space_from_dict(doc: dict) -> MetricMeasureSpace:
    """Inverse of ``space_to_dict``; no metric validation is performed."""
    try:
        pts = doc["points"]
        ids = [str(p["id"]) for p in pts]
        mass = [float(p["mass"]) for p in pts]
        metric = doc.get("metric", "explicit")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"space document missing field: {exc}") from None
    coords = None
    if pts and all("coords" in p for p in pts):
        coords = np.array([[float(v) for v in p["coords"]] for p in pts])
    meta = dict(doc.get("meta", {}))
    n = len(ids)
    if metric == "euclidean":
        if coords is None:
            raise FormatError("euclidean metric requires coords on every point")
        meta["metric"] = "euclidean"
        return make_space(ids, mass, "euclidean", coords=coords, meta=meta)
    if metric != "explicit":
        raise FormatError(f"unknown metric {metric!r}")
    rows = doc.get("matrix")
    if rows is None:
        raise FormatError("explicit metric requires a matrix")
    D = np.zeros((n, n))
    if len(rows) != n:
        raise FormatError(f"matrix has {len(rows)} rows for {n} points")
    if all(len(r) == n for r in rows):
        D[:] = np.array(rows, dtype=float)
    else:
        for i, row in enumerate(rows):
            if len(row) == i + 1:
                D[i, : i + 1] = row
            elif len(row) == i:
                D[i, :i] = row
            else:
                raise FormatError(f"matrix row {i} has length {len(row)}")
        D = np.tril(D) + np.tril(D, -1).T
    return make_space(ids, mass, D, coords=coords, meta=meta)


def read_space(path) -> MetricMeasureSpace:
    return space_from_dict(_load_json(path))


def write_space(space: MetricMeasureSpace, path) -> None:
    Path(path).write_text(dumps(space_to_dict(space)))


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


# point sets --------------------------------------------------------------

def read_pointset(space: MetricMeasureSpace, path) -> PointSet:
    ids = _load_json(path)
    if not isinstance(ids, list):
        raise FormatError("point set file must hold a list of ids")
    return parse_pointset(space, ids)


def parse_pointset(space: MetricMeasureSpace, ids) -> PointSet:
    try:
        return PointSet.from_ids(space, [str(i) for i in ids])
    except (KeyError, SpaceError) as exc:
        raise FormatError(str(exc.args[0]) if exc.args else "unknown point id") from None


def write_pointset(space: MetricMeasureSpace, E: PointSet, path) -> None:
    Path(path).write_text(dumps(E.ids(space)))


# tables ------------------------------------------------------------------

def sequence_to_table(space: MetricMeasureSpace, seq) -> str:
    """Rows ``scale, point_id, value``; the tail slot uses the scale ``tail``."""
    lines = ["scale\tpoint_id\tvalue"]
    if isinstance(seq, ScaleSequence):
        blocks = [(str(int(n)), seq.row(int(n))) for n in seq.scales] + [("tail", seq.tail)]
    else:
        blocks = [(str(int(k)), seq.values[i]) for i, k in enumerate(seq.scales)]
    for label, row in blocks:
        for i in np.flatnonzero(row):
            lines.append(f"{label}\t{space.ids[i]}\t{float(row[i])!r}")
    return "\n".join(lines) + "\n"


def sequence_from_table(space: MetricMeasureSpace, text: str, window=None):
    """Parse a table into a ScaleSequence (if it has a tail or a window is
    given) or a GradientSequence."""
    rows = _table(text, 3)
    has_tail = any(r[0] == "tail" for r in rows)
    if window is not None or has_tail:
        window = window or scale_window(space)
        seq = ScaleSequence.zeros(space.n, window)
        for s, pid, v in rows:
            i = space.index_of(pid)
            if s == "tail":
                seq.tail[i] = float(v)
            else:
                n = int(s)
                if not window.n0 <= n <= window.n_hi:
                    raise FormatError(f"scale {n} outside window [{window.n0}, {window.n_hi}]")
                seq.head[n - window.n0, i] = float(v)
        return seq
    scales = sorted({int(r[0]) for r in rows})
    vals = np.zeros((len(scales), space.n))
    pos = {k: j for j, k in enumerate(scales)}
    for s, pid, v in rows:
        vals[pos[int(s)], space.index_of(pid)] = float(v)
    return GradientSequence(np.array(scales, dtype=int), vals)


def measure_to_table(space: MetricMeasureSpace, nu: PointMeasure) -> str:
    lines = ["point_id\tmass"]
    for i in np.flatnonzero(nu.mass):
        lines.append(f"{space.ids[i]}\t{float(nu.mass[i])!r}")
    return "\n".join(lines) + "\n"


def measure_from_table(space: MetricMeasureSpace, text: str) -> PointMeasure:
    m = np.zeros(space.n)
    for pid, v in _table(text, 2):
        m[space.index_of(pid)] = float(v)
    return PointMeasure(m)


def vector_to_table(space: MetricMeasureSpace, v, name: str = "value") -> str:
    lines = [f"point_id\t{name}"]
    lines += [f"{pid}\t{float(x)!r}" for pid, x in zip(space.ids, v)]
    return "\n".join(lines) + "\n"


def vector_from_table(space: MetricMeasureSpace, text: str) -> np.ndarray:
    v = np.zeros(space.n)
    for pid, x in _table(text, 2):
        v[space.index_of(pid)] = float(x)
    return v


def _table(text: str, width: int) -> list:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty table")
    out = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split("\t")
        if len(parts) != width:
            raise FormatError(f"line {k}: expected {width} tab-separated fields")
        out.append(parts)
    return out


# certificates --------------------------------------------------------------

def certificate_to_dict(space: MetricMeasureSpace, cert: CapacityCertificate) -> dict:
    """Document form of a certificate, including full primal and dual tables."""
    P = cert.params
    doc = {
        "kind": cert.kind,
        "value": _num(cert.value),
        "dual_value": _num(cert.dual_value),
        "rel_gap": _num(cert.rel_gap),
        "params": {"beta": P.beta, "p": _num(P.p), "q": _num(P.q), "Lambda": _num(P.Lambda)},
        "E": cert.E.ids(space),
        "iterations": int(cert.iterations),
        "solver_id": cert.solver_id,
        "status": cert.status,
        "converged": bool(cert.converged),
        "extra": _jsonable(cert.extra),
        "primal": {},
        "dual": {},
    }
    for key, val in (cert.primal or {}).items():
        doc["primal"][key] = _encode(space, val)
    for key, val in (cert.dual or {}).items():
        doc["dual"][key] = _encode(space, val)
    return doc


def _encode(space, val):
    if isinstance(val, ScaleSequence):
        return {"type": "scale_sequence", "n0": val.window.n0, "n_max": val.window.n_max,
                "extra": val.window.extra, "table": sequence_to_table(space, val)}
    if isinstance(val, GradientSequence):
        return {"type": "gradient_sequence", "table": sequence_to_table(space, val)}
    if isinstance(val, PointMeasure):
        return {"type": "point_measure", "table": measure_to_table(space, val)}
    if isinstance(val, np.ndarray) and val.ndim == 1 and val.size == space.n:
        return {"type": "vector", "table": vector_to_table(space, val)}
    return {"type": "json", "data": _jsonable(val)}


def _decode(space, doc):
    t = doc["type"]
    if t == "scale_sequence":
        w = ScaleWindow(doc["n0"], doc["n_max"], doc["extra"])
        return sequence_from_table(space, doc["table"], window=w)
    if t == "gradient_sequence":
        rows = _table(doc["table"], 3)
        if not rows:
            return GradientSequence(np.zeros(0, dtype=int), np.zeros((0, space.n)))
        return sequence_from_table(space, doc["table"])
    if t == "point_measure":
        return measure_from_table(space, doc["table"])
    if t == "vector":
        return vector_from_table(space, doc["table"])
    return _unjson(doc["data"])


def _jsonable(x):
    if isinstance(x, ScaleWindow):
        return {"__window__": [x.n0, x.n_max, x.extra]}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return {"__array__": [_jsonable(v) for v in x.tolist()]}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _num(x)
    return x


def _unjson(x):
    if isinstance(x, dict):
        if set(x) == {"__window__"}:
            return ScaleWindow(*x["__window__"])
        if set(x) == {"__array__"}:
            return np.array([_unjson(v) for v in x["__array__"]])
        return {k: _unjson(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_unjson(v) for v in x]
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    return x


def certificate_from_dict(space: MetricMeasureSpace, doc: dict) -> CapacityCertificate:
    try:
        P = doc["params"]
        params = CapacityParams(float(P["beta"]), _unnum(P["p"]), _unnum(P["q"]), _unnum(P["Lambda"]))
        return CapacityCertificate(
            kind=doc["kind"], value=_unnum(doc["value"]), dual_value=_unnum(doc["dual_value"]),
            rel_gap=_unnum(doc["rel_gap"]), params=params, E=parse_pointset(space, doc["E"]),
            primal={k: _decode(space, v) for k, v in doc["primal"].items()},
            dual={k: _decode(space, v) for k, v in doc["dual"].items()},
            iterations=int(doc["iterations"]), solver_id=doc["solver_id"], status=doc["status"],
            converged=bool(doc["converged"]), extra=_unjson(doc.get("extra", {})))
    except KeyError as exc:
        raise FormatError(f"certificate missing field {exc}") from None


def write_certificate(space, cert, path) -> None:
    Path(path).write_text(dumps(certificate_to_dict(space, cert)))


def read_certificate(space, path) -> CapacityCertificate:
    return certificate_from_dict(space, _load_json(path))


__all__ = [
    "FormatError", "dumps", "space_to_dict", "space_from_dict", "read_space", "write_space",
    "read_pointset", "parse_pointset", "write_pointset", "sequence_to_table", "sequence_from_table",
    "measure_to_table", "measure_from_table", "vector_to_table", "vector_from_table",
    "certificate_to_dict", "certificate_from_dict", "write_certificate", "read_certificate",
]
