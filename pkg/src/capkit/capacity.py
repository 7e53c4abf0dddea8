"""Capacities as certified convex programs.

Every solver returns a :class:`CapacityCertificate` whose two numbers are
recomputed from the solver output with the operators of this package:

* ``value`` is the objective of an explicitly repaired feasible point, so it
  is an upper bound on the capacity;
* ``dual_value`` is a Lagrangian lower bound built from nonnegative
  multipliers, evaluated in closed form.

Scales finer than the head window are handled by the tail collapse: past
``n_max`` all balls are singletons, so the whole tail of f at a point acts
through one coordinate s(x) with coefficient ``tail_weight(β, t, q)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import sparse

from .conic import NormProgram, default_tolerance, solve_norm_program
from .operators import (GradientSequence, HDual, PointMeasure, ScaleSequence, conjugate,
                        dual_mixed_norm, hajlasz_pair_buckets, hdual_sequence, lq_norm,
                        mixed_norm, potential_H, riesz_kernel, tail_weight)
from .space import MetricMeasureSpace, PointSet, ScaleWindow, as_pointset, scale_window

FEAS_TOL = 1e-8


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class CapacityParams:
    """Exponents and dilation for the capacity programs.

    Parameters
    ----------
    beta : float
        Smoothness, in (0, 1) for the relative capacity and > 0 otherwise.
    p : float
        Outer exponent, > 1.
    q : float
        Inner exponent in [1, ∞].
    Lambda : float
        Dilation of the seminorm ball for the relative capacity, ≥ 2.
    """

    beta: float
    p: float
    q: float = 2.0
    Lambda: float = 41.0

    def __post_init__(self):
        if not self.beta > 0:
            raise CapacityError("beta must be positive")
        if not self.p > 1 or math.isinf(self.p):
            raise CapacityError("p must be a finite number above 1")
        if not self.q >= 1:
            raise CapacityError("q must lie in [1, inf]")
        if not self.Lambda >= 2:
            raise CapacityError("Lambda must be at least 2")


@dataclass
class CapacityCertificate:
    """Primal/dual sandwich for one capacity.

    Attributes
    ----------
    kind : str
        ``tl``, ``tl-dual``, ``relative`` or ``riesz``.
    value : float
        Objective of a feasible point (upper bound).
    dual_value : float
        Lagrangian lower bound.
    rel_gap : float
        ``(value − dual_value)/max(value, ε)``.
    primal : dict
        ``f`` (ScaleSequence), or ``phi`` and ``g``, or ``density``.
    dual : dict
        ``nu`` (PointMeasure) or the pair-row multipliers.
    """

    kind: str
    value: float
    dual_value: float
    rel_gap: float
    params: CapacityParams
    E: PointSet
    primal: dict = field(default_factory=dict)
    dual: dict = field(default_factory=dict)
    iterations: int = 0
    solver_id: str = "none"
    status: str = "trivial"
    converged: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def bounds(self):
        return self.dual_value, self.value


def _gap(value: float, dual: float) -> float:
    return (value - dual) / max(abs(value), 1e-300) if value > 0 else max(0.0, -dual)


def _trivial(kind, params, E, **extra) -> CapacityCertificate:
    return CapacityCertificate(kind, 0.0, 0.0, 0.0, params, E, extra=extra)


# --------------------------------------------------------------------------
# (β, p, q)-capacity through H_β

def _tl_structure(space: MetricMeasureSpace, E: PointSet, beta: float, window: ScaleWindow):
    """Constraint coefficients of H_βf on E and the variables they touch."""
    S, N = window.size, space.n
    rows = []
    for i, n in enumerate(window.scales):
        A = space.dist[E.idx] < 2.0 ** (-n)
        mB = (space.dist < 2.0 ** (-n)) @ space.mass
        rows.append(2.0 ** (-beta * n) * A * (space.mass / mB)[None, :])
    K = np.stack(rows)                      # (S, |E|, N)
    used = np.any(K > 0, axis=1)            # (S, N)
    return K, used


def cap_tl_primal(space: MetricMeasureSpace, E, params: CapacityParams, extra: int = 0,
                  tol: float | None = None, window: ScaleWindow | None = None) -> CapacityCertificate:
    """Cp(E): inf ‖f‖^p over f ≥ 0 with H_βf ≥ 1 on E.

    Parameters
    ----------
    space : MetricMeasureSpace
    E : PointSet or iterable of ids
    params : CapacityParams
    extra : int
        Extra head scales past ``n_max`` (the tail collapse is exact for any
        value; this only moves where the tail starts).
    tol : float, optional
        Target relative gap; defaults to ``CAPKIT_TOL`` or 1e-6.

    Returns
    -------
    CapacityCertificate
        ``dual_value`` is (ν(E)/‖Ȟ_βν‖_{L^{p′}(ℓ^{q′})})^p for the constraint
        multipliers ν.
    """
    E = as_pointset(space, E)
    w = window or scale_window(space, extra)
    if len(E) == 0:
        return _trivial("tl", params, E, window=w)
    beta, p, q = params.beta, params.p, params.q
    S, N = w.size, space.n
    K, used = _tl_structure(space, E, beta, w)
    wt = tail_weight(beta, w.tail_start, q)

    # variables: used head entries, then tails of E
    vs, vy = np.nonzero(used)
    nh = vs.size
    nv = nh + len(E)
    coeff = np.zeros((len(E), nv))
    coeff[:, :nh] = K[vs, :, vy].T
    coeff[np.arange(len(E)), nh + np.arange(len(E))] = wt
    # blocks are points; coordinates sorted by point
    pt = np.concatenate([vy, E.idx])
    order = np.argsort(pt, kind="stable")
    pts, block = np.unique(pt[order], return_inverse=True)
    Mc = sparse.csr_matrix((np.ones(nv), (np.arange(nv), order)), shape=(nv, nv))
    G = sparse.vstack([sparse.csr_matrix(-coeff), -sparse.identity(nv, format="csr")])
    h = np.concatenate([-np.ones(len(E)), np.zeros(nv)])
    prog = NormProgram(nv, Mc, block, space.mass[pts], p, q, G, h)
    res = solve_norm_program(prog, tol=tol)

    f = ScaleSequence.zeros(N, w)
    z = np.maximum(res.z, 0.0)
    f.head[vs, vy] = z[:nh]
    f.tail[E.idx] = z[nh:]
    nu = np.zeros(N)
    nu[E.idx] = res.lam[:len(E)]
    cert = _tl_certificate(space, E, params, w, f, PointMeasure(nu), "tl")
    cert.iterations, cert.solver_id, cert.status = res.iterations, res.solver_id, res.status
    cert.converged = res.converged
    return cert


def tl_lower_bound(space: MetricMeasureSpace, nu: PointMeasure, params: CapacityParams,
                   window: ScaleWindow) -> float:
    """(ν(E)/‖Ȟ_βν‖_{L^{p′}(ℓ^{q′})})^p, a lower bound for Cp(supp ν)."""
    if nu.total <= 0:
        return 0.0
    hd = hdual_sequence(space, nu, params.beta, conjugate(params.q), window)
    norm = mixed_norm(space, hd, conjugate(params.p), conjugate(params.q))
    return (nu.total / norm) ** params.p


def _repair_tl(space, E, params, f: ScaleSequence):
    """Scale f so that min_E H_βf = 1 exactly; returns (f, objective)."""
    Hf = potential_H(space, f, params.beta, params.q)
    m = float(Hf[E.idx].min())
    if not m > 0:
        return f, math.inf
    f = ScaleSequence(f.head / m, f.tail / m, f.window)
    return f, mixed_norm(space, f, params.p, params.q) ** params.p


def _tl_certificate(space, E, params, w, f, nu, kind) -> CapacityCertificate:
    f, value = _repair_tl(space, E, params, f)
    dual = tl_lower_bound(space, nu, params, w)
    return CapacityCertificate(kind, value, dual, _gap(value, dual), params, E,
                               primal={"f": f}, dual={"nu": nu}, extra={"window": w})


def holder_extremal(hd: HDual, p: float, q: float) -> tuple:
    """f with ⟨f, Ȟν⟩ = ‖Ȟν‖^{p′} and ‖f‖ = ‖Ȟν‖^{p′−1} in L^p(ℓ^q).

    Returns head and tail arrays.
    """
    a = hd.coords()
    pd, qd = conjugate(p), conjugate(q)
    Nx = lq_norm(a, qd, axis=0)
    if math.isinf(qd):
        f = np.zeros_like(a)
        top = np.argmax(a, axis=0)
        f[top, np.arange(a.shape[1])] = Nx ** (pd - 1)
    elif qd == 1:
        f = np.broadcast_to(Nx ** (pd - 1), a.shape).copy()
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(Nx > 0, Nx ** (pd - qd), 0.0)
        f = scale[None, :] * a ** (qd - 1)
    return f[:-1], f[-1]


def cap_tl_dual(space: MetricMeasureSpace, E, params: CapacityParams, extra: int = 0,
                tol: float | None = None, window: ScaleWindow | None = None) -> CapacityCertificate:
    """Dual side of Cp(E): minimise ‖Ȟ_βν‖_{L^{p′}(ℓ^{q′})} over probability ν on E.

    The value side comes from the Hölder-extremal sequence of the optimal
    ν, rescaled to be feasible.
    """
    E = as_pointset(space, E)
    w = window or scale_window(space, extra)
    if len(E) == 0:
        return _trivial("tl-dual", params, E, window=w)
    beta, p, q = params.beta, params.p, params.q
    pd, qd = conjugate(p), conjugate(q)
    S, N = w.size, space.n
    m = len(E)
    # Ȟν(x)_n = Σ_e C[n, x, e] ν_e
    blocks = []
    for i, n in enumerate(w.scales):
        A = space.dist[:, E.idx] < 2.0 ** (-n)
        mB = (space.dist < 2.0 ** (-n)) @ space.mass
        blocks.append(2.0 ** (-beta * n) * A / mB[:, None])
    C = np.stack(blocks)                                  # (S, N, m)
    wt = tail_weight(beta, w.tail_start, q)
    rows, cols, vals, blk = [], [], [], []
    slot_x, slot_s = [], []
    r = 0
    weights = []
    for x in range(N):
        sub = C[:, x, :]
        nz = np.flatnonzero(np.any(sub > 0, axis=1))
        tail_here = np.flatnonzero(E.idx == x)
        if nz.size == 0 and tail_here.size == 0:
            continue
        b = len(weights)
        for s in nz:
            cc = np.flatnonzero(sub[s] > 0)
            rows.append(np.full(cc.size, r))
            cols.append(cc)
            vals.append(sub[s, cc])
            blk.append(b)
            slot_x.append(x)
            slot_s.append(s)
            r += 1
        if tail_here.size:
            rows.append(np.array([r]))
            cols.append(tail_here)
            vals.append(np.array([wt / space.mass[x]]))
            blk.append(b)
            slot_x.append(x)
            slot_s.append(S)
            r += 1
        weights.append(space.mass[x])
    Mc = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(r, m))
    G = -sparse.identity(m, format="csr")
    prog = NormProgram(m, Mc, np.asarray(blk), np.asarray(weights), pd, qd, G, np.zeros(m),
                       sparse.csr_matrix(np.ones((1, m))), np.ones(1))
    res = solve_norm_program(prog, tol=tol)
    nu = np.zeros(N)
    nu[E.idx] = np.maximum(res.z, 0.0)
    nu /= nu.sum()
    nu = PointMeasure(nu)
    hd = hdual_sequence(space, nu, beta, qd, w)
    head, tail = holder_extremal(hd, p, q)
    cands = [ScaleSequence(head, tail, w)]
    # the solver's coordinate multipliers give the extremal split when the
    # ℓ^{q′} norm has ties (q′ = ∞) or flat directions (q′ = 1)
    full = np.zeros((S + 1, N))
    sx, ss = np.asarray(slot_x), np.asarray(slot_s)
    full[ss, sx] = res.coord_grad / space.mass[sx]
    if np.any(full > 0):
        cands.append(ScaleSequence(full[:S], full[S], w))
    certs = [_tl_certificate(space, E, params, w, f, nu, "tl-dual") for f in cands]
    cert = min(certs, key=lambda c: c.value)
    cert.iterations, cert.solver_id, cert.status = res.iterations, res.solver_id, res.status
    cert.converged = res.converged
    return cert


# --------------------------------------------------------------------------
# Relative capacity cap(E, 2B, ΛB)

@dataclass
class _RelProgram:
    free: np.ndarray          # indices of free points (φ variables)
    fixed_val: np.ndarray     # φ value per point (nan where free, 0 off 2B)
    gkey_k: np.ndarray        # scale of each g variable
    gkey_x: np.ndarray        # point of each g variable
    # pair rows: sign·(φ_i − φ_j) ≤ d^β (g_a + g_b)
    ri: np.ndarray
    rj: np.ndarray
    sign: np.ndarray
    d_beta: np.ndarray
    ga: np.ndarray
    gb: np.ndarray
    LB: np.ndarray


def _relative_structure(space, E: PointSet, center: int, r: float, params: CapacityParams):
    D = space.dist[center]
    two = D < 2 * r
    LB = np.flatnonzero(D < params.Lambda * r)
    val = np.full(space.n, np.nan)
    val[~two] = 0.0
    val[E.idx] = 1.0
    free = np.flatnonzero(np.isnan(val))
    pb = hajlasz_pair_buckets(space, PointSet(LB))
    vi, vj = val[pb.i], val[pb.j]
    fi, fj = np.isnan(vi), np.isnan(vj)
    both_fixed = ~fi & ~fj
    keep = ~(both_fixed & (vi == vj))
    ri, rj, sg, kk = [], [], [], []
    # both fixed and different: one row with the sign making the lhs +1
    sel = keep & both_fixed
    ri.append(pb.i[sel]); rj.append(pb.j[sel]); sg.append(np.sign(vi[sel] - vj[sel])); kk.append(np.flatnonzero(sel))
    # one side free: only the row that can bind given 0 ≤ φ ≤ 1
    sel = keep & (fi ^ fj)
    fixed_v = np.where(fi, vj, vi)
    # fixed value 1: row 1 − φ_free; fixed value 0: row φ_free − 0
    s_free_minus_fixed = np.where(fixed_v == 1.0, -1.0, 1.0)
    s = np.where(fi, s_free_minus_fixed, -s_free_minus_fixed)
    ri.append(pb.i[sel]); rj.append(pb.j[sel]); sg.append(s[sel]); kk.append(np.flatnonzero(sel))
    # both free: both rows
    sel = keep & fi & fj
    for s0 in (1.0, -1.0):
        ri.append(pb.i[sel]); rj.append(pb.j[sel]); sg.append(np.full(sel.sum(), s0)); kk.append(np.flatnonzero(sel))
    ri, rj, sg, kk = (np.concatenate(a) for a in (ri, rj, sg, kk))
    k = pb.k[kk]
    d_beta = pb.d[kk] ** params.beta
    keys = np.concatenate([k * space.n + ri, k * space.n + rj])
    ukeys, inv = np.unique(keys, return_inverse=True)
    ga, gb = inv[:ri.size], inv[ri.size:]
    gk = np.floor_divide(ukeys, space.n)
    gx = ukeys - gk * space.n
    return _RelProgram(free, val, gk, gx, ri, rj, sg, d_beta, ga, gb, LB)


def cap_relative(space: MetricMeasureSpace, E, center, r: float, params: CapacityParams,
                 tol: float | None = None, symmetry: str | None = "auto") -> CapacityCertificate:
    """cap(E, 2B, ΛB) for B = B(center, r) with the L^p(ℓ^q) seminorm over ΛB.

    φ is fixed to 1 on E and to 0 off 2B and free in [0,1] elsewhere
    (clamping to [0,1] never increases a fractional gradient). Gradient
    variables exist only for (scale, point) slots touched by a pair
    constraint inside ΛB.

    Parameters
    ----------
    symmetry : {"auto", None}
        With "auto", coordinate reflections (and the diagonal swap in 2-D)
        about the center that map ΛB, E and the masses onto themselves are
        detected, and the program is solved over their orbits. By convexity
        the symmetrised optimum is optimal. The certificate is evaluated on
        the full program either way.

    Raises
    ------
    CapacityError
        If E is not inside the closed ball B̄(center, r).
    """
    E = as_pointset(space, E)
    c = space.index_of(center)
    if not r > 0:
        raise CapacityError("radius must be positive")
    if len(E) and space.dist[c, E.idx].max() > r * (1 + 1e-12):
        raise CapacityError("E must lie in the closed ball B̄(center, r)")
    extra = {"center": space.ids[c], "r": r, "Lambda": params.Lambda}
    if len(E) == 0:
        return _trivial("relative", params, E, **extra)
    st = _relative_structure(space, E, c, r, params)
    if st.ri.size == 0:
        # no constraint binds: φ = 1 on 2B, g = 0
        phi = np.where(np.isnan(st.fixed_val), 1.0, st.fixed_val)
        cert = _trivial("relative", params, E, **extra)
        cert.primal = {"phi": phi, "g": GradientSequence([], np.zeros((0, space.n)))}
        return cert
    pmap = np.arange(space.n)
    if symmetry == "auto":
        orb = symmetry_orbits(space, c, st.LB, E)
        if orb is not None:
            pmap = orb
    extra["orbits"] = int(np.unique(pmap[st.LB]).size)

    # reduced variables
    gred_keys = st.gkey_k * space.n + pmap[st.gkey_x]
    ukeys, gmap = np.unique(gred_keys, return_inverse=True)
    ng = ukeys.size
    g_pt = ukeys - np.floor_divide(ukeys, space.n) * space.n
    free_r = np.unique(pmap[st.free])
    nf = free_r.size
    col_of = -np.ones(space.n, dtype=np.int64)
    col_of[free_r] = np.arange(nf)
    # reduced rows, canonical orientation a < b
    a, b = pmap[st.ri], pmap[st.rj]
    ga, gb = gmap[st.ga], gmap[st.gb]
    sg = st.sign.copy()
    swap = a > b
    a, b = np.where(swap, b, a), np.where(swap, a, b)
    ga, gb = np.where(swap, gb, ga), np.where(swap, ga, gb)
    sg = np.where(swap, -sg, sg)
    live = a != b
    dcode = np.unique(st.d_beta, return_inverse=True)[1].ravel()
    key = np.stack([a, b, sg.astype(np.int64), ga, gb, dcode])[:, live]
    ukey, first, row_of_live, counts = np.unique(key, axis=1, return_index=True,
                                                  return_inverse=True, return_counts=True)
    row_of = -np.ones(st.ri.size, dtype=np.int64)
    row_of[live] = row_of_live.ravel()
    src = np.flatnonzero(live)[first]            # a representative full row
    nrow = ukey.shape[1]
    ra, rb, rs, rga, rgb = ukey[:5]
    rd = st.d_beta[src]
    rows, cols, vals = [], [], []
    rhs = np.zeros(nrow)
    ar = np.arange(nrow)
    for idx, sgn in ((ra, rs.astype(float)), (rb, -rs.astype(float))):
        fv = st.fixed_val[idx]
        isfree = np.isnan(fv)
        rows.append(ar[isfree]); cols.append(col_of[idx[isfree]]); vals.append(sgn[isfree])
        rhs[~isfree] -= sgn[~isfree] * fv[~isfree]
    rows += [ar, ar]
    cols += [nf + rga, nf + rgb]
    vals += [-rd, -rd]
    Gp = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                           shape=(nrow, nf + ng))
    box = sparse.vstack([sparse.hstack([sparse.identity(nf), sparse.csr_matrix((nf, ng))]),
                         -sparse.identity(nf + ng)])
    G = sparse.vstack([Gp, box], format="csr")
    h = np.concatenate([rhs, np.ones(nf), np.zeros(nf + ng)])
    orbit_mass = np.bincount(pmap[st.LB], weights=space.mass[st.LB], minlength=space.n)
    order = np.argsort(g_pt, kind="stable")
    pts, block = np.unique(g_pt[order], return_inverse=True)
    Mc = sparse.csr_matrix((np.ones(ng), (np.arange(ng), nf + order)), shape=(ng, nf + ng))
    prog = NormProgram(nf + ng, Mc, block, orbit_mass[pts], params.p, params.q, G, h)
    res = solve_norm_program(prog, tol=tol)

    # lift to the full program and certify there
    phi = st.fixed_val.copy()
    fr = np.clip(res.z[:nf], 0.0, 1.0)
    phi[st.free] = fr[col_of[pmap[st.free]]]
    gv = np.maximum(res.z[nf:], 0.0)[gmap]
    gv = _repair_gradient(phi, gv, st)
    g = _gradient_table(space, st, gv)
    value = mixed_norm(space, g, params.p, params.q, domain=PointSet(st.LB)) ** params.p
    lam_r = res.lam[:nrow]
    lam = np.where(row_of >= 0, lam_r[np.maximum(row_of, 0)] / counts[np.maximum(row_of, 0)], 0.0)
    dual = _relative_lower_bound(space, st, lam, params)
    cert = CapacityCertificate("relative", value, dual, _gap(value, dual), params, E,
                               primal={"phi": phi, "g": g},
                               dual={"rows": _row_table(st, lam)},
                               iterations=res.iterations, solver_id=res.solver_id,
                               status=res.status, converged=res.converged, extra=extra)
    return cert


def _coordinate_symmetries(space: MetricMeasureSpace, c: int) -> list:
    """Candidate point maps: reflections about the center (and a swap in 2-D)."""
    if space.coords is None or space.coords.shape[1] not in (1, 2):
        return []
    X = space.coords
    x0 = X[c]
    lookup = {tuple(row): i for i, row in enumerate(X.tolist())}
    maps = []
    dim = X.shape[1]
    cands = [lambda y, a=a: np.where(np.arange(dim) == a, 2 * x0 - y, y) for a in range(dim)]
    if dim == 2:
        cands.append(lambda y: np.array([x0[0] + y[1] - x0[1], x0[1] + y[0] - x0[0]]))
    for fn in cands:
        img = np.full(space.n, -1, dtype=np.int64)
        for i, row in enumerate(X):
            img[i] = lookup.get(tuple(fn(row).tolist()), -1)
        maps.append(img)
    return maps


def symmetry_orbits(space: MetricMeasureSpace, c: int, LB: np.ndarray, E: PointSet):
    """Orbit representatives under the detected isometries of ΛB, or None.

    A candidate map is kept only if it sends ΛB onto itself, fixes the
    center, preserves masses, E and all distances within ΛB exactly.
    """
    gens = []
    inE = E.mask(space.n)
    sub = space.dist[np.ix_(LB, LB)]
    for img in _coordinate_symmetries(space, c):
        m = img[LB]
        if np.any(m < 0) or img[c] != c:
            continue
        if not np.array_equal(np.sort(m), LB):
            continue
        if not np.array_equal(space.mass[m], space.mass[LB]) or not np.array_equal(inE[m], inE[LB]):
            continue
        if not np.array_equal(space.dist[np.ix_(m, m)], sub):
            continue
        gens.append(img)
    if not gens:
        return None
    rep = np.arange(space.n)
    while True:
        old = rep.copy()
        for img in gens:
            rep[LB] = np.minimum(rep[LB], rep[img[LB]])
        # propagate representative of representative
        rep = rep[rep]
        if np.array_equal(rep, old):
            return rep


def _repair_gradient(phi, gv, st: _RelProgram):
    """Raise g where a pair row is violated so every row holds exactly."""
    lhs = st.sign * (phi[st.ri] - phi[st.rj])
    need = lhs / st.d_beta - (gv[st.ga] + gv[st.gb])
    bad = need > 0
    if bad.any():
        bump = np.zeros_like(gv)
        np.maximum.at(bump, st.ga[bad], need[bad] / 2)
        np.maximum.at(bump, st.gb[bad], need[bad] / 2)
        gv = gv + bump
    return gv


def _gradient_table(space, st: _RelProgram, gv) -> GradientSequence:
    ks = np.unique(st.gkey_k)
    vals = np.zeros((ks.size, space.n))
    vals[np.searchsorted(ks, st.gkey_k), st.gkey_x] = gv
    return GradientSequence(ks, vals)


def _row_table(st: _RelProgram, lam) -> dict:
    return {"i": st.ri, "j": st.rj, "sign": st.sign, "k": st.gkey_k[st.ga], "lam": lam}


def _relative_lower_bound(space, st: _RelProgram, lam, params: CapacityParams) -> float:
    """(S/D)^p from multipliers λ ≥ 0 on the pair rows.

    Summing λ·(row) gives a linear form in φ bounded above by ⟨g, T⟩ with
    T the λ-weighted d^β loads. Minimising the φ side over the box gives S,
    Hölder on the g side gives ‖g‖·D with D the dual mixed norm of T.
    """
    lam = np.maximum(lam, 0.0)
    const = 0.0
    coef = np.zeros(space.n)
    for idx, sgn in ((st.ri, st.sign), (st.rj, -st.sign)):
        fv = st.fixed_val[idx]
        isfree = np.isnan(fv)
        const += float(np.sum(lam[~isfree] * sgn[~isfree] * fv[~isfree]))
        np.add.at(coef, idx[isfree], lam[isfree] * sgn[isfree])
    S = const + float(np.minimum(coef[st.free], 0.0).sum())
    if not S > 0:
        return 0.0
    load = np.zeros(st.gkey_k.size)
    np.add.at(load, st.ga, lam * st.d_beta)
    np.add.at(load, st.gb, lam * st.d_beta)
    T = _gradient_table(space, st, load).values
    D = dual_mixed_norm(space, T, params.p, params.q)
    return (S / D) ** params.p if D > 0 else math.inf


def pair_constraint_residual(space: MetricMeasureSpace, phi, g: GradientSequence, beta: float,
                             E: PointSet, center: int, r: float, Lambda: float) -> float:
    """Largest violation of the admissibility conditions of (φ, g)."""
    D = space.dist[center]
    LB = PointSet(np.flatnonzero(D < Lambda * r))
    pb = hajlasz_pair_buckets(space, LB)
    phi = np.asarray(phi, dtype=float)
    res = 0.0
    if len(E):
        res = max(res, float(np.max(1.0 - phi[E.idx])))
    off = D >= 2 * r
    if off.any():
        res = max(res, float(np.abs(phi[off]).max()))
    if len(pb):
        gk = np.array([g.get(int(k)) for k in np.unique(pb.k)])
        rk = np.searchsorted(np.unique(pb.k), pb.k)
        lhs = np.abs(phi[pb.i] - phi[pb.j])
        rhs = pb.d ** beta * (gk[rk, pb.i] + gk[rk, pb.j])
        res = max(res, float(np.max(lhs - rhs)))
    if g.values.size:
        res = max(res, float(-g.values.min()))
    return max(res, 0.0)


# --------------------------------------------------------------------------
# Riesz capacity

def cap_riesz(space: MetricMeasureSpace, E, beta: float, p: float, tol: float | None = None,
              kernel: np.ndarray | None = None) -> CapacityCertificate:
    """R_{β,p}(E): inf ‖f‖_{L^p}^p over f ≥ 0 with I_βf ≥ 1 on E.

    The lower bound uses multipliers λ on E: for feasible f,
    λ(E) ≤ ⟨f, J⟩ with J(y) = μ_y Σ_x λ_x k(x,y), hence
    R ≥ (λ(E)/‖J/μ‖_{L^{p′}})^p.
    """
    params = CapacityParams(beta, p, 1.0)
    E = as_pointset(space, E)
    if len(E) == 0:
        return _trivial("riesz", params, E)
    K = riesz_kernel(space, beta) if kernel is None else kernel
    coef = K[E.idx] * space.mass[None, :]
    used = np.flatnonzero(np.any(coef > 0, axis=0))
    if used.size == 0:
        raise CapacityError("E cannot be charged: the space has a single point")
    nv = used.size
    Mc = sparse.identity(nv, format="csr")
    G = sparse.vstack([sparse.csr_matrix(-coef[:, used]), -sparse.identity(nv)], format="csr")
    h = np.concatenate([-np.ones(len(E)), np.zeros(nv)])
    prog = NormProgram(nv, Mc, np.arange(nv), space.mass[used], p, 1.0, G, h)
    res = solve_norm_program(prog, tol=tol)
    f = np.zeros(space.n)
    f[used] = np.maximum(res.z, 0.0)
    If = coef @ f
    m = float(If.min())
    f = f / m if m > 0 else f
    value = float(np.sum(space.mass * f ** p)) if m > 0 else math.inf
    lam = np.zeros(space.n)
    lam[E.idx] = res.lam[:len(E)]
    dual = riesz_lower_bound(space, E, lam, beta, p, K)
    return CapacityCertificate("riesz", value, dual, _gap(value, dual), params, E,
                               primal={"density": f}, dual={"nu": PointMeasure(lam)},
                               iterations=res.iterations, solver_id=res.solver_id,
                               status=res.status, converged=res.converged)


def riesz_lower_bound(space, E: PointSet, lam, beta: float, p: float, kernel=None) -> float:
    lam = np.maximum(np.asarray(lam, dtype=float), 0.0)
    if lam.sum() <= 0:
        return 0.0
    K = riesz_kernel(space, beta) if kernel is None else kernel
    J = (lam @ K) * space.mass
    D = dual_mixed_norm(space, J, p, 1.0)
    return (lam.sum() / D) ** p if D > 0 else math.inf


# --------------------------------------------------------------------------
# Certificate re-validation

def validate_certificate(space: MetricMeasureSpace, cert: CapacityCertificate) -> dict:
    """Recompute residuals and both bounds from stored tables, no solver.

    Returns
    -------
    dict
        ``residual`` (max constraint violation), ``value`` and ``dual_value``
        recomputed, and ``ok``.
    """
    pr = cert.params
    out = {"residual": 0.0, "value": 0.0, "dual_value": 0.0}
    E = cert.E
    if cert.kind in ("tl", "tl-dual"):
        if "f" not in cert.primal:
            return {**out, "ok": cert.value == 0.0}
        f = cert.primal["f"]
        Hf = potential_H(space, f, pr.beta, pr.q)
        out["residual"] = max(0.0, float(np.max(1.0 - Hf[E.idx])), -f.min())
        out["value"] = mixed_norm(space, f, pr.p, pr.q) ** pr.p
        out["dual_value"] = tl_lower_bound(space, cert.dual["nu"], pr, f.window)
    elif cert.kind == "relative":
        if "phi" not in cert.primal:
            return {**out, "ok": cert.value == 0.0}
        c = space.index_of(cert.extra["center"])
        r, Lam = cert.extra["r"], cert.extra["Lambda"]
        out["residual"] = pair_constraint_residual(space, cert.primal["phi"], cert.primal["g"],
                                                   pr.beta, E, c, r, Lam)
        LB = PointSet(np.flatnonzero(space.dist[c] < Lam * r))
        out["value"] = mixed_norm(space, cert.primal["g"], pr.p, pr.q, domain=LB) ** pr.p
        if "rows" in cert.dual:
            st = _relative_structure(space, E, c, r, CapacityParams(pr.beta, pr.p, pr.q, Lam))
            out["dual_value"] = _relative_lower_bound(space, st, np.asarray(cert.dual["rows"]["lam"]), pr)
    elif cert.kind == "riesz":
        if "density" not in cert.primal:
            return {**out, "ok": cert.value == 0.0}
        f = np.asarray(cert.primal["density"])
        K = riesz_kernel(space, pr.beta)
        If = (K * space.mass[None, :]) @ f
        out["residual"] = max(0.0, float(np.max(1.0 - If[E.idx])), float(-f.min()))
        out["value"] = float(np.sum(space.mass * f ** pr.p))
        out["dual_value"] = riesz_lower_bound(space, E, cert.dual["nu"].mass, pr.beta, pr.p, K)
    else:
        raise CapacityError(f"unknown certificate kind {cert.kind!r}")
    scale = max(abs(cert.value), 1e-300)
    out["ok"] = (out["residual"] <= FEAS_TOL
                 and abs(out["value"] - cert.value) <= 1e-9 * scale
                 and abs(out["dual_value"] - cert.dual_value) <= 1e-9 * max(scale, abs(cert.dual_value))
                 and out["dual_value"] <= out["value"] * (1 + 1e-9))
    return out
