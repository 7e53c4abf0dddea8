"""Conic engine for weighted mixed-norm minimisation under linear constraints.

Solves::

    minimise    Σ_b w_b ‖M_b z‖_q^p
    subject to  G z ≤ h,  A z = b

where every block ``M_b z`` is known to be entrywise nonnegative on the
feasible set (callers add ``z ≥ 0`` rows and use nonnegative ``M``). The
program is written as a cone program and handed to Clarabel. The returned
primal point and multipliers are only raw material: certified bounds are
recomputed from them by the capacity module.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
import os
import time

import clarabel
import numpy as np
from scipy import sparse

DEFAULT_TOL = 1e-6


def default_tolerance() -> float:
    """Target relative gap, overridable through ``CAPKIT_TOL``."""
    raw = os.environ.get("CAPKIT_TOL")
    if raw:
        try:
            val = float(raw)
        except ValueError:
            raise ValueError(f"CAPKIT_TOL must be a number, got {raw!r}") from None
        if not val > 0:
            raise ValueError("CAPKIT_TOL must be positive")
        return val
    return DEFAULT_TOL


@dataclass
class NormProgram:
    """Data of one mixed-norm program.

    Attributes
    ----------
    n_var : int
    coords : sparse matrix, shape (C, n_var)
        All block coordinates stacked; row ``c`` is coordinate ``v_c = M[c] z``.
    block : ndarray of int, shape (C,)
        Block id of each coordinate, nondecreasing.
    weight : ndarray, shape (B,)
    p, q : float
    G, h : inequality rows ``G z ≤ h``
    A, b : equality rows, optional
    """

    n_var: int
    coords: sparse.spmatrix
    block: np.ndarray
    weight: np.ndarray
    p: float
    q: float
    G: sparse.spmatrix
    h: np.ndarray
    A: sparse.spmatrix | None = None
    b: np.ndarray | None = None


@dataclass
class SolveResult:
    z: np.ndarray
    lam: np.ndarray
    lam_eq: np.ndarray
    coord_grad: np.ndarray
    status: str
    converged: bool
    iterations: int
    seconds: float
    objective: float
    solver_id: str


class _Rows:
    """Accumulates COO triplets for one family of constraint rows."""

    def __init__(self):
        self.r, self.c, self.v, self.rhs = [], [], [], []
        self.n = 0

    def add(self, rows, cols, vals, n_new, rhs):
        self.r.append(np.asarray(rows, dtype=np.int64) + self.n)
        self.c.append(np.asarray(cols, dtype=np.int64))
        self.v.append(np.asarray(vals, dtype=float))
        self.rhs.append(np.broadcast_to(np.asarray(rhs, dtype=float), (n_new,)))
        self.n += n_new

    def build(self, n_cols):
        if self.n == 0:
            return sparse.csc_matrix((0, n_cols)), np.zeros(0)
        m = sparse.coo_matrix((np.concatenate(self.v), (np.concatenate(self.r), np.concatenate(self.c))),
                              shape=(self.n, n_cols))
        return m, np.concatenate(self.rhs)


# Interior point runs occasionally stall on badly scaled power-cone programs.
# A stalled solve is repeated with shorter steps, then without equilibration.
RETRY_SETTINGS = ({}, {"max_step_fraction": 0.9}, {"equilibrate_enable": False})


def solve_norm_program(prog: NormProgram, tol: float | None = None, max_iter: int = 400,
                       verbose: bool = False) -> SolveResult:
    """Solve a :class:`NormProgram` with Clarabel.

    Variables past ``z`` are t_b (block ℓ^q sizes), u (epigraph of the
    p-th powers) and r (splitting variables for general q). With p = 2 the
    p-th powers go into the quadratic term instead of cones.
    """
    tol = default_tolerance() if tol is None else tol
    p, q = float(prog.p), float(prog.q)
    m = prog.n_var
    M = sparse.csr_matrix(prog.coords)
    blk = np.asarray(prog.block, dtype=np.int64)
    w = np.asarray(prog.weight, dtype=float)
    nb = w.size
    sizes = np.bincount(blk, minlength=nb)
    quad = p == 2.0

    # coordinates whose p-th power is separable: singleton blocks, or q == p
    percoord = (sizes[blk] == 1) | (q == p)
    pc_idx = np.flatnonzero(percoord)
    grouped_blocks = np.flatnonzero((sizes > 0) & ~((sizes == 1) | (q == p)))

    # variable layout
    nt = grouped_blocks.size
    t_of_block = -np.ones(nb, dtype=np.int64)
    t_of_block[grouped_blocks] = m + np.arange(nt)
    off = m + nt
    if quad:
        nu = 0
        u_pc = u_blk = None
    else:
        u_pc = off + np.arange(pc_idx.size)
        u_blk = off + pc_idx.size + np.arange(nt)
        nu = pc_idx.size + nt
    off += nu
    general_q = (not math.isinf(q)) and q not in (1.0, 2.0) and q != p
    g_coords = np.flatnonzero(~percoord) if general_q else np.zeros(0, dtype=np.int64)
    r_var = off + np.arange(g_coords.size)
    nvar = off + g_coords.size

    # objective
    cvec = np.zeros(nvar)
    Pdiag_r, Pdiag_c, Pdiag_v = [], [], []
    if quad:
        # Σ w_c v_c² for per-coordinate parts: P += 2 Mᵀ W M
        if pc_idx.size:
            Mp = M[pc_idx]
            W = sparse.diags(2.0 * w[blk[pc_idx]])
            Pz = (Mp.T @ W @ Mp).tocoo()
            Pdiag_r.append(Pz.row)
            Pdiag_c.append(Pz.col)
            Pdiag_v.append(Pz.data)
        if nt:
            Pdiag_r.append(t_of_block[grouped_blocks])
            Pdiag_c.append(t_of_block[grouped_blocks])
            Pdiag_v.append(2.0 * w[grouped_blocks])
    else:
        cvec[u_pc] = w[blk[pc_idx]]
        cvec[u_blk] = w[grouped_blocks]
    if Pdiag_r:
        P = sparse.coo_matrix((np.concatenate(Pdiag_v), (np.concatenate(Pdiag_r), np.concatenate(Pdiag_c))),
                              shape=(nvar, nvar)).tocsc()
        P = sparse.triu(P, format="csc")
    else:
        P = sparse.csc_matrix((nvar, nvar))

    Mcoo = M.tocoo()
    # where each coordinate's data sits: family (0 quad, 1 nonneg, 2 soc, 3 pow) and row
    c_fam = np.zeros(M.shape[0], dtype=np.int64)
    c_row = np.zeros(M.shape[0], dtype=np.int64)
    # --- zero cone
    eq = _Rows()
    if prog.A is not None and prog.A.shape[0]:
        Ac = sparse.coo_matrix(prog.A)
        eq.add(Ac.row, Ac.col, Ac.data, Ac.shape[0], prog.b)
    # --- nonnegative cone
    nn = _Rows()
    Gc = sparse.coo_matrix(prog.G)
    nn.add(Gc.row, Gc.col, Gc.data, Gc.shape[0], prog.h)
    n_user_ineq = Gc.shape[0]
    if nt and math.isinf(q):
        sel = ~percoord[Mcoo.row]
        rows_of = -np.ones(M.shape[0], dtype=np.int64)
        gc = np.flatnonzero(~percoord)
        rows_of[gc] = np.arange(gc.size)
        nn.add(rows_of[Mcoo.row[sel]], Mcoo.col[sel], Mcoo.data[sel], gc.size, 0.0)
        nn_t = rows_of[gc] + (nn.n - gc.size)
        c_fam[gc], c_row[gc] = 1, nn_t
        nn.r.append(nn_t)
        nn.c.append(t_of_block[blk[gc]])
        nn.v.append(-np.ones(gc.size))
    elif nt and q == 1.0:
        sel = ~percoord[Mcoo.row]
        brow = np.searchsorted(grouped_blocks, blk[Mcoo.row[sel]])
        nn.add(brow, Mcoo.col[sel], Mcoo.data[sel], nt, 0.0)
        base = nn.n - nt
        nn.r.append(base + np.arange(nt))
        nn.c.append(t_of_block[grouped_blocks])
        nn.v.append(-np.ones(nt))
        gc = np.flatnonzero(~percoord)
        c_fam[gc], c_row[gc] = 1, base + np.searchsorted(grouped_blocks, blk[gc])
    elif nt and general_q:
        brow = np.searchsorted(grouped_blocks, blk[g_coords])
        nn.add(brow, r_var, np.ones(g_coords.size), nt, 0.0)
        base = nn.n - nt
        nn.r.append(base + np.arange(nt))
        nn.c.append(t_of_block[grouped_blocks])
        nn.v.append(-np.ones(nt))

    cones_tail = []
    soc = _Rows()
    if nt and q == 2.0:
        # each grouped block: rows [t; v_1..v_c] with s = -(A x) = (t, v)
        gc = np.flatnonzero(~percoord)
        blocks_sorted = blk[gc]
        pos = np.zeros(M.shape[0], dtype=np.int64)
        starts = np.zeros(nb, dtype=np.int64)
        sz = sizes[grouped_blocks]
        first_row = np.concatenate([[0], np.cumsum(sz + 1)[:-1]])
        starts[grouped_blocks] = first_row
        # rank of coordinate within its block
        rank = np.arange(gc.size) - np.searchsorted(blocks_sorted, blocks_sorted)
        pos[gc] = starts[blocks_sorted] + 1 + rank
        c_fam[gc], c_row[gc] = 2, pos[gc]
        sel = ~percoord[Mcoo.row]
        total = int(np.sum(sz + 1))
        soc.add(pos[Mcoo.row[sel]], Mcoo.col[sel], -Mcoo.data[sel], total, 0.0)
        soc.r.append(first_row)
        soc.c.append(t_of_block[grouped_blocks])
        soc.v.append(-np.ones(nt))
        cones_tail += [clarabel.SecondOrderConeT(int(s + 1)) for s in sz]

    pw = _Rows()
    pw_alphas = []
    if not quad:
        # (u_c, 1, v_c) for per-coordinate parts
        k = pc_idx.size
        if k:
            rows_of = -np.ones(M.shape[0], dtype=np.int64)
            rows_of[pc_idx] = np.arange(k)
            sel = percoord[Mcoo.row]
            rr = 3 * rows_of[Mcoo.row[sel]] + 2
            pw.add(np.concatenate([3 * np.arange(k), rr]),
                   np.concatenate([u_pc, Mcoo.col[sel]]),
                   np.concatenate([-np.ones(k), -Mcoo.data[sel]]),
                   3 * k, np.tile([0.0, 1.0, 0.0], k))
            pw_alphas += [1.0 / p] * k
            c_fam[pc_idx], c_row[pc_idx] = 3, 3 * np.arange(k) + 2
        if nt:
            base = 3 * np.arange(nt)
            pw.add(np.concatenate([base, base + 2]),
                   np.concatenate([u_blk, t_of_block[grouped_blocks]]),
                   -np.ones(2 * nt), 3 * nt, np.tile([0.0, 1.0, 0.0], nt))
            pw_alphas += [1.0 / p] * nt
    if general_q and g_coords.size:
        k = g_coords.size
        rows_of = -np.ones(M.shape[0], dtype=np.int64)
        rows_of[g_coords] = np.arange(k)
        sel = rows_of[Mcoo.row] >= 0
        base = 3 * np.arange(k)
        c_fam[g_coords], c_row[g_coords] = 3, pw.n + base + 2
        pw.add(np.concatenate([base, base + 1, 3 * rows_of[Mcoo.row[sel]] + 2]),
               np.concatenate([r_var, t_of_block[blk[g_coords]], Mcoo.col[sel]]),
               np.concatenate([-np.ones(2 * k), -Mcoo.data[sel]]),
               3 * k, 0.0)
        pw_alphas += [1.0 / q] * k

    parts, rhs, cones = [], [], []
    for rows, cone in ((eq, "zero"), (nn, "nonneg"), (soc, "soc"), (pw, "pow")):
        mat, vec = rows.build(nvar)
        if rows.n == 0:
            continue
        parts.append(mat)
        rhs.append(vec)
        if cone == "zero":
            cones.append(clarabel.ZeroConeT(rows.n))
        elif cone == "nonneg":
            cones.append(clarabel.NonnegativeConeT(rows.n))
        elif cone == "soc":
            cones += cones_tail
        else:
            cones += [clarabel.PowerConeT(a) for a in pw_alphas]
    Afull = sparse.vstack(parts, format="csc")
    bfull = np.concatenate(rhs)

    t0 = time.perf_counter()
    for extra in RETRY_SETTINGS:
        settings = clarabel.DefaultSettings()
        settings.verbose = verbose
        settings.max_iter = max_iter
        settings.tol_gap_rel = min(1e-8, tol * 1e-2)
        settings.tol_gap_abs = min(1e-8, tol * 1e-2)
        settings.tol_feas = 1e-9
        settings.presolve_enable = False
        settings.direct_solve_method = os.environ.get("CAPKIT_LDL", "qdldl")
        for key, val in extra.items():
            setattr(settings, key, val)
        solver = clarabel.DefaultSolver(P, cvec, Afull, bfull, cones, settings)
        sol = solver.solve()
        if str(sol.status) in ("Solved", "AlmostSolved"):
            break
    secs = time.perf_counter() - t0
    x = np.asarray(sol.x)
    zdual = np.asarray(sol.z)
    status = str(sol.status)
    offsets = np.array([0, eq.n, eq.n + nn.n, eq.n + nn.n + soc.n])
    grad = np.abs(zdual[offsets[c_fam] + c_row])
    quad_c = c_fam == 0
    if quad_c.any():
        grad[quad_c] = 2.0 * w[blk[quad_c]] * np.abs(M[quad_c] @ x[:m])
    return SolveResult(z=x[:m], lam=np.maximum(zdual[eq.n:eq.n + n_user_ineq], 0.0),
                       lam_eq=zdual[:eq.n], coord_grad=grad, status=status,
                       converged=status in ("Solved", "AlmostSolved"),
                       iterations=int(sol.iterations), seconds=secs,
                       objective=float(sol.obj_val), solver_id=f"clarabel-{clarabel.__version__}")
