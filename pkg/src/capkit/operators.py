"""Potentials, maximal functions, mixed norms and fractional gradients.

Scale sequences are stored as dense ``(S, N)`` arrays over a
:class:`~capkit.space.ScaleWindow`, plus one tail coordinate per point that
stands for all scales past the window. On those scales every ball is a
singleton, which is what makes the one-coordinate tail exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy import sparse

from .space import MetricMeasureSpace, PointSet, ScaleWindow, as_pointset, scale_window

EXACT_RTOL = 1e-9


def conjugate(p: float) -> float:
    """Hölder conjugate with p′=∞ for p=1 and p′=1 for p=∞."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lq_norm(v: np.ndarray, q: float, axis: int = 0) -> np.ndarray:
    """ℓ^q norm of |v| along an axis, q in [1, ∞]."""
    a = np.abs(v)
    if math.isinf(q):
        return a.max(axis=axis) if a.shape[axis] else np.zeros(np.delete(a.shape, axis))
    if q == 1:
        return a.sum(axis=axis)
    # scale by the max to avoid under/overflow
    m = a.max(axis=axis, keepdims=True) if a.shape[axis] else None
    if m is None:
        return np.zeros(np.delete(a.shape, axis))
    safe = np.where(m > 0, m, 1.0)
    s = ((a / safe) ** q).sum(axis=axis) ** (1.0 / q)
    return s * np.squeeze(safe, axis=axis) * (np.squeeze(m, axis=axis) > 0)


def tail_weight(beta: float, tail_start: int, q: float) -> float:
    """(Σ_{n ≥ tail_start} 2^{-β q′ n})^{1/q′} with the q′ = ∞ case as a max."""
    qd = conjugate(q)
    head = 2.0 ** (-beta * tail_start)
    if math.isinf(qd):
        return head
    return head * (1.0 - 2.0 ** (-beta * qd)) ** (-1.0 / qd)


# --------------------------------------------------------------------------
# Sequence containers

@dataclass
class ScaleSequence:
    """Nonnegative f = (f_n) on the head window plus one tail slot per point.

    Attributes
    ----------
    head : ndarray, shape (S, N)
        Row ``i`` holds scale ``window.n0 + i``.
    tail : ndarray, shape (N,)
        Collapsed mass of the scales past the window (ℓ^q size of the tail
        profile).
    window : ScaleWindow
    """

    head: np.ndarray
    tail: np.ndarray
    window: ScaleWindow

    def __post_init__(self):
        self.head = np.asarray(self.head, dtype=float)
        self.tail = np.asarray(self.tail, dtype=float)
        if self.head.shape[0] != self.window.size:
            raise ValueError("head rows do not match the scale window")
        if self.tail.shape != (self.head.shape[1],):
            raise ValueError("tail length does not match the number of points")

    @classmethod
    def zeros(cls, n_points: int, window: ScaleWindow) -> "ScaleSequence":
        return cls(np.zeros((window.size, n_points)), np.zeros(n_points), window)

    @property
    def scales(self) -> np.ndarray:
        return self.window.scales

    def row(self, n: int) -> np.ndarray:
        return self.head[n - self.window.n0]

    def coords(self) -> np.ndarray:
        """All ℓ^q coordinates, head rows followed by the tail row."""
        return np.vstack([self.head, self.tail[None, :]])

    def min(self) -> float:
        return float(min(self.head.min(initial=0.0), self.tail.min(initial=0.0)))


@dataclass
class GradientSequence:
    """Sparse-over-scales table g_k(x).

    Attributes
    ----------
    scales : ndarray of int, shape (K,)
    values : ndarray, shape (K, N)
    """

    scales: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.scales = np.asarray(self.scales, dtype=int)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.scales.size:
            raise ValueError("values must have one row per scale")

    def get(self, k: int) -> np.ndarray:
        hit = np.flatnonzero(self.scales == k)
        if hit.size:
            return self.values[hit[0]]
        return np.zeros(self.values.shape[1])

    def coords(self) -> np.ndarray:
        return self.values


@dataclass
class PointMeasure:
    """Nonnegative measure ν on the points, stored as a full mass vector."""

    mass: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        if np.any(self.mass < 0):
            raise ValueError("measure masses must be nonnegative")

    @classmethod
    def delta(cls, space: MetricMeasureSpace, point, weight: float = 1.0) -> "PointMeasure":
        m = np.zeros(space.n)
        m[space.index_of(point)] = weight
        return cls(m)

    @property
    def support(self) -> PointSet:
        return PointSet(np.flatnonzero(self.mass > 0))

    @property
    def total(self) -> float:
        return float(self.mass.sum())


def _measure_vector(space: MetricMeasureSpace, nu) -> np.ndarray:
    if isinstance(nu, PointMeasure):
        v = nu.mass
    else:
        v = np.asarray(nu, dtype=float)
    if v.shape != (space.n,):
        raise ValueError("measure must have one entry per point")
    return v


# --------------------------------------------------------------------------
# Norms

def mixed_norm(space: MetricMeasureSpace, seq, p: float, q: float, domain=None) -> float:
    """L^p(domain; ℓ^q) norm of a scale-indexed sequence.

    Parameters
    ----------
    space : MetricMeasureSpace
    seq : ScaleSequence, GradientSequence or ndarray of shape (C, N)
        For a ScaleSequence the tail slot counts as one extra coordinate.
    p : float
        Outer exponent, p > 1 (``inf`` allowed).
    q : float
        Inner exponent in [1, ∞].
    domain : PointSet or iterable, optional
        Defaults to the whole space.
    """
    if not p > 1:
        raise ValueError("outer exponent p must exceed 1")
    if not q >= 1:
        raise ValueError("inner exponent q must be at least 1")
    v = seq.coords() if hasattr(seq, "coords") else np.asarray(seq, dtype=float)
    if v.ndim == 1:
        v = v[None, :]
    idx = np.arange(space.n) if domain is None else as_pointset(space, domain).idx
    inner = lq_norm(v[:, idx], q, axis=0) if v.shape[0] else np.zeros(idx.size)
    if math.isinf(p):
        return float(inner.max(initial=0.0))
    return float(np.sum(space.mass[idx] * inner ** p) ** (1.0 / p))


def dual_mixed_norm(space: MetricMeasureSpace, h: np.ndarray, p: float, q: float) -> float:
    """Norm of the functional g ↦ Σ_{x,c} g_c(x) h_c(x) on L^p(ℓ^q).

    Equals ``mixed_norm(h / μ, p′, q′)`` written out, with h restricted to its
    positive part (the functionals we pair with act on g ≥ 0).
    """
    h = np.maximum(np.asarray(h, dtype=float), 0.0)
    if h.ndim == 1:
        h = h[None, :]
    inner = lq_norm(h / space.mass[None, :], conjugate(q), axis=0)
    pd = conjugate(p)
    if math.isinf(pd):
        return float(inner.max(initial=0.0))
    return float(np.sum(space.mass * inner ** pd) ** (1.0 / pd))


# --------------------------------------------------------------------------
# Maximal functions

def max_noncentered(space: MetricMeasureSpace, f) -> np.ndarray:
    """Noncentered maximal function M*f(x) = max over balls ∋ x of ⨍|f|.

    Every ball is a prefix of the distance order around its center (ties
    grouped), so for each center the averages at group ends are scanned
    with a suffix maximum.
    """
    f = np.abs(np.asarray(f, dtype=float))
    sd, order, cm = space.sorted_dist
    cs = np.cumsum((f * space.mass)[order], axis=1)
    n = space.n
    out = np.zeros(n)
    for c in range(n):
        ge = np.searchsorted(sd[c], sd[c], side="right") - 1
        avg = cs[c][ge] / cm[c][ge]
        suf = np.maximum.accumulate(avg[::-1])[::-1]
        vals = np.empty(n)
        vals[order[c]] = suf
        np.maximum(out, vals, out=out)
    return out


def frac_max(space: MetricMeasureSpace, nu, beta: float, window: ScaleWindow | None = None) -> np.ndarray:
    """Fractional maximal function M_βν(x) = max_{0<r≤2^{-n0}} r^β ν(B)/μ(B).

    Candidate radii are the distances from x and 2^{-n0}; on each constancy
    interval of the ball the factor r^β is largest at the right end.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    v = _measure_vector(space, nu)
    w = window or scale_window(space)
    rmax = 2.0 ** (-w.n0)
    sd, order, cm = space.sorted_dist
    cn = np.cumsum(v[order], axis=1)
    out = np.empty(space.n)
    full = rmax ** beta * v.sum() / space.total_mass
    for x in range(space.n):
        d = sd[x]
        gs = np.searchsorted(d, d, side="left")
        ok = (d > 0) & (d <= rmax)
        k = gs[ok] - 1
        vals = d[ok] ** beta * cn[x][k] / cm[x][k]
        out[x] = max(full, vals.max(initial=0.0))
    return out


def dyadic_frac_max(space: MetricMeasureSpace, nu, beta: float, window: ScaleWindow | None = None) -> np.ndarray:
    """sup_{n ≥ n0} 2^{-βn} ν(B(x,2^{-n}))/μ(B(x,2^{-n})), tail included.

    Past the window the ball is {x} and the sup over the tail is attained
    at its first scale.
    """
    v = _measure_vector(space, nu)
    w = window or scale_window(space)
    out = np.zeros(space.n)
    for n in w.scales:
        A = space.dist < 2.0 ** (-n)
        out = np.maximum(out, 2.0 ** (-beta * n) * (A @ v) / (A @ space.mass))
    tail = 2.0 ** (-beta * w.tail_start) * v / space.mass
    return np.maximum(out, tail)


# --------------------------------------------------------------------------
# Potentials

def _ball_data(space: MetricMeasureSpace, n: int):
    A = space.dist < 2.0 ** (-n)
    return A, A @ space.mass


def potential_H(space: MetricMeasureSpace, f: ScaleSequence, beta: float, q: float | None = None) -> np.ndarray:
    """H_βf(x) = Σ_n 2^{-βn} Σ_y 1[d(x,y)<2^{-n}] μ_y f_n(y)/μ(B(y,2^{-n})).

    The head is summed exactly. A nonzero tail needs ``q``; it then adds
    ``tail_weight(β, tail_start, q)·tail(x)``, the largest contribution any
    tail profile of ℓ^q size tail(x) can make.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    out = np.zeros(space.n)
    for i, n in enumerate(f.scales):
        fn = f.head[i]
        if not np.any(fn):
            continue
        A, mB = _ball_data(space, n)
        out += 2.0 ** (-beta * n) * (A @ (space.mass * fn / mB))
    if np.any(f.tail):
        if q is None:
            raise ValueError("a nonzero tail needs the inner exponent q")
        out += tail_weight(beta, f.window.tail_start, q) * f.tail
    return out


def H_matrices(space: MetricMeasureSpace, window: ScaleWindow, beta: float, rows=None) -> np.ndarray:
    """Kernel blocks K[s, x, y] with H_βf(x) = Σ_s K[s] @ f_s (head only)."""
    rows = np.arange(space.n) if rows is None else np.asarray(rows, dtype=int)
    K = np.empty((window.size, rows.size, space.n))
    for i, n in enumerate(window.scales):
        A, mB = _ball_data(space, n)
        K[i] = 2.0 ** (-beta * n) * A[rows] * (space.mass / mB)[None, :]
    return K


@dataclass
class HDual:
    """Ȟ_βν as head values and one exact ℓ^{q′} tail coordinate per point."""

    head: np.ndarray
    tail: np.ndarray
    window: ScaleWindow
    q_dual: float

    def coords(self) -> np.ndarray:
        return np.vstack([self.head, self.tail[None, :]])

    def pointwise_norm(self) -> np.ndarray:
        return lq_norm(self.coords(), self.q_dual, axis=0)


def hdual_sequence(space: MetricMeasureSpace, nu, beta: float, q_dual: float,
                   window: ScaleWindow | None = None) -> HDual:
    """Ȟ_βν(x)_n = 2^{-βn} ν(B(x,2^{-n}))/μ(B(x,2^{-n})) with folded tail.

    The tail coordinate is the ℓ^{q′} norm of the scales past the window,
    where the ball is {x}: (ν_x/μ_x)·(Σ_{n≥t} 2^{-βq′n})^{1/q′}.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    v = _measure_vector(space, nu)
    w = window or scale_window(space)
    head = np.empty((w.size, space.n))
    for i, n in enumerate(w.scales):
        A, mB = _ball_data(space, n)
        head[i] = 2.0 ** (-beta * n) * (A @ v) / mB
    q = conjugate(q_dual)
    tail = tail_weight(beta, w.tail_start, q) * v / space.mass
    return HDual(head, tail, w, q_dual)


def riesz_kernel(space: MetricMeasureSpace, beta: float) -> np.ndarray:
    """k(x,y) = d(x,y)^β/μ(B(x,d(x,y))) for y ≠ x, zero on the diagonal."""
    sd, order, cm = space.sorted_dist
    n = space.n
    K = np.zeros((n, n))
    for x in range(n):
        d = sd[x]
        gs = np.searchsorted(d, d, side="left")
        row = np.zeros(n)
        ok = d > 0
        row[ok] = d[ok] ** beta / cm[x][gs[ok] - 1]
        K[x, order[x]] = row
    return K


def riesz_I(space: MetricMeasureSpace, nu, beta: float, density: bool = False,
            kernel: np.ndarray | None = None) -> np.ndarray:
    """Riesz potential I_βν(x) = Σ_{y≠x} d(x,y)^β ν({y})/μ(B(x,d(x,y))).

    With ``density=True`` the input is a function f and ν({y}) = f(y)μ_y.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    v = _measure_vector(space, nu)
    if density:
        v = v * space.mass
    K = riesz_kernel(space, beta) if kernel is None else kernel
    return K @ v


# --------------------------------------------------------------------------
# Partition of unity and the discrete potential

@dataclass
class PartitionOfUnity:
    """Lipschitz partition of unity at scale n.

    Attributes
    ----------
    n : int
    centers : ndarray of int
    psi : scipy.sparse.csr_matrix, shape (C, N)
    """

    n: int
    centers: np.ndarray
    psi: sparse.csr_matrix
    space: MetricMeasureSpace = field(repr=False)

    @cached_property
    def kappa(self) -> float:
        """min of ψ_i over B(x_i, 3·2^{-n})."""
        D = self.space.dist[self.centers]
        inner = D < 3 * 2.0 ** (-self.n)
        P = self.psi.toarray() if self.psi.shape[0] * self.psi.shape[1] <= 4e7 else None
        if P is not None:
            return float(P[inner].min())
        best = 1.0
        for i in range(self.centers.size):
            row = self.psi.getrow(i).toarray().ravel()
            best = min(best, float(row[inner[i]].min()))
        return best

    @cached_property
    def N_overlap(self) -> int:
        D = self.space.dist[self.centers]
        return int((D < 6 * 2.0 ** (-self.n)).sum(axis=0).max())

    @cached_property
    def L_pou(self) -> float:
        """Smallest L with |ψ_i(x)−ψ_i(y)| ≤ 2^n L d(x,y) over all pairs and i.

        Pairs at distance ≥ c·2^{-n} have ratio at most 1/c, so they are
        scanned only if the near pairs give a smaller value.
        """
        sp = self.space
        h = 2.0 ** (-self.n)
        c = 64.0

        def scan(limit):
            best = 0.0
            for i in range(self.centers.size):
                row = self.psi.getrow(i)
                supp = row.indices
                vals = np.zeros(sp.n)
                vals[supp] = row.data
                cols = np.flatnonzero(sp.dist[self.centers[i]] < 6 * h + limit)
                sub = sp.dist[np.ix_(supp, cols)]
                diff = np.abs(vals[supp][:, None] - vals[cols][None, :])
                ok = (sub > 0) & (sub < limit)
                if ok.any():
                    best = max(best, float((diff[ok] / sub[ok]).max()) * h)
            return best

        near = scan(c * h)
        if near >= 1.0 / c:
            return near
        return scan(np.inf)


def partition_of_unity(space: MetricMeasureSpace, n: int) -> PartitionOfUnity:
    """Partition of unity subordinate to the cover {B(x_i, 2^{-n})}.

    Centers are picked greedily in listing order, keeping a point when it is
    at distance ≥ 2^{-n} from every center so far. The balls B(x_i, 2^{-n-1})
    are then disjoint and, by maximality, the balls B(x_i, 2^{-n}) cover.
    Bumps are θ_i = clamp((6·2^{-n} − d(·,x_i))/(3·2^{-n}), 0, 1) and
    ψ_i = θ_i / Σ_j θ_j.
    """
    h = 2.0 ** (-n)
    D = space.dist
    chosen = []
    free = np.ones(space.n, dtype=bool)
    for x in range(space.n):
        if free[x]:
            chosen.append(x)
            free &= D[x] >= h
    centers = np.asarray(chosen, dtype=int)
    theta = np.clip((6 * h - D[centers]) / (3 * h), 0.0, 1.0)
    psi = theta / theta.sum(axis=0, keepdims=True)
    return PartitionOfUnity(n, centers, sparse.csr_matrix(psi), space)


class PartitionFamily:
    """Partitions of unity for every scale of a window, built lazily."""

    def __init__(self, space: MetricMeasureSpace, window: ScaleWindow | None = None):
        self.space = space
        self.window = window or scale_window(space)
        self._cache = {}

    def __getitem__(self, n: int) -> PartitionOfUnity:
        if n not in self._cache:
            self._cache[n] = partition_of_unity(self.space, int(n))
        return self._cache[n]

    def constants(self) -> dict:
        """kappa (min), L_pou and N_overlap (max) across the window."""
        pous = [self[n] for n in self.window.scales]
        return {"kappa": min(u.kappa for u in pous),
                "L_pou": max(u.L_pou for u in pous),
                "N_overlap": max(u.N_overlap for u in pous)}


def pou_constants(space: MetricMeasureSpace, stats, window: ScaleWindow | None = None):
    """Fill kappa, L_pou and N_overlap of a SpaceStats in place."""
    c = PartitionFamily(space, window).constants()
    stats.kappa, stats.L_pou, stats.N_overlap = c["kappa"], c["L_pou"], c["N_overlap"]
    return stats


def potential_L(space: MetricMeasureSpace, f: ScaleSequence, beta: float,
                family: PartitionFamily | None = None, q: float | None = None) -> np.ndarray:
    """Discrete potential L_βf(x) = Σ_n 2^{-βn} Σ_i ψ_{n,i}(x) ⨍_{B(x_i,3·2^{-n})} f_n.

    Only head scales are summed; a nonzero tail is rejected. Widen the
    window instead to include finer scales.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if np.any(f.tail):
        raise ValueError("the discrete potential takes head scales only; widen the window")
    fam = family or PartitionFamily(space, f.window)
    out = np.zeros(space.n)
    for i, n in enumerate(f.scales):
        fn = f.head[i]
        if not np.any(fn):
            continue
        pou = fam[n]
        B3 = space.dist[pou.centers] < 3 * 2.0 ** (-n)
        avg = (B3 @ (space.mass * fn)) / (B3 @ space.mass)
        out += 2.0 ** (-beta * n) * (pou.psi.T @ avg)
    return out


# --------------------------------------------------------------------------
# Fractional Hajłasz gradients

def scale_of_distance(d) -> np.ndarray:
    """Bucket k with 2^{-k-1} ≤ d < 2^{-k}, computed exactly via frexp."""
    _, e = np.frexp(np.asarray(d, dtype=float))
    return -e


@dataclass
class PairBuckets:
    """Unordered pairs (i < j) of a point set with their dyadic bucket."""

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray
    d: np.ndarray

    @property
    def scales(self) -> np.ndarray:
        return np.unique(self.k)

    def bucket(self, k: int):
        sel = self.k == k
        return list(zip(self.i[sel].tolist(), self.j[sel].tolist()))

    def as_dict(self) -> dict:
        return {int(k): self.bucket(k) for k in self.scales}

    def __len__(self) -> int:
        return self.i.size


def hajlasz_pair_buckets(space: MetricMeasureSpace, omega=None) -> PairBuckets:
    """Bucket every unordered pair of distinct points of ``omega``."""
    idx = np.arange(space.n) if omega is None else as_pointset(space, omega).idx
    a, b = np.triu_indices(idx.size, 1)
    I, J = idx[a], idx[b]
    d = space.dist[I, J]
    return PairBuckets(I, J, scale_of_distance(d), d)


def is_fractional_gradient(space: MetricMeasureSpace, u, g: GradientSequence, beta: float,
                           omega=None, tol: float = 1e-12, buckets: PairBuckets | None = None):
    """Check |u(x)−u(y)| ≤ d^β (g_k(x) + g_k(y)) on every bucketed pair.

    Returns
    -------
    ok : bool
    violation : tuple or None
        ``(id_x, id_y, k, lhs, rhs)`` for the worst violating pair.
    """
    u = np.asarray(u, dtype=float)
    pb = buckets if buckets is not None else hajlasz_pair_buckets(space, omega)
    if len(pb) == 0:
        return True, None
    rows = {int(k): r for r, k in enumerate(g.scales)}
    G = np.vstack([g.values, np.zeros((1, space.n))])
    r = np.array([rows.get(int(k), len(rows)) for k in pb.k]) if len(rows) else np.zeros(len(pb), int)
    lhs = np.abs(u[pb.i] - u[pb.j])
    rhs = pb.d ** beta * (G[r, pb.i] + G[r, pb.j])
    excess = lhs - rhs - tol * np.maximum(1.0, rhs)
    worst = int(np.argmax(excess))
    if excess[worst] > 0:
        return False, (space.ids[pb.i[worst]], space.ids[pb.j[worst]], int(pb.k[worst]),
                       float(lhs[worst]), float(rhs[worst]))
    return True, None


def canonical_gradient(space: MetricMeasureSpace, u, beta: float, omega=None,
                       buckets: PairBuckets | None = None) -> GradientSequence:
    """A valid fractional gradient: g_k(x) = ½ max_{y} |u(x)−u(y)|/d^β over bucket k."""
    u = np.asarray(u, dtype=float)
    pb = buckets if buckets is not None else hajlasz_pair_buckets(space, omega)
    ks = pb.scales
    vals = np.zeros((ks.size, space.n))
    if len(pb):
        r = np.searchsorted(ks, pb.k)
        w = 0.5 * np.abs(u[pb.i] - u[pb.j]) / pb.d ** beta
        np.maximum.at(vals, (r, pb.i), w)
        np.maximum.at(vals, (r, pb.j), w)
    return GradientSequence(ks, vals)


def lipschitz_constant(space: MetricMeasureSpace, eta) -> float:
    eta = np.asarray(eta, dtype=float)
    off = ~np.eye(space.n, dtype=bool)
    diff = np.abs(eta[:, None] - eta[None, :])[off]
    return float((diff / space.dist[off]).max(initial=0.0))


def leibniz_gradient(space: MetricMeasureSpace, u, g: GradientSequence, eta, eta_lip: float,
                     eta_sup: float, beta: float) -> GradientSequence:
    """Fractional gradient of η·u from one of u.

    ρ_k = (g_k ‖η‖_∞ + 2^{k(β−1)} L |u|)·1[η ≠ 0] on every scale hosting a
    pair of the space.

    Raises
    ------
    ValueError
        If η is not ``eta_lip``-Lipschitz or exceeds ``eta_sup``.
    """
    u = np.asarray(u, dtype=float)
    eta = np.asarray(eta, dtype=float)
    lip = lipschitz_constant(space, eta)
    if lip > eta_lip * (1 + EXACT_RTOL) + 1e-15:
        raise ValueError(f"eta is not {eta_lip}-Lipschitz (measured {lip})")
    if np.abs(eta).max(initial=0.0) > eta_sup * (1 + EXACT_RTOL):
        raise ValueError("eta exceeds its stated sup bound")
    ks = np.union1d(hajlasz_pair_buckets(space).scales, g.scales)
    on = (eta != 0).astype(float)
    vals = np.empty((ks.size, space.n))
    for r, k in enumerate(ks):
        vals[r] = (g.get(k) * eta_sup + 2.0 ** (k * (beta - 1)) * eta_lip * np.abs(u)) * on
    return GradientSequence(ks, vals)
