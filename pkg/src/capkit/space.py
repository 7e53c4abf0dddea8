"""Finite metric measure spaces, dyadic scale windows and doubling statistics.

A space is a finite set of labelled points with a distance matrix and
positive point masses. Balls are open (strict ``<``) unless the closed flag
is set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import Iterable, Sequence

import numpy as np

MAX_POINTS = 2 ** 13
SYM_TOL = 1e-12


class SpaceError(ValueError):
    """Raised for malformed spaces or out-of-range builder arguments."""


@dataclass(frozen=True, eq=False)
class MetricMeasureSpace:
    """Finite metric space with a positive measure.

    Parameters
    ----------
    ids : tuple of str
        Point labels, unique.
    dist : ndarray, shape (N, N)
        Distance matrix. Not checked here, see :func:`validate_metric`.
    mass : ndarray, shape (N,)
        Point masses.
    coords : ndarray, optional
        Embedding coordinates for Euclidean spaces.
    meta : dict
        Builder provenance (kind, dim, level, ...). Used to refine grid
        families.
    """

    ids: tuple
    dist: np.ndarray
    mass: np.ndarray
    coords: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        mass = np.array(self.mass, dtype=float)
        ids = tuple(str(i) for i in self.ids)
        n = len(ids)
        if n == 0:
            raise SpaceError("space must contain at least one point")
        if n > MAX_POINTS:
            raise SpaceError(f"size cap exceeded: {n} > {MAX_POINTS} points")
        if dist.shape != (n, n) or mass.shape != (n,):
            raise SpaceError("distance matrix / mass vector shape mismatch")
        dist.flags.writeable = False
        mass.flags.writeable = False
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "mass", mass)
        if self.coords is not None:
            coords = np.array(self.coords, dtype=float)
            if coords.ndim == 1:
                coords = coords[:, None]
            coords.flags.writeable = False
            object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.ids)

    @cached_property
    def diam(self) -> float:
        return float(self.dist.max())

    @cached_property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    @cached_property
    def _index(self) -> dict:
        idx = {}
        for i, a in enumerate(self.ids):
            if a in idx:
                raise SpaceError(f"duplicate point id {a!r}")
            idx[a] = i
        return idx

    def index_of(self, point) -> int:
        """Index of a point given by id (or already an integer index)."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if not 0 <= point < self.n:
                raise SpaceError(f"point index {point} out of range")
            return int(point)
        try:
            return self._index[str(point)]
        except KeyError:
            raise SpaceError(f"unknown point id {point!r}") from None

    def indices(self, points: Iterable) -> np.ndarray:
        """Sorted unique indices of a collection of ids or indices."""
        if isinstance(points, PointSet):
            return points.idx
        out = sorted({self.index_of(p) for p in points})
        return np.asarray(out, dtype=int)

    @cached_property
    def sorted_dist(self) -> tuple:
        """Per-row sorted distances, their argsort and cumulative masses."""
        order = np.argsort(self.dist, axis=1, kind="stable")
        sd = np.take_along_axis(self.dist, order, axis=1)
        cm = np.cumsum(self.mass[order], axis=1)
        return sd, order, cm

    def ball_mass_many(self, x: int, radii, closed: bool = False) -> np.ndarray:
        """μ(B(x, r)) for an array of radii around a single center."""
        sd, _, cm = self.sorted_dist
        side = "right" if closed else "left"
        cnt = np.searchsorted(sd[x], np.asarray(radii, dtype=float), side=side)
        out = np.zeros(cnt.shape)
        pos = cnt > 0
        out[pos] = cm[x][cnt[pos] - 1]
        return out

    def ball_masses(self, r: float, closed: bool = False) -> np.ndarray:
        """μ(B(x, r)) for every center x at a common radius."""
        mask = self.dist <= r if closed else self.dist < r
        return mask @ self.mass

    def scaled(self, lam: float) -> "MetricMeasureSpace":
        """Same points and masses, distances multiplied by ``lam``."""
        coords = None if self.coords is None else self.coords * lam
        return MetricMeasureSpace(self.ids, self.dist * lam, self.mass, coords,
                                  dict(self.meta))


@dataclass(frozen=True, eq=False)
class PointSet:
    """Sorted set of point indices bound to a space."""

    idx: np.ndarray

    def __post_init__(self):
        idx = np.unique(np.asarray(self.idx, dtype=int))
        idx.flags.writeable = False
        object.__setattr__(self, "idx", idx)

    @classmethod
    def from_ids(cls, space: MetricMeasureSpace, ids: Iterable) -> "PointSet":
        return cls(space.indices(ids))

    def ids(self, space: MetricMeasureSpace) -> list:
        return [space.ids[i] for i in self.idx]

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[self.idx] = True
        return m

    def __len__(self) -> int:
        return len(self.idx)

    def __iter__(self):
        return iter(int(i) for i in self.idx)

    def __contains__(self, i) -> bool:
        return bool(np.any(self.idx == i))

    def __eq__(self, other) -> bool:
        return isinstance(other, PointSet) and np.array_equal(self.idx, other.idx)

    def __hash__(self):
        return hash(tuple(self.idx))

    def __repr__(self):
        return f"PointSet({list(self.idx)})"


def as_pointset(space: MetricMeasureSpace, E) -> PointSet:
    if isinstance(E, PointSet):
        return E
    if isinstance(E, np.ndarray) and E.dtype == bool:
        return PointSet(np.flatnonzero(E))
    return PointSet.from_ids(space, E)


# --------------------------------------------------------------------------
# Construction and validation

def make_space(points: Sequence, masses: Sequence[float], metric="euclidean",
               coords=None, meta: dict | None = None) -> MetricMeasureSpace:
    """Assemble a space from ids, masses and either coordinates or a matrix.

    Parameters
    ----------
    points : sequence
        Point ids.
    masses : sequence of float
    metric : {"euclidean"} or array_like
        Either the string ``"euclidean"`` (needs ``coords``) or a full
        distance matrix.
    coords : array_like, optional
    """
    if isinstance(metric, str):
        if metric != "euclidean":
            raise SpaceError(f"unknown metric {metric!r}")
        if coords is None:
            raise SpaceError("euclidean metric needs coordinates")
        c = np.asarray(coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        dist = euclidean_matrix(c)
    else:
        dist = np.asarray(metric, dtype=float)
        c = None if coords is None else np.asarray(coords, dtype=float)
    return MetricMeasureSpace(tuple(points), dist, np.asarray(masses, float), c,
                              dict(meta or {}))


def euclidean_matrix(c: np.ndarray) -> np.ndarray:
    if c.shape[1] == 1:
        return np.abs(c[:, 0][:, None] - c[:, 0][None, :])
    diff = c[:, None, :] - c[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_metric`.

    ``failures`` maps an axiom name to the first violating tuple of ids.
    """

    checks: dict
    failures: dict

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = []
        for axiom, passed in self.checks.items():
            if passed:
                lines.append(f"{axiom}: pass")
            else:
                w = ",".join(self.failures[axiom])
                lines.append(f"{axiom}: FAIL ({w})")
        return "\n".join(lines)


def validate_metric(space: MetricMeasureSpace, tol: float = SYM_TOL) -> ValidationReport:
    """Check metric axioms and mass positivity.

    Parameters
    ----------
    space : MetricMeasureSpace
    tol : float
        Absolute slack relative to the diameter.

    Returns
    -------
    ValidationReport
        Pass/fail per axiom with the first witness in index order. The
        triangle witness ``(x, y, z)`` means ``d(x,z) > d(x,y) + d(y,z)``.
    """
    D, m, ids = space.dist, space.mass, space.ids
    n = space.n
    slack = tol * max(1.0, float(np.abs(D).max()))
    checks, fails = {}, {}

    seen = {}
    dup = None
    for a in ids:
        if a in seen:
            dup = (a,)
            break
        seen[a] = True
    checks["unique_ids"] = dup is None
    if dup:
        fails["unique_ids"] = dup

    bad = np.argwhere(~(m > 0) | ~np.isfinite(m))
    checks["positive_mass"] = len(bad) == 0
    if len(bad):
        fails["positive_mass"] = (ids[bad[0][0]],)

    bad = np.argwhere(~np.isfinite(D) | (D < 0))
    checks["nonnegative"] = len(bad) == 0
    if len(bad):
        i, j = bad[0]
        fails["nonnegative"] = (ids[i], ids[j])

    # identity of indiscernibles: zero diagonal, positive off-diagonal
    diag_bad = np.flatnonzero(np.abs(np.diag(D)) > slack)
    off = D + np.eye(n) * (slack + 1.0)
    off_bad = np.argwhere(off <= slack)
    checks["identity"] = len(diag_bad) == 0 and len(off_bad) == 0
    if len(diag_bad):
        fails["identity"] = (ids[diag_bad[0]],)
    elif len(off_bad):
        i, j = off_bad[0]
        fails["identity"] = (ids[i], ids[j])

    asym = np.argwhere(np.abs(D - D.T) > slack)
    checks["symmetry"] = len(asym) == 0
    if len(asym):
        i, j = asym[0]
        fails["symmetry"] = (ids[i], ids[j])

    checks["triangle"] = True
    if space.meta.get("metric") != "euclidean" or space.coords is None:
        w = _triangle_witness(D, slack)
        if w is not None:
            checks["triangle"] = False
            fails["triangle"] = tuple(ids[k] for k in w)
    return ValidationReport(checks, fails)


def _triangle_witness(D: np.ndarray, slack: float):
    """First (x, y, z) in lexicographic order with d(x,z) > d(x,y)+d(y,z)."""
    n = D.shape[0]
    best = None
    for x in range(n):
        # via[y, z] = d(x,y) + d(y,z)
        via = D[x][:, None] + D
        viol = D[x][None, :] > via + slack
        if viol.any():
            y, z = np.argwhere(viol)[0]
            best = (x, int(y), int(z))
            break
    return best


def require_valid(space: MetricMeasureSpace) -> MetricMeasureSpace:
    rep = validate_metric(space)
    if not rep.ok:
        axiom, w = next(iter(rep.failures.items()))
        raise SpaceError(f"metric axiom '{axiom}' violated at {w}")
    return space


# --------------------------------------------------------------------------
# Scales

@dataclass(frozen=True)
class ScaleWindow:
    """Dyadic scale window of a space.

    ``n0`` is the coarsest scale (smallest n with 2^-n ≤ 2 diam), ``n_max``
    the first scale where every open ball B(x, 2^-n) is a singleton. The
    head covers ``n0 .. n_hi`` with ``n_hi = n_max + extra``; the tail starts
    at ``n_hi + 1``.
    """

    n0: int
    n_max: int
    extra: int = 0

    @property
    def n_hi(self) -> int:
        return self.n_max + self.extra

    @property
    def tail_start(self) -> int:
        return self.n_hi + 1

    @property
    def scales(self) -> np.ndarray:
        return np.arange(self.n0, self.n_hi + 1)

    @property
    def size(self) -> int:
        return self.n_hi - self.n0 + 1

    def with_extra(self, extra: int) -> "ScaleWindow":
        return ScaleWindow(self.n0, self.n_max, extra)


def smallest_n_with(bound: float) -> int:
    """Smallest integer n with 2^-n ≤ bound (bound > 0)."""
    n = math.ceil(-math.log2(bound))
    while 2.0 ** (-n) > bound:
        n += 1
    while 2.0 ** (-(n - 1)) <= bound:
        n -= 1
    return n


def scale_window(space: MetricMeasureSpace, extra: int = 0) -> ScaleWindow:
    """Compute ``n0`` and ``n_max`` for a space."""
    if space.n == 1:
        # one point: every ball is a singleton, diam = 0
        return ScaleWindow(0, 0, extra)
    n0 = smallest_n_with(2.0 * space.diam)
    off = space.dist[~np.eye(space.n, dtype=bool)]
    n_max = smallest_n_with(float(off.min()))
    return ScaleWindow(n0, max(n_max, n0), extra)


# --------------------------------------------------------------------------
# Balls

def ball(space: MetricMeasureSpace, center, r: float, closed: bool = False) -> PointSet:
    """Open ball B(center, r), or the closed ball when ``closed``."""
    if not r > 0:
        raise SpaceError("radius must be positive")
    c = space.index_of(center)
    row = space.dist[c]
    return PointSet(np.flatnonzero(row <= r if closed else row < r))


def ball_measure(space: MetricMeasureSpace, center, r: float, closed: bool = False) -> float:
    return float(space.mass[ball(space, center, r, closed).idx].sum())


# --------------------------------------------------------------------------
# Doubling statistics

@dataclass
class SpaceStats:
    """Measured doubling and reverse doubling constants.

    ``c_R`` is None when no factor below one exists. The partition-of-unity
    constants are filled in by :func:`capkit.operators.pou_constants`.
    """

    c_mu: float
    c_R: float | None
    sigma: float
    c_sigma: float
    sigma_degenerate: bool = False
    kappa: float | None = None
    L_pou: float | None = None
    N_overlap: int | None = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def doubling_constant(space: MetricMeasureSpace) -> float:
    """Exact sup of μ(B(x,2r))/μ(B(x,r)) over x and r > 0.

    The ratio is piecewise constant in r with breakpoints at the distances
    d_i and d_i/2, so the sup is attained at one of them.
    """
    sd, _, _ = space.sorted_dist
    best = 1.0
    for x in range(space.n):
        d = np.unique(sd[x][1:])
        if d.size == 0:
            continue
        r = np.concatenate([d, d / 2])
        num = space.ball_mass_many(x, 2 * r)
        den = space.ball_mass_many(x, r)
        best = max(best, float(np.max(num / den)))
    return best


def reverse_doubling_factor(space: MetricMeasureSpace) -> float | None:
    """Smallest c_R with μ(B(x,r/2)) ≤ c_R μ(B(x,r)) for 0 < r < diam/2.

    Radii whose ball is a singleton are skipped; at those the ratio is one
    for every finite space. Returns None when the factor is not below one.
    """
    sd, _, _ = space.sorted_dist
    lim = space.diam / 2
    best = 0.0
    for x in range(space.n):
        d = np.unique(sd[x][1:])
        r = np.concatenate([d, 2 * d])
        r = r[(r < lim) & (r > sd[x][1])]
        if r.size == 0:
            continue
        ratio = space.ball_mass_many(x, r / 2) / space.ball_mass_many(x, r)
        best = max(best, float(ratio.max()))
    if best == 0.0 or best >= 1.0:
        return None
    return best


def candidate_radii(space: MetricMeasureSpace, decimals: int = 12) -> np.ndarray:
    """Distinct pairwise distances together with 2·diam."""
    off = space.dist[np.triu_indices(space.n, 1)]
    scale = max(space.diam, 1e-300)
    # merge float-noise duplicates but keep actual data values
    reps = np.unique(off)
    keys = np.round(reps / scale, decimals)
    _, first = np.unique(keys, return_index=True)
    d = reps[first]
    return np.concatenate([d, [2 * space.diam]])


def reverse_doubling_fit(space: MetricMeasureSpace, max_fit_radii: int = 24):
    """Fit (σ, c_σ) for μ(B(x,r))/μ(B(x,R)) ≤ c_σ (r/R)^σ.

    σ is the least-squares slope of log μ-ratio against log radius-ratio on
    a geometric subsample of candidate radii. c_σ is then the smallest
    constant valid over every x and every candidate pair r < R, obtained in
    one pass per point with a prefix maximum of μ(B(x,r))/r^σ.

    Returns
    -------
    sigma, c_sigma, degenerate : float, float, bool
    """
    radii = candidate_radii(space)
    if space.n == 1 or radii.size < 2:
        return 0.0, 1.0, True
    pick = np.unique(np.round(np.geomspace(1, radii.size, min(max_fit_radii, radii.size))).astype(int) - 1)
    sub = radii[pick]
    xs, ys = [], []
    iu = np.triu_indices(sub.size, 1)
    step = max(1, space.n // 64)
    for x in range(0, space.n, step):
        m = space.ball_mass_many(x, sub)
        lr = np.log(sub[iu[0]] / sub[iu[1]])
        lm = np.log(m[iu[0]] / m[iu[1]])
        xs.append(lr)
        ys.append(lm)
    X = np.concatenate(xs)
    Y = np.concatenate(ys)
    degenerate = bool(np.ptp(Y) == 0.0 or np.ptp(X) == 0.0)
    if degenerate:
        sigma = 0.0
    else:
        A = np.vstack([X, np.ones_like(X)]).T
        sigma = float(np.linalg.lstsq(A, Y, rcond=None)[0][0])
        sigma = max(sigma, 0.0)
    c_sigma = 0.0
    for x in range(space.n):
        a = space.ball_mass_many(x, radii) / radii ** sigma
        pm = np.maximum.accumulate(a)
        c_sigma = max(c_sigma, float(np.max(pm[:-1] / a[1:])))
    return sigma, c_sigma, degenerate


def estimate_stats(space: MetricMeasureSpace) -> SpaceStats:
    """Doubling constant, reverse doubling factor and (σ, c_σ)."""
    sigma, c_sigma, deg = reverse_doubling_fit(space)
    return SpaceStats(doubling_constant(space), reverse_doubling_factor(space),
                      sigma, c_sigma, deg)


# --------------------------------------------------------------------------
# Builders

def build_grid(dim: int, levels: int) -> MetricMeasureSpace:
    """Uniform cell-centre grid on [0,1]^dim with 2^levels points per axis.

    Masses are the cell volumes, so they sum to one.
    """
    if dim not in (1, 2):
        raise SpaceError("dim must be 1 or 2")
    if not 0 <= levels <= 12:
        raise SpaceError("levels must lie in 0..12")
    k = 2 ** levels
    if k ** dim > MAX_POINTS:
        raise SpaceError(f"size cap exceeded: {k ** dim} > {MAX_POINTS} points")
    axis = (np.arange(k) + 0.5) / k
    if dim == 1:
        coords = axis[:, None]
    else:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        coords = np.column_stack([gx.ravel(), gy.ravel()])
    n = coords.shape[0]
    mass = np.full(n, 1.0 / n)
    meta = {"kind": "grid", "dim": dim, "level": levels, "metric": "euclidean"}
    return MetricMeasureSpace(tuple(str(i) for i in range(n)), euclidean_matrix(coords),
                              mass, coords, meta)


def cantor_intervals(ratio: float, depth: int) -> list:
    """Closed intervals of the depth-stage Cantor construction on [0,1]."""
    iv = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for a, b in iv:
            w = ratio * (b - a)
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        iv = nxt
    return iv


def build_cantor(ratio: float, depth: int, level: int | None = None):
    """1-D grid with the depth-stage Cantor set marked.

    Parameters
    ----------
    ratio : float
        Length ratio kept on each side, in (0, 1/2).
    depth : int
        Construction stage.
    level : int, optional
        Grid level. Defaults to the smallest level whose cell is no longer
        than the stage intervals, so each interval holds at least one point.

    Returns
    -------
    space : MetricMeasureSpace
    E : PointSet
        Grid points inside the union of stage intervals.
    """
    if not 0 < ratio < 0.5:
        raise SpaceError("ratio must lie in (0, 1/2)")
    if not 0 <= depth <= 12:
        raise SpaceError("depth must lie in 0..12")
    if level is None:
        level = max(1, smallest_n_with(ratio ** depth))
    if level > 12:
        raise SpaceError("size cap exceeded: Cantor depth needs more than 2^12 points")
    space = build_grid(1, level)
    x = space.coords[:, 0]
    inside = np.zeros(space.n, dtype=bool)
    for a, b in cantor_intervals(ratio, depth):
        inside |= (x >= a - 1e-15) & (x <= b + 1e-15)
    meta = dict(space.meta, kind="cantor", ratio=ratio, depth=depth)
    space = MetricMeasureSpace(space.ids, space.dist, space.mass, space.coords, meta)
    return space, PointSet(np.flatnonzero(inside))


def two_point_space() -> MetricMeasureSpace:
    """Points a, b at distance 1 with unit masses."""
    return make_space(["a", "b"], [1.0, 1.0], [[0.0, 1.0], [1.0, 0.0]],
                      meta={"kind": "two_point"})


def three_chain() -> MetricMeasureSpace:
    """Points 0, 1, 2 on a line with unit steps and unit masses."""
    return make_space(["0", "1", "2"], [1.0, 1.0, 1.0], "euclidean",
                      coords=[[0.0], [1.0], [2.0]],
                      meta={"kind": "three_chain", "metric": "euclidean"})


def random_space(rng: np.random.Generator, n: int, dim: int = 2,
                 mass_spread: float = 1.0) -> MetricMeasureSpace:
    """Random Euclidean point cloud in the unit cube with random masses."""
    coords = rng.random((n, dim))
    mass = np.exp(mass_spread * rng.standard_normal(n))
    mass /= mass.sum()
    meta = {"kind": "random", "metric": "euclidean", "dim": dim}
    return MetricMeasureSpace(tuple(f"p{i}" for i in range(n)), euclidean_matrix(coords),
                              mass, coords, meta)
