"""Restricted Hausdorff contents of codimension d.

The content of F is the infimum of Σ μ(B(x_k, r_k)) r_k^{-d} over covers of
F by open balls with radii at most ρ. On a finite space the ball B(x, r) is
constant for r in each interval (d_i, d_{i+1}] between consecutive distinct
distances from x, and r^{-d} decreases in r, so it suffices to consider the
right endpoints together with ρ itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .space import MetricMeasureSpace, PointSet, as_pointset

MAX_EXACT_POINTS = 24
MAX_CANDIDATES = 20000


class ContentTooLarge(ValueError):
    """Raised when an instance exceeds the exact solver's limits."""


@dataclass(frozen=True)
class ContentParams:
    """Codimension ``d`` and radius restriction ``rho``."""

    d: float
    rho: float

    def __post_init__(self):
        if not self.d >= 0:
            raise ValueError("codimension d must be nonnegative")
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass
class Candidate:
    """A ball B(center, radius) restricted to F, with its cost."""

    center: int
    radius: float
    cost: float
    trace: int                       # bitmask over the listing of F


@dataclass
class ContentResult:
    """Content value and the cover that attains it.

    ``cover`` lists ``(center_id, radius)`` pairs.
    """

    value: float
    cover: list
    exact: bool
    n_candidates: int
    extra: dict = field(default_factory=dict)


def _center_candidates(space: MetricMeasureSpace, x: int, F: PointSet, params: ContentParams):
    """Cheapest ball per distinct trace on F among balls centred at x.

    Returns ``(kF, radius, cost, order)``: for each kept ball the number of
    F points it contains, which are the first ``kF`` entries of ``order``
    (F positions sorted by distance from x).
    """
    d = space.dist[x]
    ds = np.sort(d, kind="stable")
    cm = np.cumsum(space.mass[np.argsort(d, kind="stable")])
    radii = np.unique(ds[(ds > 0) & (ds <= params.rho)])
    if radii.size == 0 or radii[-1] < params.rho:
        radii = np.append(radii, params.rho)
    k = np.searchsorted(ds, radii, side="left")          # open ball: d < r
    cost = cm[k - 1] * radii ** (-params.d)
    dF = d[F.idx]
    order = np.argsort(dF, kind="stable")
    kF = np.searchsorted(dF[order], radii, side="left")
    ok = kF > 0
    kF, radii, cost = kF[ok], radii[ok], cost[ok]
    # cheapest per kF, ties to the smaller radius
    srt = np.lexsort((radii, cost, kF))
    first = np.ones(srt.size, dtype=bool)
    first[1:] = kF[srt[1:]] != kF[srt[:-1]]
    sel = srt[first]
    return kF[sel], radii[sel], cost[sel], order


def candidate_balls(space: MetricMeasureSpace, F, params: ContentParams,
                    dedupe: bool = True) -> list[Candidate]:
    """Candidate balls for covering F, one per distinct trace when ``dedupe``.

    For each center the radii are the distinct positive distances not
    exceeding ρ and ρ itself. Balls missing F are dropped. When several balls
    share a trace on F the cheapest is kept, ties broken by center id and
    then radius. With ``dedupe=False`` every (center, radius) pair is
    returned.
    """
    F = as_pointset(space, F)
    if len(F) == 0:
        return []
    if not dedupe:
        return _all_candidates(space, F, params)
    best: dict[int, Candidate] = {}
    for x in range(space.n):
        kF, radii, cost, order = _center_candidates(space, x, F, params)
        prefix = np.zeros(len(F) + 1, dtype=object)
        acc = 0
        for j, pos in enumerate(order.tolist()):
            acc |= 1 << pos
            prefix[j + 1] = acc
        for kf, r, c in zip(kF.tolist(), radii.tolist(), cost.tolist()):
            cand = Candidate(x, r, c, prefix[kf])
            old = best.get(cand.trace)
            if old is None or _rank(space, cand) < _rank(space, old):
                best[cand.trace] = cand
    return sorted(best.values(), key=lambda c: _rank(space, c))


def _all_candidates(space, F, params) -> list[Candidate]:
    out = []
    bit = {int(i): 1 << k for k, i in enumerate(F.idx)}
    for x in range(space.n):
        d = space.dist[x]
        radii = np.unique(d[(d > 0) & (d <= params.rho)])
        if radii.size == 0 or radii[-1] < params.rho:
            radii = np.append(radii, params.rho)
        for r in radii:
            inside = d < r
            trace = sum(bit[i] for i in F.idx.tolist() if inside[i])
            if trace:
                out.append(Candidate(x, float(r), float(space.mass[inside].sum() * r ** (-params.d)),
                                     trace))
    return out


def _rank(space, c: Candidate):
    return (c.cost, space.ids[c.center], c.radius)


def _result(space, F, chosen, exact, n_cand, **extra) -> ContentResult:
    value = float(sum(c.cost for c in chosen))
    cover = [(space.ids[c.center], c.radius) for c in chosen]
    return ContentResult(value, cover, exact, n_cand, dict(extra))


def content_greedy(space: MetricMeasureSpace, F, params: ContentParams) -> ContentResult:
    """Greedy weighted set cover, an upper bound for the content.

    Repeatedly picks the ball with the least cost per newly covered point.
    """
    F = as_pointset(space, F)
    cands = candidate_balls(space, F, params)
    full = (1 << len(F)) - 1
    covered = 0
    chosen = []
    while covered != full:
        best, best_ratio = None, np.inf
        for c in cands:
            new = bin(c.trace & ~covered).count("1")
            if new and c.cost / new < best_ratio:
                best, best_ratio = c, c.cost / new
        chosen.append(best)
        covered |= best.trace
    return _result(space, F, chosen, False, len(cands))


def _is_line(space: MetricMeasureSpace) -> bool:
    return (space.coords is not None and space.coords.shape[1] == 1
            and space.meta.get("metric") == "euclidean")


def content_line(space: MetricMeasureSpace, F, params: ContentParams) -> ContentResult:
    """Exact content on a subset of the real line, any size.

    Every ball meets F in a run of consecutive points (in coordinate
    order), so an optimal cover is a chain of runs ordered by right end
    and the minimum follows from a dynamic program over prefixes of F.
    """
    if not _is_line(space):
        raise ValueError("content_line needs a one-dimensional Euclidean space")
    F = as_pointset(space, F)
    m = len(F)
    if m == 0:
        return ContentResult(0.0, [], True, 0)
    by_coord = F.idx[np.argsort(space.coords[F.idx, 0], kind="stable")]
    pos_in_F = np.empty(m, dtype=np.int64)
    pos_in_F[np.searchsorted(F.idx, by_coord)] = np.arange(m)   # F listing -> line rank
    best: dict[tuple, Candidate] = {}
    for x in range(space.n):
        kF, radii, cost, order = _center_candidates(space, x, F, params)
        if kF.size == 0:
            continue
        ranks = pos_in_F[order]
        lo = np.minimum.accumulate(ranks)
        hi = np.maximum.accumulate(ranks)
        for kf, r, c in zip(kF.tolist(), radii.tolist(), cost.tolist()):
            key = (int(lo[kf - 1]), int(hi[kf - 1]))
            cand = Candidate(x, r, c, 0)
            old = best.get(key)
            if old is None or _rank(space, cand) < _rank(space, old):
                best[key] = cand
    by_end: dict[int, list] = {}
    for (a, b), c in best.items():
        by_end.setdefault(b, []).append((a, c))
    dp = np.full(m + 1, np.inf)
    dp[0] = 0.0
    back: list = [None] * (m + 1)
    for b in range(m):
        for a, c in by_end.get(b, []):
            i = a + int(np.argmin(dp[a:b + 1]))
            v = dp[i] + c.cost
            if v < dp[b + 1]:
                dp[b + 1], back[b + 1] = v, (i, c)
    chosen = []
    j = m
    while j > 0:
        i, c = back[j]
        chosen.append(c)
        j = i
    return _result(space, F, chosen[::-1], True, len(best), method="line")


def content_exact(space: MetricMeasureSpace, F, params: ContentParams) -> ContentResult:
    """Exact content.

    On one-dimensional Euclidean spaces this uses :func:`content_line`.
    Otherwise it runs a branch-and-bound over covers of F. Points of F are
    covered in listing order. At each node the lowest uncovered point is
    branched on, trying every candidate containing it in order of cost. A
    node is pruned when its cost plus the largest cheapest single-ball cost
    among uncovered points reaches the incumbent, or when the same covered
    set was already reached at no greater cost.

    Raises
    ------
    ContentTooLarge
        Off the line, if F has more than 24 points or there are more than
        2·10⁴ candidate balls. Use ``content_greedy`` instead.
    """
    if _is_line(space):
        return content_line(space, F, params)
    return content_bnb(space, F, params)


def content_bnb(space: MetricMeasureSpace, F, params: ContentParams) -> ContentResult:
    """Branch-and-bound exact content (see :func:`content_exact`)."""
    F = as_pointset(space, F)
    if len(F) > MAX_EXACT_POINTS:
        raise ContentTooLarge(f"|F| = {len(F)} exceeds {MAX_EXACT_POINTS}; use content_greedy")
    if len(F) == 0:
        return ContentResult(0.0, [], True, 0)
    cands = candidate_balls(space, F, params)
    if len(cands) > MAX_CANDIDATES:
        raise ContentTooLarge(f"{len(cands)} candidate balls exceed {MAX_CANDIDATES}; use content_greedy")
    m = len(F)
    full = (1 << m) - 1
    by_point = [[c for c in cands if c.trace >> k & 1] for k in range(m)]
    cheapest = np.array([min(c.cost for c in lst) for lst in by_point])

    greedy = content_greedy(space, F, params)
    best_val = greedy.value
    best_cover = _greedy_candidates(greedy, space, cands)
    seen: dict[int, float] = {}
    stack: list = []
    slack = 1e-12

    def lower(mask):
        rest = [k for k in range(m) if not mask >> k & 1]
        return cheapest[rest].max()

    def dfs(mask, cost):
        nonlocal best_val, best_cover
        if mask == full:
            if cost < best_val * (1 - slack):
                best_val, best_cover = cost, list(stack)
            return
        prev = seen.get(mask)
        if prev is not None and prev <= cost:
            return
        seen[mask] = cost
        if cost + lower(mask) > best_val * (1 + slack):
            return
        k = _lowest_zero(mask)
        for c in by_point[k]:
            stack.append(c)
            dfs(mask | c.trace, cost + c.cost)
            stack.pop()

    dfs(0, 0.0)
    return _result(space, F, best_cover, True, len(cands), method="bnb", nodes=len(seen))


def _lowest_zero(mask: int) -> int:
    return ((~mask) & (mask + 1)).bit_length() - 1


def _greedy_candidates(greedy: ContentResult, space, cands):
    lookup = {(space.ids[c.center], c.radius): c for c in cands}
    return [lookup[key] for key in greedy.cover]


def content_bruteforce(space: MetricMeasureSpace, F, params: ContentParams) -> float:
    """Exhaustive dynamic program over all subsets of F (small instances only).

    Uses every candidate ball without trace deduplication and relaxes
    cover[S ∪ trace] ≤ cover[S] + cost over all 2^|F| subsets.
    """
    F = as_pointset(space, F)
    m = len(F)
    if m > 16:
        raise ContentTooLarge("brute force limited to 16 points")
    cands = candidate_balls(space, F, params, dedupe=False)
    best = np.full(1 << m, np.inf)
    best[0] = 0.0
    for S in range(1 << m):
        if not np.isfinite(best[S]):
            continue
        for c in cands:
            T = S | c.trace
            v = best[S] + c.cost
            if v < best[T]:
                best[T] = v
    return float(best[-1])


__all__ = [
    "ContentParams", "ContentResult", "ContentTooLarge", "Candidate",
    "candidate_balls", "content_exact", "content_line", "content_bnb", "content_greedy", "content_bruteforce",
]
