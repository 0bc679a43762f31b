"""Z-normalized distances, distance profiles, and fixed-length matrix profiles.

The fast paths run in correlation space with sliding dot products; reported
nearest-neighbour distances are recomputed directly from the z-normalized
windows so that identical subsequences come out at exactly zero and exported
values agree with naive recomputation well inside tolerance.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ParameterError
from .series import RollingStats, SeriesRecord, SubsequenceRef, rolling_stats, znorm_values

# candidates whose fast distance sits within this of the row minimum are
# re-examined directly before the argmin is trusted (exact-tie duplicates)
SNAP_TOL = 1e-6


def near_zero_tol(window: int) -> float:
    """Fast-path distances below this may be zero in truth: d = sqrt(2l(1-q))
    amplifies eps-level correlation noise near q = 1."""
    return max(SNAP_TOL, math.sqrt(2.0 * window) * 1e-7)


def zero_bound(stats: RollingStats, span: float) -> float:
    """Distance noise floor of the correlation fast paths for this data.

    Poorly conditioned windows (means dwarfing sigmas, e.g. step-like series)
    inflate the cancellation error of sliding correlation updates; distances
    below this bound cannot be distinguished from zero without direct
    recomputation. ``span`` is the value range of the series.
    """
    ok = stats.sigma > 0
    if not ok.any():
        return near_zero_tol(stats.window)
    sig_min = float(stats.sigma[ok].min())
    qerr = 1024.0 * np.finfo(np.float64).eps * (1.0 + span / sig_min)
    return max(near_zero_tol(stats.window),
               math.sqrt(2.0 * stats.window * qerr))


def row_noise_bound(window: int, w: int, b: np.ndarray,
                    ok: np.ndarray) -> np.ndarray:
    """Per-row ceiling on how far join-kernel noise can move a row minimum.

    The kernel's correlation error for row i is bounded by
    eps * (64 + 8*sqrt(w)) * (1 + |b_i| * max|b|); an argmin flip it causes
    can only land the refined minimum below sqrt(8 * window * err). Rows whose
    refined minimum sits above their bound are immune; the rest are
    re-arbitrated directly.
    """
    eps = float(np.finfo(np.float64).eps)
    b_max = float(np.abs(b[ok]).max()) if ok.any() else 0.0
    qerr = eps * (64.0 + 8.0 * math.sqrt(w)) * (1.0 + np.abs(b) * b_max)
    return np.sqrt(8.0 * window * qerr)

# fixed sharding grid so results never depend on the worker count
DIAG_CHUNK = 16384
ROW_CHUNK = 8192


@dataclass(frozen=True)
class MotifPair:
    """A canonical motif pair: ``left < right``, distances exact."""

    left: int
    right: int
    length: int
    distance: float
    norm_distance: float

    @staticmethod
    def make(i: int, j: int, length: int, distance: float) -> "MotifPair":
        left, right = (i, j) if i < j else (j, i)
        return MotifPair(left, right, length, distance,
                         distance * math.sqrt(1.0 / length))


@dataclass(frozen=True)
class DistanceProfile:
    query: SubsequenceRef
    distances: np.ndarray
    exclusion: int


@dataclass(frozen=True)
class MatrixProfile:
    window: int
    mp: np.ndarray
    ip: np.ndarray
    exclusion: int
    degenerate: np.ndarray


def default_exclusion(window: int) -> int:
    return (window + 1) // 2


def znorm_distance(a, b) -> float:
    """Euclidean distance between the z-normalized vectors.

    Equals sqrt(2*len*(1-q)) for Pearson correlation q when both vectors are
    non-constant; constant windows follow the all-zeros convention.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ParameterError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size < 2:
        raise ParameterError("vectors need at least 2 points")
    return float(np.sqrt(np.sum((znorm_values(a) - znorm_values(b)) ** 2)))


def pair_distance(series: SeriesRecord, i: int, j: int, window: int) -> float:
    """Direct z-normalized distance between two windows of one series."""
    return znorm_distance(series.window(i, window), series.window(j, window))


def _coeffs(stats: RollingStats, shift: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Correlation coefficients; ``shift`` must match the centering applied to
    the value buffer the dot products are computed on."""
    m = stats.window
    ok = ~stats.degenerate
    safe = np.where(ok, stats.sigma, 1.0)
    a = np.where(ok, 1.0 / (safe * math.sqrt(m)), 0.0)
    b = np.where(ok, (stats.mu - shift) / safe, 0.0)
    return a, b


def _q_to_dist(q: np.ndarray, m: int) -> np.ndarray:
    return np.sqrt(np.maximum(0.0, 2.0 * m * (1.0 - q)))


def sliding_dot(x: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot products of ``query`` with every window of ``x`` (length |x|-m+1)."""
    if x.size * query.size <= 1 << 26:
        return np.correlate(x, query)
    from scipy.signal import fftconvolve

    return fftconvolve(x, query[::-1], mode="valid")


def _row_fast(x: np.ndarray, stats: RollingStats, i: int, radius: int,
              exclude_degenerate: bool):
    """Fast distance/correlation profile of one query row, conventions applied.

    Correlations come from sliding the query centered on its own mean, so the
    candidate means cancel analytically and the computation stays well
    conditioned even when window means dwarf window sigmas. Returns
    (d, q, cov): the distance vector with exclusion-zone and excluded offsets
    at +inf, the correlation vector, and the centered cross moments
    sum((x_i - mu_i)(x_j - mu_j)) per candidate.
    """
    m = stats.window
    w = stats.count
    deg = stats.degenerate
    if not deg[i]:
        shift = float(x.mean())  # conditioning only; cancels analytically
        xs = x - shift
        centered = xs[i:i + m] - (stats.mu[i] - shift)
        cov = sliding_dot(xs, centered)
        # the centered query sums to ~eps, not 0; subtract its residual so the
        # candidate means drop out of the cross moments exactly
        csum = float(centered.sum())
        if csum != 0.0:
            cov = cov - (stats.mu - shift) * csum
        ok = ~deg
        safe = np.where(ok, stats.sigma, 1.0)
        q = cov / (m * float(stats.sigma[i]) * safe)
        d = _q_to_dist(np.where(ok, q, 0.0), m)
        if deg.any():
            # non-constant vs constant window: distance sqrt(m), so q = 0.5
            d = np.where(deg, math.sqrt(m), d)
            q = np.where(deg, 0.5, q)
    else:
        # constant query: all-zeros convention against every candidate
        cov = np.zeros(w)
        d = np.where(deg, 0.0, math.sqrt(m))
        q = 1.0 - d * d / (2.0 * m)
    if exclude_degenerate and deg.any():
        d = np.where(deg, np.inf, d)
    lo = max(0, i - radius + 1)
    hi = min(w, i + radius)
    d[lo:hi] = np.inf
    return d, q, cov


def distance_profile(series: SeriesRecord, stats: RollingStats,
                     query: SubsequenceRef, exclusion: int | None = None,
                     exclude_degenerate: bool = True) -> DistanceProfile:
    """Distances from one query window to every same-length window.

    Offsets within the exclusion zone of the query (and, by default, constant
    windows) are +inf. Scale: 2*sqrt(len) is the maximum possible value.
    """
    query.validate(series)
    if stats.window != query.length:
        raise ParameterError(
            f"stats built for window {stats.window}, query has {query.length}")
    radius = default_exclusion(query.length) if exclusion is None else int(exclusion)
    if radius < 1:
        raise ParameterError("exclusion radius must be >= 1")
    if exclude_degenerate and stats.degenerate[query.offset]:
        d = np.full(stats.count, np.inf)
    else:
        d, _, _ = _row_fast(series.values, stats, query.offset, radius,
                            exclude_degenerate)
        span = float(series.values.max() - series.values.min())
        near = np.flatnonzero(np.isfinite(d) & (d < zero_bound(stats, span)))
        if near.size:
            d[near] = _direct_distances(series.values,
                                        np.full(near.size, query.offset),
                                        near, query.length)
    return DistanceProfile(query=query, distances=d, exclusion=radius)


def _direct_distances(x: np.ndarray, lefts: np.ndarray, rights: np.ndarray,
                      m: int) -> np.ndarray:
    """Direct z-normalized distances for many (left, right) window pairs."""
    out = np.empty(lefts.size)
    chunk = max(1, (1 << 22) // max(m, 1))
    for s in range(0, lefts.size, chunk):
        e = min(s + chunk, lefts.size)
        la = _znorm_windows(x, lefts[s:e], m)
        ra = _znorm_windows(x, rights[s:e], m)
        out[s:e] = np.sqrt(np.sum((la - ra) ** 2, axis=1))
    return out


def _znorm_windows(x: np.ndarray, offsets: np.ndarray, m: int) -> np.ndarray:
    wins = x[offsets[:, None] + np.arange(m)[None, :]]
    mu = wins.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.mean((wins - mu) ** 2, axis=1, keepdims=True))
    constant = wins.max(axis=1, keepdims=True) == wins.min(axis=1, keepdims=True)
    sd = np.where(constant | (sd == 0.0), np.inf, sd)
    return np.where(np.isfinite(sd), (wins - mu) / sd, 0.0)


def _exact_row_min(series: SeriesRecord, stats: RollingStats, i: int,
                   radius: int, exclude_degenerate: bool,
                   d_fast: np.ndarray | None = None) -> tuple[float, int]:
    """Row minimum with near-ties resolved by direct recomputation.

    Candidates within the data's fast-path noise floor of the fast minimum
    are recomputed from the z-normalized windows; the smallest offset wins
    exact ties, matching the naive reference semantics.
    """
    if d_fast is None:
        d_fast, _, _ = _row_fast(series.values, stats, i, radius, exclude_degenerate)
    if not np.isfinite(d_fast).any():
        return math.inf, -1
    span = float(series.values.max() - series.values.min())
    tol = max(SNAP_TOL, zero_bound(stats, span))
    jmin = int(np.argmin(d_fast))
    cands = np.flatnonzero(d_fast <= d_fast[jmin] + tol)
    if cands.size > 4096:
        cands = cands[np.argsort(d_fast[cands], kind="stable")[:4096]]
        cands.sort()
    exact = _direct_distances(series.values, np.full(cands.size, i), cands,
                              stats.window)
    best = int(np.argmin(exact))  # first minimum = smallest offset
    return float(exact[best]), int(cands[best])


def matrix_profile(series: SeriesRecord, window: int,
                   exclusion: int | None = None,
                   exclude_degenerate: bool = True,
                   workers: int = 1) -> MatrixProfile:
    """Fixed-length matrix and index profile of a series against itself.

    Per offset, the distance to the nearest non-trivial neighbour and that
    neighbour's offset; ties go to the smaller candidate offset. Offsets with
    no admissible candidate get mp=+inf, ip=-1. Deterministic for any worker
    count: work is sharded on a fixed diagonal grid and merged with an
    order-independent rule.
    """
    n = series.length
    if window < 2 or 2 * window > n:
        raise ParameterError(
            f"window length must satisfy 2 <= l <= |D|/2; got l={window}, |D|={n}")
    radius = default_exclusion(window) if exclusion is None else int(exclusion)
    if radius < 1:
        raise ParameterError("exclusion radius must be >= 1")

    stats = rolling_stats(series, window)
    shift = float(series.values.mean())
    x = series.values - shift  # conditioning shift; z-distances are invariant
    w = stats.count
    a, b = _coeffs(stats, shift)
    best_q = np.full(w, -np.inf)
    best_j = np.full(w, -1, dtype=np.int64)

    chunks = [(g, min(g + DIAG_CHUNK, w)) for g in range(radius, w, DIAG_CHUNK)]
    if workers <= 1 or len(chunks) <= 1:
        for g0, g1 in chunks:
            _kernels.diag_join(x, window, a, b, g0, g1, best_q, best_j)
    else:
        def run(span):
            bq = np.full(w, -np.inf)
            bj = np.full(w, -1, dtype=np.int64)
            _kernels.diag_join(x, window, a, b, span[0], span[1], bq, bj)
            return bq, bj

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for bq, bj in pool.map(run, chunks):
                take = (bq > best_q) | ((bq == best_q) & (bj >= 0) & (bj < best_j))
                best_q = np.where(take, bq, best_q)
                best_j = np.where(take, bj, best_j)

    mp = np.full(w, np.inf)
    ip = best_j.copy()
    found = best_j >= 0

    deg = stats.degenerate
    redo = np.zeros(w, dtype=bool)
    if deg.any():
        # kernel q values for degenerate pairs are placeholders; re-derive the
        # affected rows with the constant-window conventions applied
        redo |= deg
        redo |= found & deg[np.where(found, best_j, 0)]
        redo |= found & (best_q <= 0.0)
        redo |= ~found

    # exact values for the winners
    rows = np.flatnonzero(found & ~redo)
    if rows.size:
        mp[rows] = _direct_distances(series.values, rows, best_j[rows], window)
    # rows whose refined minimum sits inside their kernel-noise ceiling could
    # have flipped to the wrong partner; re-arbitrate them exactly
    ok_rows = ~deg if deg.any() else np.ones(w, dtype=bool)
    redo |= np.isfinite(mp) & (mp < row_noise_bound(window, w, b, ok_rows))
    for i in np.flatnonzero(redo):
        if exclude_degenerate and deg[i]:
            mp[i], ip[i] = math.inf, -1
            continue
        mp[i], ip[i] = _exact_row_min(series, stats, int(i), radius,
                                      exclude_degenerate)
    ip[~np.isfinite(mp)] = -1
    return MatrixProfile(window=window, mp=mp, ip=ip, exclusion=radius,
                         degenerate=deg)


def topk_pairs(profile: MatrixProfile, k: int) -> list[MotifPair]:
    """The k smallest nearest-neighbour pairs, symmetric duplicates removed.

    Pairs are canonicalized to left < right; ordering is (distance, left,
    right) ascending. Fewer than k pairs are returned when fewer exist.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    seen: dict[tuple[int, int], float] = {}
    for i in np.flatnonzero(np.isfinite(profile.mp)):
        j = int(profile.ip[i])
        if j < 0:
            continue
        key = (int(i), j) if i < j else (j, int(i))
        d = float(profile.mp[i])
        if key not in seen or d < seen[key]:
            seen[key] = d
    ranked = sorted((d, lr[0], lr[1]) for lr, d in seen.items())
    return [MotifPair.make(l, r, profile.window, d) for d, l, r in ranked[:k]]
