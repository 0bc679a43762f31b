"""Variable-length motif discovery: exact per-length top-k over a length range.

The run computes full distance profiles once at the smallest length, keeps per
anchor only the p entries with the smallest extension lower bounds, and walks
the remaining lengths by advancing those entries in O(1) each. At every length
each partial profile is classified:

- valid: its smallest exact distance beats the bound below which nothing it
  dropped can sit, so the profile's row minimum is known exactly;
- non-valid: the row minimum is only known to be >= that bound.

The smallest such bound over the non-valid profiles (minLBAbs) fences the
region where every row minimum is exactly known; top-k pairs strictly inside
it are certified. When fewer than k are certified, the profiles that could
hide better matches are recomputed from scratch at the current length and
rebased. Results are always identical to running the fixed-length computation
at every length; pruning only changes cost.

Numerics: carried entries advance a centered cross moment (a two-variable
Welford update) instead of a raw dot product, which keeps their distances
accurate on data whose window means dwarf window sigmas. The certification
threshold derives from the worst selected correlation with a data-scaled
margin for the selection pass's own rounding, so a near-tie at selection time
can never certify something the dropped entries could still beat.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distance import (
    ROW_CHUNK,
    MatrixProfile,
    MotifPair,
    _coeffs,
    _direct_distances,
    _exact_row_min,
    _row_fast,
    default_exclusion,
    matrix_profile,
    row_noise_bound,
    sliding_dot,
    topk_pairs,
    zero_bound,
)
from .errors import EngineError, ParameterError
from .lowerbound import extension_bound
from .series import SeriesRecord, rolling_stats
from .valmap import Valmap, valmap_init, valmap_update

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class PruneStats:
    """Per-length pruning telemetry."""

    length: int
    profiles_valid: int
    profiles_recomputed: int
    profiles_expired: int
    min_lb_abs: float
    smallest_min_dist: float

    @property
    def certified_without_recompute(self) -> bool:
        return self.profiles_recomputed == 0


@dataclass(frozen=True)
class LengthResult:
    """Exact top-k pairs of one length plus that length's pruning stats."""

    length: int
    pairs: list[MotifPair]
    stats: PruneStats


@dataclass
class ValmodResult:
    results: list[LengthResult]
    valmap: Valmap

    @property
    def trace(self) -> list[PruneStats]:
        return [r.stats for r in self.results]


def fixed_length_topk(series: SeriesRecord, window: int, k: int,
                      exclusion: int | None = None,
                      exclude_degenerate: bool = True,
                      workers: int = 1) -> LengthResult:
    """Single-length top-k; the oracle path and the recompute primitive."""
    profile = matrix_profile(series, window, exclusion=exclusion,
                             exclude_degenerate=exclude_degenerate,
                             workers=workers)
    pairs = topk_pairs(profile, k)
    finite = profile.mp[np.isfinite(profile.mp)]
    stats = PruneStats(length=window, profiles_valid=int(finite.size),
                       profiles_recomputed=0, profiles_expired=0,
                       min_lb_abs=math.inf,
                       smallest_min_dist=float(finite.min()) if finite.size else math.inf)
    return LengthResult(length=window, pairs=pairs, stats=stats)


class _ProfileSet:
    """Flat per-anchor storage for the partial distance profiles.

    Entry state lives in (profiles x p) arrays so per-length updates are plain
    vectorized passes. ``ent_cov`` carries the centered cross moment of each
    pair at the current length; exact distances derive from it. Per profile,
    ``worst_key`` is the smallest selected squared positive correlation at the
    last (re)base (-1 when nothing was left unstored) and ``key_err`` the
    rounding margin of the pass that selected it; together they bound every
    unstored candidate's correlation from above, hence its distance at any
    later length from below.
    """

    def __init__(self, series: SeriesRecord, lmin: int, p: int,
                 exclude_degenerate: bool, derived_lb: bool):
        self.series = series
        self.x = series.values
        self.shift = float(series.values.mean())
        self.xc = series.values - self.shift  # kernel conditioning only
        self.n = series.length
        self.lmin = lmin
        self.p = p
        self.exclude_degenerate = exclude_degenerate
        self.derived_lb = derived_lb
        count = self.n - lmin + 1
        self.anchors = np.arange(count, dtype=np.int64)
        self.alive = np.ones(count, dtype=bool)
        self.base_len = np.full(count, lmin, dtype=np.int64)
        self.base_mu = np.zeros(count)
        self.base_sig = np.zeros(count)
        self.worst_key = np.full(count, -1.0)
        self.key_err = np.zeros(count)
        self.ent_j = np.full((count, p), -1, dtype=np.int64)
        self.ent_alive = np.zeros((count, p), dtype=bool)
        self.ent_qb = np.zeros((count, p))
        self.ent_cov = np.zeros((count, p))
        self.ent_flag = np.zeros((count, p), dtype=bool)
        self.ent_d = np.full((count, p), np.inf)
        # derived per length
        self.min_dist = np.full(count, np.inf)
        self.argmin_j = np.full(count, -1, dtype=np.int64)
        self.max_lb = np.zeros(count)
        self.valid = np.zeros(count, dtype=bool)
        # exact row minima from a recomputation at the current length
        self.exact_len = np.full(count, -1, dtype=np.int64)
        self.exact_d = np.full(count, np.inf)
        self.exact_j = np.full(count, -1, dtype=np.int64)

    @property
    def count(self) -> int:
        return self.anchors.size


def valmod_run(series: SeriesRecord, lmin: int, lmax: int, k: int = 1,
               p: int = 50, exclusion: int | None = None, *,
               exclude_degenerate: bool = True, lb_mode: str = "derived",
               workers: int = 1, progress=None) -> ValmodResult:
    """Exact top-k motif pairs for every length in [lmin, lmax], plus the
    running length-normalized profile triple built from them.

    ``exclusion`` of None applies the default radius ceil(l/2) at every
    length; an integer fixes the radius across lengths. ``lb_mode`` selects
    the derived extension bound ("derived") or the always-zero fallback
    ("fallback": no pruning, same results).
    """
    n = series.length
    if lmin < 2 or lmin > lmax:
        raise ParameterError(f"need 2 <= lmin <= lmax; got lmin={lmin}, lmax={lmax}")
    if 2 * lmax > n:
        raise ParameterError(
            f"series too short: need |D| >= 2*lmax (|D|={n}, lmax={lmax})")
    if k < 1 or k > p:
        raise ParameterError(f"need 1 <= k <= p; got k={k}, p={p}")
    if exclusion is not None and exclusion < 1:
        raise ParameterError("exclusion radius must be >= 1")
    if lb_mode not in ("derived", "fallback"):
        raise ParameterError(f"unknown lb_mode {lb_mode!r}")

    def radius_at(length: int) -> int:
        return default_exclusion(length) if exclusion is None else int(exclusion)

    profs = _ProfileSet(series, lmin, p, exclude_degenerate,
                        derived_lb=(lb_mode == "derived"))
    base_profile = _build_base(profs, radius_at(lmin), workers)
    results = [_emit_base(base_profile, k, profs)]
    valmap = valmap_init(base_profile, lmax)
    for pair in results[0].pairs:
        valmap_update(valmap, pair)
    if progress is not None:
        progress(lmin)

    prev_stats = rolling_stats(series, lmin)
    for length in range(lmin + 1, lmax + 1):
        stats = rolling_stats(series, length)
        result = _advance_length(profs, length, radius_at(length), k,
                                 stats, prev_stats)
        prev_stats = stats
        results.append(result)
        for pair in result.pairs:
            valmap_update(valmap, pair)
        if progress is not None:
            progress(length)
    return ValmodResult(results=results, valmap=valmap)


def _selection_qerr(w: int, b_i: np.ndarray, b_max: float) -> np.ndarray:
    """Rounding bound on the base kernel's squared-correlation keys."""
    return _EPS * (64.0 + 8.0 * math.sqrt(w)) * (1.0 + np.abs(b_i) * b_max)


def _build_base(profs: _ProfileSet, radius: int, workers: int) -> MatrixProfile:
    """Full profiles at the base length: matrix profile plus pruning seeds."""
    series = profs.series
    m = profs.lmin
    stats = rolling_stats(series, m)
    deg = stats.degenerate
    if not profs.exclude_degenerate and deg.any():
        return _build_base_slow(profs, stats, radius)

    xc = profs.xc
    w = stats.count
    a, b = _coeffs(stats, profs.shift)
    ok = ~deg if profs.exclude_degenerate else np.ones(w, dtype=bool)
    qt_col0 = sliding_dot(xc, xc[:m])
    chunks = [(s, min(s + ROW_CHUNK, w)) for s in range(0, w, ROW_CHUNK)]

    def run(span):
        qt_start = sliding_dot(xc, xc[span[0]:span[0] + m]) if span[0] else qt_col0
        return _kernels.base_rows(xc, m, a, b, ok, radius, span[0], span[1],
                                  profs.p, qt_start, qt_col0)

    if workers <= 1 or len(chunks) <= 1:
        outs = [run(span) for span in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(run, chunks))

    best_j = np.concatenate([o[1] for o in outs])
    sel_j = np.concatenate([o[2] for o in outs], axis=0)
    sel_q = np.concatenate([o[3] for o in outs], axis=0)
    sel_n = np.concatenate([o[5] for o in outs])
    avail = np.concatenate([o[6] for o in outs])

    profs.base_mu[:] = stats.mu
    profs.base_sig[:] = stats.sigma
    profs.ent_j[:] = sel_j
    profs.ent_alive[:] = sel_j >= 0
    profs.ent_flag[:] = False
    if profs.exclude_degenerate and deg.any():
        profs.ent_alive[deg] = False
        profs.ent_j[deg] = -1
        sel_n = np.where(deg, 0, sel_n)
        avail = np.where(deg, 0, avail)

    # exact distances for everything that was kept, with the carried state
    # re-derived from them: the kernel's raw-dot values are selection keys
    # only and must not leak their conditioning error into stored state
    rows, cols = np.nonzero(profs.ent_alive)
    if rows.size:
        lefts = profs.anchors[rows]
        rights = profs.ent_j[rows, cols]
        d_exact = _direct_distances(profs.x, lefts, rights, m)
        qb = 1.0 - d_exact * d_exact / (2.0 * m)
        profs.ent_qb[rows, cols] = qb
        profs.ent_cov[rows, cols] = qb * m * stats.sigma[lefts] * stats.sigma[rights]
        profs.ent_d[rows, cols] = d_exact
    profs.ent_d[~profs.ent_alive] = np.inf

    # selection floor: the worst kept key plus the kernel's rounding margin
    # bounds every unstored candidate's correlation from above
    b_max = float(np.abs(b[ok]).max()) if ok.any() else 0.0
    qerr = _selection_qerr(w, b, b_max)
    worst_fast = np.where(sel_n > 0,
                          np.take_along_axis(
                              np.where(profs.ent_alive, sel_q, np.inf) ** 2,
                              np.maximum(sel_n - 1, 0)[:, None], axis=1)[:, 0],
                          0.0)
    has_unstored = avail > sel_n
    profs.worst_key = np.where(has_unstored, np.minimum(worst_fast, 1.0), -1.0)
    profs.key_err = qerr
    _reduce_profiles(profs, m, stats)

    # exact matrix profile for emission and the normalized-profile seed;
    # degenerate anchors are out of candidacy on this path, same as the
    # fixed-length computation
    mp = np.full(w, np.inf)
    ip = best_j.copy()
    found = best_j >= 0
    if deg.any():
        found &= ~deg
    rows2 = np.flatnonzero(found)
    if rows2.size:
        mp[rows2] = _direct_distances(series.values, rows2, best_j[rows2], m)
    noise = row_noise_bound(m, w, b, ok)
    for i in np.flatnonzero(np.isfinite(mp) & (mp < noise)):
        mp[i], ip[i] = _exact_row_min(series, stats, int(i), radius,
                                      profs.exclude_degenerate)
    ip[~np.isfinite(mp)] = -1
    return MatrixProfile(window=m, mp=mp, ip=ip, exclusion=radius, degenerate=deg)


def _build_base_slow(profs: _ProfileSet, stats, radius: int) -> MatrixProfile:
    """Row-at-a-time base build with constant-window conventions (rare path)."""
    series = profs.series
    m = profs.lmin
    w = stats.count
    deg = stats.degenerate
    mp = np.full(w, np.inf)
    ip = np.full(w, -1, dtype=np.int64)
    for i in range(w):
        d_row, q_row, cov_row = _row_fast(profs.x, stats, i, radius,
                                          profs.exclude_degenerate)
        mp[i], ip[i] = _exact_row_min(series, stats, i, radius,
                                      profs.exclude_degenerate, d_fast=d_row)
        _rebase_row(profs, i, m, d_row, q_row, cov_row, stats, deg)
    profs.base_mu[:] = stats.mu
    profs.base_sig[:] = stats.sigma
    _reduce_profiles(profs, m, stats)
    return MatrixProfile(window=m, mp=mp, ip=ip, exclusion=radius, degenerate=deg)


def _emit_base(profile: MatrixProfile, k: int, profs: _ProfileSet) -> LengthResult:
    pairs = topk_pairs(profile, k)
    finite = profile.mp[np.isfinite(profile.mp)]
    stats = PruneStats(length=profile.window, profiles_valid=int(profs.alive.sum()),
                       profiles_recomputed=0, profiles_expired=0,
                       min_lb_abs=math.inf,
                       smallest_min_dist=float(finite.min()) if finite.size else math.inf)
    return LengthResult(length=profile.window, pairs=pairs, stats=stats)


def _threshold_bounds(profs: _ProfileSet, length: int, stats) -> np.ndarray:
    """Per-profile lower bound on every unstored candidate's distance.

    Evaluates the extension bound at the selection-floor correlation. A
    profile that kept everything (worst_key < 0) gets +inf: nothing was
    dropped, its stored minimum is the row minimum outright.
    """
    if not profs.derived_lb:
        return np.where(profs.worst_key < 0, np.inf, 0.0)
    w = stats.count
    ai = np.clip(profs.anchors, 0, w - 1)
    mu_l = stats.mu[ai]
    sig_l = stats.sigma[ai]
    q_ceiling = np.sqrt(np.minimum(1.0, np.maximum(0.0, profs.worst_key)
                                   + profs.key_err))
    lb = extension_bound(q_ceiling, profs.base_len, profs.base_mu,
                         profs.base_sig, mu_l, sig_l, length)
    lb = np.asarray(lb)
    lb[profs.worst_key < 0] = np.inf
    return lb


def _reduce_profiles(profs: _ProfileSet, length: int, stats) -> None:
    """Refresh per-profile minDist / argmin / maxLB / validity."""
    alive = profs.ent_alive & profs.alive[:, None]
    d = np.where(alive, profs.ent_d, np.inf)
    profs.min_dist = d.min(axis=1)
    has = alive.any(axis=1)
    sentinel = np.iinfo(np.int64).max
    jm = np.where(alive & (d == profs.min_dist[:, None]), profs.ent_j, sentinel)
    profs.argmin_j = np.where(has, jm.min(axis=1), -1)
    profs.argmin_j[profs.argmin_j == sentinel] = -1
    profs.max_lb = _threshold_bounds(profs, length, stats)
    # strict inequality: the best stored exact distance must beat the floor
    # bound before dropped entries can be ruled out
    profs.valid = profs.alive & (profs.min_dist < profs.max_lb)
    # duplicate windows tie near zero: re-arbitrate those argmins exactly
    span = float(profs.x.max() - profs.x.min())
    tie_tol = zero_bound(stats, span)
    for i in np.flatnonzero(has & (profs.min_dist < tie_tol)):
        row = np.flatnonzero(alive[i] & (profs.ent_d[i] <= profs.min_dist[i] + tie_tol))
        if row.size <= 1:
            continue
        cand = np.sort(profs.ent_j[i, row])
        exact = _direct_distances(profs.x, np.full(cand.size, profs.anchors[i]),
                                  cand, length)
        profs.argmin_j[i] = int(cand[int(np.argmin(exact))])


def _advance_length(profs: _ProfileSet, length: int, radius: int, k: int,
                    stats, prev_stats) -> LengthResult:
    n = profs.n
    x = profs.x
    w = stats.count

    expired_now = profs.alive & (profs.anchors + length > n)
    profs.alive &= ~expired_now
    profs.exact_len[:] = -1

    alive2d = profs.ent_alive & profs.alive[:, None]
    j = profs.ent_j
    drop = alive2d & ((j + length > n) | (np.abs(profs.anchors[:, None] - j) < radius))
    profs.ent_alive &= ~drop
    alive2d &= ~drop

    # advance the centered cross moments by the trailing points (two-variable
    # Welford step with the previous length's means), then re-derive the
    # exact distances at this length
    jc = np.clip(j, 0, max(0, n - length))
    ai = np.clip(profs.anchors, 0, w - 1)
    mu_prev_i = prev_stats.mu[ai]
    mu_prev_j = prev_stats.mu[np.clip(jc, 0, prev_stats.count - 1)]
    tail_i = x[np.clip(profs.anchors + length - 1, 0, n - 1)][:, None] - mu_prev_i[:, None]
    tail_j = x[jc + length - 1] - mu_prev_j
    scale = (length - 1) / length
    profs.ent_cov = np.where(alive2d, profs.ent_cov + scale * tail_i * tail_j,
                             profs.ent_cov)

    sig_i = stats.sigma[ai]
    sig_j = stats.sigma[np.clip(jc, 0, w - 1)]
    denom = length * sig_i[:, None] * sig_j
    good = denom > 0
    q = np.where(good, profs.ent_cov / np.where(good, denom, 1.0), 0.0)
    d = np.sqrt(np.maximum(0.0, 2.0 * length * (1.0 - q)))
    both_deg = (sig_i[:, None] == 0.0) & (sig_j == 0.0)
    one_deg = ((sig_i[:, None] == 0.0) | (sig_j == 0.0)) & ~both_deg
    d = np.where(both_deg, 0.0, np.where(one_deg, math.sqrt(length), d))
    profs.ent_d = np.where(alive2d, d, np.inf)

    _reduce_profiles(profs, length, stats)

    # windows exit degeneracy monotonically as lengths grow; the moment any
    # does, candidates exist that no selection floor ever ranked, so no floor
    # can fence them this length. Force recomputation; rebases rebuild floors.
    if bool((prev_stats.degenerate[:w] & ~stats.degenerate).any()):
        profs.max_lb[:] = 0.0
        profs.valid[:] = False

    recomputed = 0
    while True:
        exact_now = profs.alive & (profs.exact_len == length)
        blocking = profs.alive & ~profs.valid & ~exact_now
        min_lb_abs = float(profs.max_lb[blocking].min()) if blocking.any() else math.inf

        cand = _known_candidates(profs, length, exact_now)
        certified = [c for c in cand if c[0] < min_lb_abs]
        smallest = min((float(profs.min_dist[profs.alive].min())
                        if profs.alive.any() else math.inf),
                       (float(profs.exact_d[exact_now].min())
                        if exact_now.any() else math.inf))
        if len(certified) >= k or not blocking.any():
            pairs = [MotifPair.make(l, r, length, d) for d, l, r in certified[:k]]
            stats_row = PruneStats(length=length,
                                   profiles_valid=int(profs.valid.sum()),
                                   profiles_recomputed=recomputed,
                                   profiles_expired=int(expired_now.sum()),
                                   min_lb_abs=min_lb_abs,
                                   smallest_min_dist=float(smallest))
            return LengthResult(length=length, pairs=pairs, stats=stats_row)

        # only profiles whose floor bound is below the best exact distance
        # seen can still hide something better
        sel = blocking & (profs.max_lb < smallest)
        if not sel.any():
            # widen to the profiles that could still displace the k-th known
            # candidate; required when exact ties stall the primary rule
            kth = cand[k - 1][0] if len(cand) >= k else math.inf
            sel = blocking & (profs.max_lb <= kth)
        if not sel.any():
            raise EngineError("certification stalled with blocking profiles")
        for i in np.flatnonzero(sel):
            _recompute_profile(profs, int(i), length, stats, radius)
            recomputed += 1


def _known_candidates(profs: _ProfileSet, length: int,
                      exact_now: np.ndarray) -> list[tuple[float, int, int]]:
    """Exactly-known row minima as deduplicated canonical pairs, sorted.

    Sources: valid profiles (their stored minimum is the row minimum) and
    profiles recomputed at this length. Distances are recomputed directly so
    emitted values are exact and ordering matches the naive reference.
    """
    lefts: list[int] = []
    rights: list[int] = []
    use = (profs.valid | exact_now) & profs.alive
    for i in np.flatnonzero(use):
        ji = int(profs.exact_j[i]) if exact_now[i] else int(profs.argmin_j[i])
        if ji < 0:
            continue
        lefts.append(int(profs.anchors[i]))
        rights.append(ji)
    if not lefts:
        return []
    la = np.asarray(lefts, dtype=np.int64)
    ra = np.asarray(rights, dtype=np.int64)
    exact = _direct_distances(profs.x, la, ra, length)
    seen: dict[tuple[int, int], float] = {}
    for dv, i, j2 in zip(exact, la, ra):
        key = (int(i), int(j2)) if i < j2 else (int(j2), int(i))
        if key not in seen or dv < seen[key]:
            seen[key] = float(dv)
    return sorted((d, lr[0], lr[1]) for lr, d in seen.items())


def _recompute_profile(profs: _ProfileSet, idx: int, length: int, stats,
                       radius: int) -> None:
    """Full distance profile for one anchor at the current length; rebase."""
    i = int(profs.anchors[idx])
    if profs.exclude_degenerate and stats.degenerate[i]:
        # the anchor itself is out of candidacy at this length: exact, empty
        w = stats.count
        d_row = np.full(w, np.inf)
        q_row = np.zeros(w)
        cov_row = np.zeros(w)
        exact_d, exact_j = math.inf, -1
    else:
        d_row, q_row, cov_row = _row_fast(profs.x, stats, i, radius,
                                          profs.exclude_degenerate)
        exact_d, exact_j = _exact_row_min(profs.series, stats, i, radius,
                                          profs.exclude_degenerate, d_fast=d_row)
    _rebase_row(profs, idx, length, d_row, q_row, cov_row, stats,
                stats.degenerate)
    profs.exact_len[idx] = length
    profs.exact_d[idx] = exact_d
    profs.exact_j[idx] = exact_j
    _reduce_one(profs, idx, length, stats)


def _rebase_row(profs: _ProfileSet, idx: int, length: int, d_row, q_row,
                cov_row, stats, deg_mask) -> None:
    """Reset one profile to fresh top-p entries selected at ``length``."""
    valid = np.isfinite(d_row)
    profs.ent_alive[idx] = False
    profs.ent_j[idx] = -1
    profs.ent_d[idx] = np.inf
    i = int(profs.anchors[idx])
    profs.base_len[idx] = length
    profs.base_mu[idx] = float(stats.mu[i])
    profs.base_sig[idx] = float(stats.sigma[i])
    cand = np.flatnonzero(valid)
    keys = np.maximum(q_row[cand], 0.0) ** 2 if cand.size else np.empty(0)
    if cand.size:
        order = np.lexsort((cand, -keys))
        take = cand[order[:profs.p]]
        cnt = take.size
        profs.ent_j[idx, :cnt] = take
        flags = bool(deg_mask[i]) | deg_mask[take]
        profs.ent_flag[idx, :cnt] = flags
        # store direct distances and re-derive the carried state from them:
        # the row pass selects well, but its values drift on ill-conditioned
        # windows and the carried correlations must not inherit that
        d_exact = _direct_distances(profs.x, np.full(cnt, i), take, length)
        qb = 1.0 - d_exact * d_exact / (2.0 * length)
        sig_j = stats.sigma[take]
        profs.ent_qb[idx, :cnt] = qb
        profs.ent_cov[idx, :cnt] = np.where(
            flags, 0.0, qb * length * float(stats.sigma[i]) * sig_j)
        profs.ent_d[idx, :cnt] = d_exact
        profs.ent_alive[idx, :cnt] = True
        if cand.size > cnt:
            span = float(profs.x.max() - profs.x.min())
            sig_ok = stats.sigma[stats.sigma > 0]
            sig_min = float(sig_ok.min()) if sig_ok.size else 1.0
            profs.worst_key[idx] = min(1.0, float(keys[order[cnt - 1]]))
            profs.key_err[idx] = 1024.0 * _EPS * (1.0 + span / sig_min)
        else:
            profs.worst_key[idx] = -1.0
            profs.key_err[idx] = 0.0
    else:
        profs.worst_key[idx] = -1.0
        profs.key_err[idx] = 0.0


def _reduce_one(profs: _ProfileSet, idx: int, length: int, stats) -> None:
    alive = profs.ent_alive[idx]
    if profs.worst_key[idx] < 0:
        max_lb = math.inf
    elif not profs.derived_lb:
        max_lb = 0.0
    else:
        w = stats.count
        i = min(int(profs.anchors[idx]), w - 1)
        q_ceiling = math.sqrt(min(1.0, max(0.0, float(profs.worst_key[idx]))
                                  + float(profs.key_err[idx])))
        max_lb = float(extension_bound(
            q_ceiling, int(profs.base_len[idx]), float(profs.base_mu[idx]),
            float(profs.base_sig[idx]), float(stats.mu[i]),
            float(stats.sigma[i]), length))
    profs.max_lb[idx] = max_lb
    if not alive.any():
        profs.min_dist[idx] = math.inf
        profs.argmin_j[idx] = -1
        profs.valid[idx] = bool(profs.alive[idx] and math.inf < max_lb)
        return
    d = np.where(alive, profs.ent_d[idx], np.inf)
    profs.min_dist[idx] = float(d.min())
    jm = np.where(alive & (d == profs.min_dist[idx]), profs.ent_j[idx],
                  np.iinfo(np.int64).max)
    profs.argmin_j[idx] = int(jm.min())
    profs.valid[idx] = bool(profs.alive[idx] and profs.min_dist[idx] < max_lb)
