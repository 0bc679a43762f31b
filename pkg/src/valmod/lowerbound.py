"""Admissible lower bounds on z-normalized distances of extended subsequences.

Given the true distance between two windows at a base length, these bounds
stay below the true distance at every longer length while needing only O(1)
work per length step. They are obtained by maximizing the correlation the
candidate could still achieve at the longer length over every possible
continuation of it, which leaves the bound a function of the anchor's
statistics and the base correlation only. Consequences relied on elsewhere:

- admissibility: bound <= true distance at every covered length;
- rank preservation: within one anchor's profile the bound orders entries
  by positive base correlation (anti-correlated entries tie), identically
  at every target length.

Entries flagged degenerate (a constant window on either side at base) pin
their bound to 0, which is trivially admissible and never prunes wrongly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .series import RollingStats, SeriesRecord


@dataclass(frozen=True)
class LbEntry:
    """One (anchor, candidate) pair carried across lengths.

    Stores the base correlation, the anchor's base statistics, and a running
    centered cross moment (with the current window means) so both the bound
    and the exact distance advance in O(1) per trailing point. The centered
    form stays accurate when window means dwarf window sigmas, where a raw
    dot product loses the correlation to cancellation.
    """

    anchor: int
    candidate: int
    base_length: int
    base_q: float
    base_mu: float
    base_sigma: float
    cov: float
    mu_i: float
    mu_j: float
    length: int
    distance: float
    lb: float
    degenerate: bool = False
    expired: bool = False

    @property
    def rank_key(self) -> tuple[int, float, int]:
        # orders by bound ascending at every length: pinned zeros first, then
        # decreasing positive base correlation, offset as the final tie-break
        # (anti-correlated entries share one bound value, so they tie)
        if self.degenerate:
            return (0, 0.0, self.candidate)
        qp = max(self.base_q, 0.0)
        return (1, -qp * qp, self.candidate)


def extension_bound(base_q, base_length, base_mu, base_sigma, mu, sigma, length):
    """Lower bound at ``length`` >= ``base_length``; broadcasts over arrays.

    ``mu``/``sigma`` are the anchor's statistics at the target length,
    ``base_*`` those at the base length. Degenerate anchors (sigma == 0)
    get 0. Admissibility: the candidate's continuation is adversarial, so the
    true correlation can never exceed the maximized one; the candidate prefix
    enters through a strictly positive scale, hence negative base correlations
    contribute nothing the adversary could exploit.
    """
    base_q = np.asarray(base_q, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    safe = np.where(sigma > 0, sigma, 1.0)
    dm = base_mu - mu
    k = base_length * np.maximum(base_q, 0.0) * base_sigma / safe
    s = base_length * dm / safe
    w2 = k * k + s * s
    u2 = np.maximum(0.0, length - base_length * (base_sigma ** 2 + dm * dm) / (safe * safe))
    qmax = np.sqrt(w2 / (length * base_length) + u2 / length)
    # identical pairs put qmax exactly at 1; the guard keeps rounding noise
    # (here and in the caller's base correlation) from surfacing as a
    # positive bound on a zero distance. Shrinking the bound is always safe.
    out = np.sqrt(2.0 * length * np.maximum(0.0, 1.0 - qmax - 1e-10))
    out = np.where(sigma > 0, out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def lb_init(series: SeriesRecord, stats: RollingStats, i: int, j: int,
            distance: float) -> LbEntry:
    """Seed an entry from the exact base distance between windows i and j."""
    m = stats.window
    n = series.length
    if i + m > n or j + m > n:
        raise ParameterError("window exceeds series bounds")
    q = 1.0 - distance * distance / (2.0 * m)
    degenerate = bool(stats.degenerate[i] or stats.degenerate[j])
    x = series.values
    mu_i = float(stats.mu[i])
    mu_j = float(stats.mu[j])
    cov = float(np.dot(x[i:i + m] - mu_i, x[j:j + m] - mu_j))
    if degenerate:
        lb = 0.0
    else:
        lb = extension_bound(q, m, mu_i, float(stats.sigma[i]),
                             mu_i, float(stats.sigma[i]), m)
    return LbEntry(anchor=i, candidate=j, base_length=m, base_q=q,
                   base_mu=mu_i, base_sigma=float(stats.sigma[i]),
                   cov=cov, mu_i=mu_i, mu_j=mu_j, length=m,
                   distance=float(distance), lb=min(lb, float(distance)),
                   degenerate=degenerate)


def lb_update(entry: LbEntry, series: SeriesRecord, stats: RollingStats) -> LbEntry:
    """Advance one length step using the trailing points; O(1).

    ``stats`` must be built for ``entry.length + 1``. The candidate expiring
    past the end of the series marks the entry expired; expired entries keep
    their last values and must be ignored by consumers.
    """
    length = entry.length + 1
    if stats.window != length:
        raise ParameterError(f"stats built for {stats.window}, expected {length}")
    if entry.expired:
        return entry
    n = series.length
    i, j = entry.anchor, entry.candidate
    if j + length > n or i + length > n:
        return replace(entry, expired=True)
    x = series.values
    # two-variable Welford step: prior means center the trailing points
    scale = (length - 1) / length
    cov = entry.cov + scale * float((x[i + length - 1] - entry.mu_i)
                                    * (x[j + length - 1] - entry.mu_j))
    sig_i = float(stats.sigma[i])
    sig_j = float(stats.sigma[j])
    distance = _exact_distance(cov, length, sig_i, sig_j)
    if entry.degenerate or sig_i == 0.0:
        lb = 0.0
    else:
        lb = extension_bound(entry.base_q, entry.base_length, entry.base_mu,
                             entry.base_sigma, float(stats.mu[i]), sig_i, length)
    return replace(entry, cov=cov, mu_i=float(stats.mu[i]), mu_j=float(stats.mu[j]),
                   length=length, distance=distance, lb=lb)


def _exact_distance(cov: float, length: int, sig_i: float, sig_j: float) -> float:
    if sig_i == 0.0 and sig_j == 0.0:
        return 0.0
    if sig_i == 0.0 or sig_j == 0.0:
        return math.sqrt(length)
    q = cov / (length * sig_i * sig_j)
    return math.sqrt(max(0.0, 2.0 * length * (1.0 - q)))


def lb_rank(entries: list[LbEntry]) -> list[LbEntry]:
    """Total order by bound value, offset tie-break; identical at every length."""
    return sorted(entries, key=lambda e: e.rank_key)


def admissibility_report(series: SeriesRecord, base_length: int,
                         extensions: int, anchor_step: int = 1,
                         candidate_step: int = 1, tolerance: float = 1e-9) -> dict:
    """Brute-force audit of the bound against true distances.

    Walks every (anchor, candidate) pair on the given strides from the base
    length through ``base_length + extensions``, comparing the maintained
    bound to the directly computed distance. Returns counts and the worst
    slack; a positive violation count means the derived bound must not be
    used for pruning on this data.
    """
    from .distance import pair_distance
    from .series import rolling_stats

    n = series.length
    base_stats = rolling_stats(series, base_length)
    checks = violations = 0
    worst = -math.inf
    rows = []
    entries = []
    for i in range(0, n - base_length - extensions + 1, anchor_step):
        for j in range(0, n - base_length - extensions + 1, candidate_step):
            if abs(i - j) < base_length:
                continue
            d = pair_distance(series, i, j, base_length)
            entries.append(lb_init(series, base_stats, i, j, d))
    for step in range(extensions + 1):
        length = base_length + step
        if step > 0:
            stats = rolling_stats(series, length)
            entries = [lb_update(e, series, stats) for e in entries]
        for e in entries:
            if e.expired:
                continue
            true_d = pair_distance(series, e.anchor, e.candidate, length)
            slack = e.lb - true_d
            checks += 1
            worst = max(worst, slack)
            if slack > tolerance:
                violations += 1
                rows.append((e.anchor, e.candidate, length, e.lb, true_d))
    return {"checks": checks, "violations": violations, "worst_slack": worst,
            "violating_rows": rows}


def dump_admissibility(series: SeriesRecord, base_length: int, extensions: int,
                       path: str, anchor_step: int = 4, candidate_step: int = 4) -> None:
    """Write (i, j, length, lb, d_true) rows for offline inspection."""
    from .distance import pair_distance
    from .series import rolling_stats

    n = series.length
    base_stats = rolling_stats(series, base_length)
    entries = []
    for i in range(0, n - base_length - extensions + 1, anchor_step):
        for j in range(0, n - base_length - extensions + 1, candidate_step):
            if abs(i - j) < base_length:
                continue
            d = pair_distance(series, i, j, base_length)
            entries.append(lb_init(series, base_stats, i, j, d))
    with open(path, "w") as fh:
        fh.write("i,j,length,lb,d_true\n")
        for step in range(extensions + 1):
            length = base_length + step
            if step > 0:
                stats = rolling_stats(series, length)
                entries = [lb_update(e, series, stats) for e in entries]
            for e in entries:
                if e.expired:
                    continue
                true_d = pair_distance(series, e.anchor, e.candidate, length)
                fh.write(f"{e.anchor},{e.candidate},{length},{e.lb!r},{true_d!r}\n")
