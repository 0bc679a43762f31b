"""Motif-set expansion: every subsequence similar to a chosen motif pair."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distance import (
    MotifPair,
    _direct_distances,
    _row_fast,
    default_exclusion,
    near_zero_tol,
)
from .errors import ParameterError
from .series import SeriesRecord, rolling_stats

# keeps zero-distance seed pairs expandable: the radius never collapses to 0
EPSILON_FLOOR = 1e-9


@dataclass(frozen=True)
class MotifSetMember:
    offset: int
    distance: float


@dataclass(frozen=True)
class MotifSet:
    """A seed pair with every window within radius of either seed.

    Members are sorted by distance to the nearest seed (seeds first at 0.0)
    and are pairwise non-overlapping under the exclusion radius thanks to
    greedy admission in distance order.
    """

    pair: MotifPair
    radius: float
    members: list[MotifSetMember]
    exclusion: int

    @property
    def offsets(self) -> list[int]:
        return [m.offset for m in self.members]


def expand(series: SeriesRecord, pair: MotifPair, radius_factor: float = 2.0,
           exclusion: int | None = None,
           exclude_degenerate: bool = True) -> MotifSet:
    """Grow a motif pair into its motif set.

    The admission radius is ``radius_factor * max(pair distance, epsilon)``;
    candidate windows are scanned against both seeds' distance profiles,
    then admitted greedily in (distance, offset) order with exclusion-zone
    suppression against everything already admitted.
    """
    if radius_factor <= 0:
        raise ParameterError("radius_factor must be > 0")
    length = pair.length
    if length < 2 or pair.left < 0 or pair.right + length > series.length:
        raise ParameterError(f"pair {pair.left, pair.right} at length {length} "
                             f"invalid for series of {series.length}")
    radius_ex = default_exclusion(length) if exclusion is None else int(exclusion)
    if radius_ex < 1:
        raise ParameterError("exclusion radius must be >= 1")

    stats = rolling_stats(series, length)
    r = radius_factor * max(pair.distance, EPSILON_FLOOR)
    d_left, _, _ = _row_fast(series.values, stats, pair.left, radius_ex,
                             exclude_degenerate)
    d_right, _, _ = _row_fast(series.values, stats, pair.right, radius_ex,
                              exclude_degenerate)
    # exclusion zones only guard against trivial self-matches; the opposite
    # seed must stay visible to each profile
    near = np.minimum(d_left, d_right)
    # the scan uses fast distances; collect with slack for their noise floor,
    # membership is decided on the directly recomputed values below
    cand = np.flatnonzero(near <= r + near_zero_tol(length))
    cand = cand[(cand != pair.left) & (cand != pair.right)]
    if cand.size:
        exact = np.minimum(
            _direct_distances(series.values, np.full(cand.size, pair.left), cand, length),
            _direct_distances(series.values, np.full(cand.size, pair.right), cand, length))
        keep = exact <= r
        cand, exact = cand[keep], exact[keep]
    else:
        exact = np.empty(0)

    members = [MotifSetMember(pair.left, 0.0), MotifSetMember(pair.right, 0.0)]
    admitted = [pair.left, pair.right]
    order = np.lexsort((cand, exact))
    for idx in order:
        off = int(cand[idx])
        if all(abs(off - got) >= radius_ex for got in admitted):
            members.append(MotifSetMember(off, float(exact[idx])))
            admitted.append(off)
    members.sort(key=lambda mm: (mm.distance, mm.offset))
    return MotifSet(pair=pair, radius=float(r), members=members,
                    exclusion=radius_ex)
