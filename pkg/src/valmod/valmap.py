"""Length-normalized best-match bookkeeping across a range of lengths.

The triple (normalized profile, index profile, length profile) starts as the
normalized fixed-length matrix profile at the smallest length with a flat
length profile, then absorbs every emitted top-k pair of every length: a pair
improves the entry at its left offset when its length-normalized distance is
strictly smaller. Each improvement appends one checkpoint, which lets any
intermediate state be replayed without recomputation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distance import MatrixProfile, MotifPair
from .errors import EngineError, ParameterError


def length_normalized(distance: float, length: int) -> float:
    """Scale a distance by sqrt(1/length) so different lengths compare."""
    if distance < 0:
        raise ParameterError("distance must be >= 0")
    if length < 1:
        raise ParameterError("length must be >= 1")
    return distance * math.sqrt(1.0 / length)


@dataclass(frozen=True)
class Checkpoint:
    """One recorded improvement of the normalized profile."""

    length: int
    offset: int
    old_dn: float
    new_dn: float
    new_ip: int
    new_lp: int


@dataclass(frozen=True)
class ValmapSnapshot:
    """State as of a view length: arrays plus the checkpoints applied."""

    lmin: int
    lmax: int
    view_length: int
    mpn: np.ndarray
    ip: np.ndarray
    lp: np.ndarray
    checkpoints: list[Checkpoint]


@dataclass
class Valmap:
    lmin: int
    lmax: int
    mpn: np.ndarray
    ip: np.ndarray
    lp: np.ndarray
    checkpoints: list[Checkpoint] = field(default_factory=list)
    _base_mpn: np.ndarray = None
    _base_ip: np.ndarray = None

    @property
    def size(self) -> int:
        return self.mpn.shape[0]


def valmap_init(profile: MatrixProfile, lmax: int) -> Valmap:
    """Seed from the base matrix profile: normalized values, flat lengths."""
    lmin = profile.window
    if lmax < lmin:
        raise ParameterError(f"lmax {lmax} below base length {lmin}")
    mpn = profile.mp * math.sqrt(1.0 / lmin)
    ip = profile.ip.astype(np.int64).copy()
    lp = np.full(mpn.shape[0], lmin, dtype=np.int64)
    return Valmap(lmin=lmin, lmax=lmax, mpn=mpn.copy(), ip=ip.copy(), lp=lp,
                  checkpoints=[], _base_mpn=mpn.copy(), _base_ip=ip.copy())


def valmap_update(valmap: Valmap, pair: MotifPair) -> Valmap:
    """Apply one emitted pair, keyed on its left offset; strict improvement only.

    Pairs must arrive in nondecreasing length order, rank order within a
    length; the caller (the discovery run) guarantees that.
    """
    i = pair.left
    if i < 0 or i >= valmap.size:
        raise EngineError(f"pair left offset {i} outside profile of {valmap.size}")
    if not (valmap.lmin <= pair.length <= valmap.lmax):
        raise EngineError(f"pair length {pair.length} outside "
                          f"[{valmap.lmin}, {valmap.lmax}]")
    dn = pair.norm_distance
    if dn < valmap.mpn[i]:
        valmap.checkpoints.append(Checkpoint(
            length=pair.length, offset=i, old_dn=float(valmap.mpn[i]),
            new_dn=dn, new_ip=pair.right, new_lp=pair.length))
        valmap.mpn[i] = dn
        valmap.ip[i] = pair.right
        valmap.lp[i] = pair.length
    return valmap


def valmap_at(valmap: Valmap, view_length: int) -> ValmapSnapshot:
    """Replay checkpoints up to a view length; no recomputation."""
    if not (valmap.lmin <= view_length <= valmap.lmax):
        raise ParameterError(
            f"view length {view_length} outside [{valmap.lmin}, {valmap.lmax}]")
    mpn = valmap._base_mpn.copy()
    ip = valmap._base_ip.copy()
    lp = np.full(valmap.size, valmap.lmin, dtype=np.int64)
    applied = []
    for cp in valmap.checkpoints:
        if cp.length > view_length:
            break  # the log is sorted by length
        mpn[cp.offset] = cp.new_dn
        ip[cp.offset] = cp.new_ip
        lp[cp.offset] = cp.new_lp
        applied.append(cp)
    return ValmapSnapshot(lmin=valmap.lmin, lmax=valmap.lmax,
                          view_length=view_length, mpn=mpn, ip=ip, lp=lp,
                          checkpoints=applied)
