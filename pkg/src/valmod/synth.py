"""Synthetic series with planted motifs, for demos and tests.

A random walk carries a configurable number of copies of one prototype
window. Copies are level-shifted to the walk at their insertion point
(z-normalized distances ignore constant shifts, so identical copies still
match at exactly zero) and may carry independent additive noise. Everything
is deterministic per seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .series import SeriesRecord, make_series


def planted_walk(n: int, plant_length: int, plant_count: int = 2,
                 noise: float = 0.0, seed: int = 0,
                 offsets: list[int] | None = None,
                 step_std: float = 1.0, name: str = "synthetic") -> tuple[SeriesRecord, list[int]]:
    """Random-walk series with planted prototype copies; returns (series, offsets).

    The prototype is itself a random-walk segment, so its windows gain
    variance with length and the best normalized match concentrates at the
    plant length. ``offsets`` defaults to even spacing with at least one
    plant length of gap.
    """
    if n < 4 or plant_length < 2 or plant_length > n // 2:
        raise ParameterError(
            f"need n >= 4 and 2 <= plant_length <= n/2; got n={n}, plant={plant_length}")
    if plant_count < 1:
        raise ParameterError("plant_count must be >= 1")
    rng = np.random.default_rng(seed)
    values = np.cumsum(rng.normal(0.0, step_std, n))
    prototype = np.cumsum(rng.normal(0.0, step_std, plant_length))

    if offsets is None:
        gap = (n - plant_count * plant_length) // (plant_count + 1)
        if gap < plant_length:
            raise ParameterError(
                f"{plant_count} plants of {plant_length} do not fit in {n} points")
        offsets = [gap + i * (plant_length + gap) for i in range(plant_count)]
    for off in offsets:
        if off < 0 or off + plant_length > n:
            raise ParameterError(f"plant offset {off} out of bounds")
    for a, b in zip(sorted(offsets), sorted(offsets)[1:]):
        if b - a < plant_length:
            raise ParameterError(f"plant offsets {a} and {b} overlap")

    for off in offsets:
        copy = prototype - prototype[0] + values[off]
        if noise > 0:
            copy = copy + rng.normal(0.0, noise, plant_length)
        values[off:off + plant_length] = copy
    series = make_series(values, name=name,
                         source=f"planted_walk(n={n}, plant={plant_length}, "
                                f"copies={plant_count}, noise={noise}, seed={seed})")
    return series, list(offsets)
