import numpy as np
import pytest

import oracles
from valmod import (
    MotifPair,
    ParameterError,
    expand,
    make_series,
    pair_distance,
    planted_walk,
)


def pair_for(series, left, right, length):
    return MotifPair.make(left, right, length, pair_distance(series, left, right, length))


class TestExpand:
    def test_planted_triple_found(self):
        s, offs = planted_walk(2000, 48, plant_count=3, seed=13)
        pair = pair_for(s, offs[0], offs[1], 48)
        mset = expand(s, pair, radius_factor=2.0)
        assert offs[2] in mset.offsets
        third = next(m for m in mset.members if m.offset == offs[2])
        assert third.distance < 1e-6
        assert {offs[0], offs[1]} <= set(mset.offsets)

    def test_tiny_radius_keeps_only_seeds(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(500)))
        pair = pair_for(s, 20, 300, 24)
        mset = expand(s, pair, radius_factor=1e-9)
        assert mset.offsets == sorted([20, 300])

    def test_matches_scan_oracle(self, rng):
        x = np.cumsum(rng.standard_normal(600))
        s = make_series(x)
        pair = pair_for(s, 50, 400, 20)
        mset = expand(s, pair, radius_factor=2.0)
        radius = (20 + 1) // 2
        expect = oracles.motifset_members(x, 20, 50, 400, mset.radius, radius)
        got = sorted((m.distance, m.offset) for m in mset.members)
        assert [o for _, o in got] == [o for _, o in expect]
        for (dg, _), (de, _) in zip(got, expect):
            assert dg == pytest.approx(de, abs=1e-8)

    def test_members_sorted_and_spaced(self, rng):
        s, offs = planted_walk(3000, 32, plant_count=5, noise=0.05, seed=17)
        pair = pair_for(s, offs[0], offs[1], 32)
        mset = expand(s, pair, radius_factor=3.0)
        dists = [m.distance for m in mset.members]
        assert dists == sorted(dists)
        offsets = mset.offsets
        for a in range(len(offsets)):
            for b in range(a + 1, len(offsets)):
                assert abs(offsets[a] - offsets[b]) >= mset.exclusion

    def test_deterministic(self, rng):
        s, offs = planted_walk(1500, 40, plant_count=3, noise=0.01, seed=29)
        pair = pair_for(s, offs[0], offs[1], 40)
        a = expand(s, pair, radius_factor=2.5)
        b = expand(s, pair, radius_factor=2.5)
        assert [(m.offset, m.distance) for m in a.members] == \
            [(m.offset, m.distance) for m in b.members]

    def test_zero_distance_seed_still_expands(self):
        s, offs = planted_walk(2000, 48, plant_count=3, seed=13)
        pair = pair_for(s, offs[0], offs[1], 48)
        assert pair.distance < 1e-9  # identical copies
        mset = expand(s, pair, radius_factor=2.0)
        assert len(mset.members) >= 3  # epsilon floor keeps the radius open

    def test_validation(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(200)))
        pair = pair_for(s, 10, 100, 16)
        with pytest.raises(ParameterError):
            expand(s, pair, radius_factor=0.0)
        bad = MotifPair(left=10, right=195, length=16, distance=1.0,
                        norm_distance=0.25)
        with pytest.raises(ParameterError):
            expand(s, bad, radius_factor=2.0)
