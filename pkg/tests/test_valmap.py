import math

import numpy as np
import pytest

from valmod import (
    MotifPair,
    ParameterError,
    length_normalized,
    make_series,
    matrix_profile,
    planted_walk,
    valmap_at,
    valmap_init,
    valmap_update,
    valmod_run,
)


class TestLengthNormalized:
    def test_zero(self):
        for length in (1, 7, 400):
            assert length_normalized(0.0, length) == 0.0

    def test_arithmetic(self):
        assert length_normalized(4.0, 4) == pytest.approx(2.0, abs=1e-15)
        assert length_normalized(2 * math.sqrt(2), 2) == pytest.approx(2.0, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ParameterError):
            length_normalized(-1.0, 4)
        with pytest.raises(ParameterError):
            length_normalized(1.0, 0)


class TestValmapInit:
    def test_arithmetic(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(64)))
        profile = matrix_profile(s, 4)
        vm = valmap_init(profile, 10)
        assert vm.size == s.length - 4 + 1
        assert np.allclose(vm.mpn, profile.mp * math.sqrt(1 / 4), atol=1e-12)
        assert (vm.lp == 4).all()
        assert vm.checkpoints == []

    def test_small_example(self):
        # mp [2, 4] at base 4 normalizes to [1, 2] with a flat length profile
        s = make_series(np.arange(8.0))
        profile = matrix_profile(s, 4)
        vm = valmap_init(profile, 4)
        finite = np.isfinite(vm.mpn)
        assert np.allclose(vm.mpn[finite],
                           profile.mp[finite] * math.sqrt(0.25), atol=1e-12)


class TestValmapUpdate:
    def _fresh(self, rng, lmax=20):
        s = make_series(np.cumsum(rng.standard_normal(128)))
        return valmap_init(matrix_profile(s, 8), lmax)

    def test_improvement_applied(self, rng):
        vm = self._fresh(rng)
        i = 5
        target = float(vm.mpn[i]) * 0.5
        d = target / math.sqrt(1 / 12)
        pair = MotifPair.make(i, 60, 12, d)
        valmap_update(vm, pair)
        assert vm.mpn[i] == pytest.approx(target, abs=1e-12)
        assert vm.ip[i] == 60
        assert vm.lp[i] == 12
        assert len(vm.checkpoints) == 1
        cp = vm.checkpoints[0]
        assert (cp.length, cp.offset, cp.new_lp) == (12, i, 12)

    def test_tie_is_not_an_improvement(self, rng):
        vm = self._fresh(rng)
        i = 7
        d = float(vm.mpn[i]) / math.sqrt(1 / 10)
        valmap_update(vm, MotifPair.make(i, 70, 10, d))
        assert len(vm.checkpoints) == 0
        assert vm.lp[i] == 8

    def test_keyed_on_left_offset_only(self, rng):
        vm = self._fresh(rng)
        before_right = float(vm.mpn[90])
        pair = MotifPair.make(90, 4, 12, 1e-6)  # canonical left becomes 4
        valmap_update(vm, pair)
        assert vm.mpn[4] == pytest.approx(pair.norm_distance)
        assert vm.mpn[90] == before_right

    def test_out_of_range_offset_is_engine_error(self, rng):
        vm = self._fresh(rng)
        from valmod import EngineError
        with pytest.raises(EngineError):
            valmap_update(vm, MotifPair(left=10_000, right=10_060, length=10,
                                        distance=0.1,
                                        norm_distance=length_normalized(0.1, 10)))


class TestReplayAndSnapshots:
    def test_replay_reproduces_final(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(360)))
        res = valmod_run(s, 8, 18, k=3, p=10)
        base = matrix_profile(s, 8)
        replay = valmap_init(base, 18)
        for r in res.results:
            for p in r.pairs:
                valmap_update(replay, p)
        assert np.array_equal(replay.mpn, res.valmap.mpn)
        assert np.array_equal(replay.ip, res.valmap.ip)
        assert np.array_equal(replay.lp, res.valmap.lp)
        assert replay.checkpoints == res.valmap.checkpoints

    def test_snapshot_at_lmin_is_init(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(300)))
        res = valmod_run(s, 8, 16, k=2, p=8)
        snap = valmap_at(res.valmap, 8)
        base = valmap_init(matrix_profile(s, 8), 16)
        assert np.array_equal(snap.mpn, base.mpn)
        assert (snap.lp == 8).all()
        assert snap.checkpoints == []

    def test_snapshot_at_lmax_is_final(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(300)))
        res = valmod_run(s, 8, 16, k=2, p=8)
        snap = valmap_at(res.valmap, 16)
        assert np.array_equal(snap.mpn, res.valmap.mpn)
        assert np.array_equal(snap.lp, res.valmap.lp)
        assert snap.checkpoints == res.valmap.checkpoints

    def test_snapshot_equals_truncated_run(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(300)))
        res = valmod_run(s, 8, 16, k=2, p=8)
        for view in (9, 11, 14):
            snap = valmap_at(res.valmap, view)
            truncated = valmod_run(s, 8, view, k=2, p=8)
            assert np.array_equal(snap.mpn, truncated.valmap.mpn), view
            assert np.array_equal(snap.ip, truncated.valmap.ip)
            assert np.array_equal(snap.lp, truncated.valmap.lp)

    def test_snapshot_view_bounds(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(200)))
        res = valmod_run(s, 8, 12, k=1, p=5)
        with pytest.raises(ParameterError):
            valmap_at(res.valmap, 7)
        with pytest.raises(ParameterError):
            valmap_at(res.valmap, 13)


class TestLogInvariants:
    def test_log_sorted_and_strictly_improving(self):
        s, _ = planted_walk(1500, 48, plant_count=3, noise=0.02, seed=21)
        res = valmod_run(s, 40, 56, k=3, p=10)
        log = res.valmap.checkpoints
        assert [c.length for c in log] == sorted(c.length for c in log)
        per_offset: dict[int, list[float]] = {}
        for c in log:
            per_offset.setdefault(c.offset, []).append((c.old_dn, c.new_dn))
        for offset, steps in per_offset.items():
            for old, new in steps:
                assert new < old
            news = [new for _, new in steps]
            assert news == sorted(news, reverse=True)

    def test_mpn_never_increases(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(400)))
        res = valmod_run(s, 10, 20, k=3, p=10)
        prev = valmap_at(res.valmap, 10).mpn
        for view in range(11, 21):
            cur = valmap_at(res.valmap, view).mpn
            assert (cur <= prev + 1e-15).all()
            prev = cur

    def test_lp_names_last_improvement(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(400)))
        res = valmod_run(s, 10, 20, k=3, p=10)
        vm = res.valmap
        last: dict[int, int] = {}
        for c in vm.checkpoints:
            last[c.offset] = c.new_lp
        for i in range(vm.size):
            assert vm.lp[i] == last.get(i, 10)
