import math

import numpy as np
import pytest

import oracles
from valmod import (
    lb_init,
    lb_rank,
    lb_update,
    make_series,
    pair_distance,
    rolling_stats,
)
from valmod.lowerbound import admissibility_report, dump_admissibility


def entries_for_anchor(series, base_len, anchor, step=1):
    stats = rolling_stats(series, base_len)
    out = []
    horizon = series.length - base_len - 24
    for j in range(0, horizon, step):
        if abs(anchor - j) < base_len:
            continue
        d = pair_distance(series, anchor, j, base_len)
        out.append(lb_init(series, stats, anchor, j, d))
    return out


class TestLbInit:
    def test_identical_pair_zero(self, rng):
        x = rng.standard_normal(100)
        x[40:56] = x[0:16]
        s = make_series(x)
        stats = rolling_stats(s, 16)
        e = lb_init(s, stats, 0, 40, 0.0)
        assert e.lb == 0.0
        assert e.base_q == 1.0

    def test_anticorrelated_admissible(self):
        s = make_series([0.0, 1.0, 1.0, 0.0, 0.5, 0.25])
        stats = rolling_stats(s, 2)
        d = pair_distance(s, 0, 2, 2)
        assert d == pytest.approx(2 * math.sqrt(2), abs=1e-12)
        e = lb_init(s, stats, 0, 2, d)
        assert e.lb <= d

    def test_random_pairs_admissible(self, rng):
        s = make_series(rng.standard_normal(200))
        stats = rolling_stats(s, 16)
        for j in (30, 77, 120):
            d = pair_distance(s, 5, j, 16)
            e = lb_init(s, stats, 5, j, d)
            assert e.lb <= d + 1e-12

    def test_degenerate_flagged(self):
        x = np.r_[np.full(8, 2.0), np.sin(np.arange(24))]
        s = make_series(x)
        stats = rolling_stats(s, 4)
        d = pair_distance(s, 0, 12, 4)
        e = lb_init(s, stats, 0, 12, d)
        assert e.degenerate and e.lb == 0.0


class TestLbUpdate:
    def test_identity_persists(self, rng):
        x = rng.standard_normal(120)
        x[60:90] = x[10:40]
        s = make_series(x)
        stats = rolling_stats(s, 16)
        e = lb_init(s, stats, 10, 60, 0.0)
        for length in range(17, 31):
            e = lb_update(e, s, rolling_stats(s, length))
            assert e.lb <= 1e-9
            assert e.distance <= 1e-6

    def test_expiry_at_series_end(self, rng):
        s = make_series(rng.standard_normal(50))
        stats = rolling_stats(s, 8)
        j = 42  # candidate window ends exactly at the series end
        d = pair_distance(s, 0, j, 8)
        e = lb_init(s, stats, 0, j, d)
        e = lb_update(e, s, rolling_stats(s, 9))
        assert e.expired

    def test_admissible_across_lengths(self, rng):
        x = np.cumsum(rng.standard_normal(160))
        s = make_series(x)
        stats = rolling_stats(s, 8)
        entries = entries_for_anchor(s, 8, 20, step=3)
        for length in range(9, 33):
            st_ = rolling_stats(s, length)
            entries = [lb_update(e, s, st_) for e in entries]
            for e in entries:
                if e.expired:
                    continue
                true_d = pair_distance(s, e.anchor, e.candidate, length)
                assert e.lb <= true_d + 1e-9
                assert not math.isnan(e.lb)
                assert e.distance == pytest.approx(true_d, abs=1e-8)

    def test_stats_length_checked(self, rng):
        s = make_series(rng.standard_normal(64))
        stats = rolling_stats(s, 8)
        e = lb_init(s, stats, 0, 20, pair_distance(s, 0, 20, 8))
        with pytest.raises(Exception):
            lb_update(e, s, rolling_stats(s, 12))


class TestLbRank:
    def test_singleton(self, rng):
        s = make_series(rng.standard_normal(64))
        stats = rolling_stats(s, 8)
        e = lb_init(s, stats, 0, 30, pair_distance(s, 0, 30, 8))
        assert lb_rank([e]) == [e]

    def test_equal_lb_smaller_offset_first(self, rng):
        x = rng.standard_normal(100)
        x[50:58] = x[30:38]  # two bitwise-equal candidate windows
        s = make_series(x)
        stats = rolling_stats(s, 8)
        e1 = lb_init(s, stats, 0, 30, pair_distance(s, 0, 30, 8))
        e2 = lb_init(s, stats, 0, 50, pair_distance(s, 0, 50, 8))
        assert e1.lb == e2.lb
        assert [e.candidate for e in lb_rank([e2, e1])] == [30, 50]

    def test_rank_invariant_across_lengths(self, rng):
        x = np.cumsum(rng.standard_normal(200))
        s = make_series(x)
        entries = entries_for_anchor(s, 8, 13, step=2)
        base_perm = [e.candidate for e in lb_rank(entries)]
        for length in range(9, 19):
            st_ = rolling_stats(s, length)
            entries = [lb_update(e, s, st_) for e in entries]
            live = [e for e in entries if not e.expired]
            assert [e.candidate for e in lb_rank(live)] == \
                [c for c in base_perm if c in {e.candidate for e in live}]

    def test_rank_matches_lb_order(self, rng):
        # the rank key must order identically to the bound values themselves
        x = np.cumsum(rng.standard_normal(150))
        s = make_series(x)
        entries = entries_for_anchor(s, 8, 40, step=2)
        for length in (12, 20, 28):
            st_ = None
            es = entries
            for cur in range(9, length + 1):
                st_ = rolling_stats(s, cur)
                es = [lb_update(e, s, st_) for e in es]
            live = [e for e in es if not e.expired]
            ranked = lb_rank(live)
            lbs = [e.lb for e in ranked]
            assert lbs == sorted(lbs)


class TestAdmissibilityGate:
    def test_report_clean_on_random_walk(self, rng):
        s = make_series(np.cumsum(rng.standard_normal(120)))
        report = admissibility_report(s, 8, 12, anchor_step=7, candidate_step=5)
        assert report["violations"] == 0
        assert report["checks"] > 100
        assert report["worst_slack"] <= 1e-9

    def test_dump_rows_admissible(self, rng, tmp_path):
        s = make_series(rng.standard_normal(80))
        path = tmp_path / "lb_dump.csv"
        dump_admissibility(s, 8, 8, str(path), anchor_step=9, candidate_step=7)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "i,j,length,lb,d_true"
        assert len(rows) > 10
        for line in rows[1:]:
            _, _, _, lb, d_true = line.split(",")
            assert float(lb) <= float(d_true) + 1e-9
