"""Acceptance gate: every criterion runs at its stated tolerance and reports
one pass/fail line in the terminal summary (see conftest)."""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.spatial.distance import cdist

import oracles
from conftest import record_criterion
from valmod import (
    lb_rank,
    lb_init,
    lb_update,
    make_series,
    matrix_profile,
    pair_distance,
    planted_walk,
    rolling_stats,
    valmap_at,
    valmap_init,
    valmap_update,
    valmod_run,
)
from valmod.cli import entrypoint
from valmod.lowerbound import extension_bound


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        record_criterion(name, "FAIL")
        raise
    record_criterion(name, "PASS")


def corpus(count=20, sizes=(256, 513)):
    """Seeded mixed corpus: alternating iid noise and random walks."""
    out = []
    for seed in range(count):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(sizes[0], sizes[1]))
        x = rng.standard_normal(n) if seed % 2 else np.cumsum(rng.standard_normal(n))
        out.append(make_series(x, name=f"corpus-{seed}"))
    return out


CORPUS = corpus()


def test_oracle_exactness():
    """Per-length top-k equals the brute-force all-pairs oracle on 20 series."""
    with criterion("oracle exactness: 20 series, l in [8,16], k=3, p=10, d tol 1e-8"):
        for series in CORPUS:
            result = valmod_run(series, 8, 16, k=3, p=10)
            expect = oracles.all_lengths_topk(series.values, 8, 16, 3)
            for r in result.results:
                want = expect[r.length]
                got = [(p.left, p.right) for p in r.pairs]
                assert got == [(l, rr) for _, l, rr in want], \
                    f"{series.name} l={r.length}: {got} != {want}"
                for p, (d, _, _) in zip(r.pairs, want):
                    assert abs(p.distance - d) <= 1e-8


def _znormed(x, length):
    wins = np.lib.stride_tricks.sliding_window_view(x, length).astype(float)
    mu = wins.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.mean((wins - mu) ** 2, axis=1, keepdims=True))
    flat = wins.max(axis=1, keepdims=True) == wins.min(axis=1, keepdims=True)
    return np.where(flat | (sd == 0), 0.0, (wins - mu) / np.where(sd > 0, sd, 1.0))


def test_lb_admissibility():
    """All-pairs extension bounds never exceed true distances (superset of the
    entries any run stores)."""
    with criterion("lb admissibility: base {8,12} extended +24, tol 1e-9, 0 violations"):
        checks = 0
        for series in CORPUS:
            x = series.values
            for base in (8, 12):
                stats_b = rolling_stats(series, base)
                D_b = cdist(_znormed(x, base), _znormed(x, base))
                q = 1.0 - D_b ** 2 / (2.0 * base)
                for length in range(base, base + 25, 3):
                    if 2 * length > series.length:
                        break
                    w = series.length - length + 1
                    stats_l = rolling_stats(series, length)
                    lb = extension_bound(
                        q[:w, :w], base, stats_b.mu[:w, None],
                        stats_b.sigma[:w, None], stats_l.mu[:, None],
                        stats_l.sigma[:, None], length)
                    D_l = cdist(_znormed(x, length), _znormed(x, length))
                    off = ~np.eye(w, dtype=bool)
                    violations = int((lb[off] > D_l[off] + 1e-9).sum())
                    assert violations == 0, \
                        f"{series.name} base={base} l={length}: {violations}"
                    checks += int(off.sum())
        assert checks > 1_000_000


def test_rank_invariance():
    """Stored-entry order (bound ascending, correlation-magnitude then offset
    as the tie-break) is one permutation at every target length."""
    with criterion("rank invariance: per-anchor permutation identical at all lengths"):
        for series in CORPUS[:10]:
            base = 8
            stats_b = rolling_stats(series, base)
            horizon = series.length - base - 24
            for anchor in range(0, horizon, 11):
                entries = []
                for j in range(0, horizon, 3):
                    if abs(anchor - j) < base:
                        continue
                    d = pair_distance(series, anchor, j, base)
                    entries.append(lb_init(series, stats_b, anchor, j, d))
                entries = lb_rank(entries)[:10]
                base_perm = [e.candidate for e in entries]
                for length in range(base + 1, base + 25):
                    stats_l = rolling_stats(series, length)
                    entries = [lb_update(e, series, stats_l) for e in entries]
                    live = [e for e in entries if not e.expired]
                    perm = [e.candidate for e in lb_rank(live)]
                    assert perm == [c for c in base_perm
                                    if c in {e.candidate for e in live}]
                    lbs = [e.lb for e in lb_rank(live)]
                    assert lbs == sorted(lbs)


def test_matrix_profile_correctness():
    """Engine matrix profile equals the naive all-pairs computation."""
    with criterion("matrix profile: 50 instances |D|<=512 l<=32, tol 1e-8"):
        for seed in range(50):
            rng = np.random.default_rng(2000 + seed)
            n = int(rng.integers(128, 513))
            length = int(rng.integers(4, min(33, n // 2 + 1)))
            x = rng.standard_normal(n) if seed % 3 else np.cumsum(rng.standard_normal(n))
            series = make_series(x)
            mp = matrix_profile(series, length)
            naive_mp, naive_ip = oracles.matrix_profile(
                x, length, oracles.default_radius(length))
            assert np.abs(mp.mp - naive_mp).max() <= 1e-8, seed
            assert (mp.ip == naive_ip).all(), seed


def test_valmap_construction():
    """Replaying emitted pairs reproduces the final structure; snapshots equal
    truncated runs."""
    with criterion("valmap: replay exact; 5 random views equal truncated runs"):
        for series in CORPUS[:4]:
            result = valmod_run(series, 8, 16, k=3, p=10)
            replay = valmap_init(matrix_profile(series, 8), 16)
            for r in result.results:
                for p in r.pairs:
                    valmap_update(replay, p)
            assert np.array_equal(replay.mpn, result.valmap.mpn)
            assert np.array_equal(replay.ip, result.valmap.ip)
            assert np.array_equal(replay.lp, result.valmap.lp)
            assert replay.checkpoints == result.valmap.checkpoints

            rng = np.random.default_rng(series.length)
            for view in rng.integers(8, 17, size=5):
                view = int(view)
                snap = valmap_at(result.valmap, view)
                trunc = valmod_run(series, 8, view, k=3, p=10).valmap
                assert np.array_equal(snap.mpn, trunc.mpn), (series.name, view)
                assert np.array_equal(snap.ip, trunc.ip)
                assert np.array_equal(snap.lp, trunc.lp)


def test_length_normalized_rule():
    """Every emitted pair satisfies dn = d * sqrt(1/l) to 1e-12."""
    with criterion("length-normalized distances: dn = d*sqrt(1/l), tol 1e-12"):
        checked = 0
        for series in CORPUS[:6]:
            result = valmod_run(series, 8, 16, k=3, p=10)
            for r in result.results:
                for p in r.pairs:
                    assert abs(p.norm_distance -
                               p.distance * math.sqrt(1.0 / p.length)) <= 1e-12
                    checked += 1
        assert checked > 100


def test_planted_motif_recovery():
    """A planted identical pair is found exactly; under noise the normalized
    optimum concentrates at the plant length."""
    with criterion("planted recovery: |D|=4096 L=64 range [50,100]; noise argmin 64+-2"):
        series, offs = planted_walk(4096, 64, plant_count=2, noise=0.0, seed=41)
        result = valmod_run(series, 50, 100, k=1, p=50)
        at64 = next(r for r in result.results if r.length == 64)
        top = at64.pairs[0]
        assert (top.left, top.right) == tuple(offs)
        assert top.distance < 1e-9

        noisy, offs_n = planted_walk(4096, 64, plant_count=2, noise=0.01, seed=41)
        res_n = valmod_run(noisy, 50, 100, k=1, p=50)
        best = min((r.pairs[0].norm_distance, r.length) for r in res_n.results
                   if r.pairs)
        assert 62 <= best[1] <= 66, f"normalized optimum at {best[1]}"


def test_determinism_across_workers(tmp_path):
    """Identical seeds and different worker counts produce identical bytes."""
    with criterion("determinism: worker counts never change output bytes"):
        series_path = tmp_path / "series.txt"
        assert entrypoint(["synth", "--n", "2000", "--plant-length", "48",
                           "--seed", "6", "--out", str(series_path)]) == 0
        blobs = {}
        for workers in (1, 4):
            out = tmp_path / f"run-w{workers}"
            assert entrypoint(["valmod", "--input", str(series_path),
                               "--lmin", "40", "--lmax", "52", "--k", "2",
                               "--trace", "--workers", str(workers),
                               "--out", str(out)]) == 0
            assert entrypoint(["profile", "--input", str(series_path),
                               "--length", "48", "--workers", str(workers),
                               "--out", str(out / "prof")]) == 0
            blobs[workers] = {
                name: (out / name).read_bytes()
                for name in ("topk.csv", "valmap.csv", "checkpoints.csv",
                             "trace.csv", "config.json")
            } | {"mp": (out / "prof" / "matrix_profile.csv").read_bytes()}
        assert blobs[1] == blobs[4]


def test_demo_scale_parameters():
    """The demonstration-scale length range runs on a synthetic series."""
    with criterion("demo parameters: range [50,400] on an 800-point series"):
        series, _ = planted_walk(800, 120, plant_count=2, noise=0.01, seed=5)
        result = valmod_run(series, 50, 400, k=1, p=50)
        assert len(result.results) == 351
        assert all(len(r.pairs) >= 1 for r in result.results)


def test_performance_fixed_length():
    """Fixed-length matrix profile at |D|=131072, l=256: under 60 s, one worker."""
    with criterion("performance: matrix profile 131072/256 < 60 s single worker"):
        rng = np.random.default_rng(99)
        series = make_series(np.cumsum(rng.standard_normal(131072)))
        t0 = time.perf_counter()
        mp = matrix_profile(series, 256, workers=1)
        elapsed = time.perf_counter() - t0
        assert np.isfinite(mp.mp).any()
        assert elapsed < 60.0, f"{elapsed:.1f}s"


def test_performance_variable_length():
    """Width-50 range over |D|=65536 planted data: under 10 min; at least half
    of the lengths certify without any full recomputation."""
    with criterion("performance: valmod 65536 width-50 < 600 s, >=50% lengths pruned clean"):
        series, offs = planted_walk(65536, 160, plant_count=2, noise=0.001, seed=77)
        t0 = time.perf_counter()
        result = valmod_run(series, 100, 149, k=1, p=20)
        elapsed = time.perf_counter() - t0
        assert elapsed < 600.0, f"{elapsed:.1f}s"
        steps = result.trace[1:]
        clean = sum(t.certified_without_recompute for t in steps)
        assert clean >= len(steps) / 2, f"{clean}/{len(steps)}"
        for r in result.results:
            top = r.pairs[0]
            assert abs(top.left - offs[0]) <= 160 and abs(top.right - offs[1]) <= 160


def test_service_contract(tmp_path):
    """Upload -> job -> valmap -> motifs -> motifset flow with the specified
    payload shapes, on a planted dataset."""
    from fastapi.testclient import TestClient

    from valmod import series_to_text
    from valmod.service import create_app

    with criterion("service contract: full flow with specified payload shapes"):
        series, offs = planted_walk(1400, 48, plant_count=3, noise=0.02, seed=31)
        app = create_app(data_dir=str(tmp_path / "data"))
        with TestClient(app) as client:
            assert client.get("/health").json() == {"status": "ok"}

            resp = client.post("/datasets", files={
                "file": ("planted.txt", series_to_text(series).encode())})
            assert resp.status_code == 200
            ds = resp.json()
            assert set(ds) == {"dataset_id", "name", "length"}

            bad = client.post("/jobs", json={"dataset_id": ds["dataset_id"],
                                             "lmin": 60, "lmax": 40})
            assert bad.status_code == 422
            assert any("lmax" in str(item.get("loc"))
                       for item in bad.json()["detail"])

            job_id = client.post("/jobs", json={
                "dataset_id": ds["dataset_id"], "lmin": 44, "lmax": 52,
                "k": 2, "p": 10}).json()["job_id"]
            deadline = time.time() + 120
            while time.time() < deadline:
                desc = client.get(f"/jobs/{job_id}").json()
                assert set(desc) >= {"job_id", "dataset_id", "params", "state",
                                     "current_length"}
                if desc["state"] == "done":
                    break
                assert desc["state"] in ("queued", "running")
                time.sleep(0.05)
            assert desc["state"] == "done"

            snap = client.get(f"/jobs/{job_id}/valmap",
                              params={"length": 44}).json()
            assert set(snap) == {"lmin", "lmax", "view_length", "mpn", "ip",
                                 "lp", "checkpoints"}
            assert snap["lp"] == [44] * (series.length - 44 + 1)
            assert snap["checkpoints"] == []
            base = matrix_profile(series, 44)
            want = base.mp * math.sqrt(1 / 44)
            got = np.array([v if v is not None else np.inf for v in snap["mpn"]])
            assert np.allclose(got[np.isfinite(want)], want[np.isfinite(want)],
                               atol=1e-12)

            motifs = client.get(f"/jobs/{job_id}/motifs",
                                params={"length": 48}).json()
            top = motifs["pairs"][0]
            assert set(top) == {"left", "right", "length", "distance",
                                "norm_distance"}
            assert top["left"] in offs and top["right"] in offs

            mset = client.post(f"/jobs/{job_id}/motifset", json={
                "length": 48, "left": top["left"], "right": top["right"],
                "radius_factor": 3.0}).json()
            assert set(mset) == {"pair", "radius", "exclusion", "members"}
            member_offsets = {m["offset"] for m in mset["members"]}
            assert set(offs) <= member_offsets
