"""Job-oriented HTTP facade over the discovery engine.

Uploads are persisted to disk and survive restarts; jobs are in-memory and
ephemeral. One job runs per dataset at a time, FIFO; progress is the length
the run is currently processing. All artifact payloads for a finished job are
deterministic, so polling GETs are idempotent byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Query, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import io as vio
from .errors import ParameterError, ParseError
from .distance import MotifPair, pair_distance
from .engine import ValmodResult, valmod_run
from .motifset import expand
from .series import SeriesRecord, ingest_series, make_series, write_series
from .valmap import valmap_at


class JobRequest(BaseModel):
    dataset_id: str
    lmin: int
    lmax: int
    k: int = 1
    p: int = 50
    exclusion: Optional[int] = None


class MotifSetRequest(BaseModel):
    length: int
    left: int
    right: int
    radius_factor: float = 2.0


@dataclass
class Job:
    job_id: str
    dataset_id: str
    request: JobRequest
    state: str = "queued"  # queued -> running -> done | failed
    current_length: Optional[int] = None
    error: Optional[str] = None
    created_at: float = field(default_factory=time.time)
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    result: Optional[ValmodResult] = None

    def descriptor(self) -> dict:
        return {
            "job_id": self.job_id,
            "dataset_id": self.dataset_id,
            "params": self.request.model_dump(),
            "state": self.state,
            "current_length": self.current_length,
            "error": self.error,
            "created_at": self.created_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


class DatasetStore:
    """Content-addressed series files under one directory."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._series: dict[str, SeriesRecord] = {}
        self._meta: dict[str, dict] = {}
        for name in sorted(os.listdir(root)):
            if name.endswith(".meta.json"):
                with open(os.path.join(root, name)) as fh:
                    meta = json.load(fh)
                self._meta[meta["dataset_id"]] = meta

    def add(self, series: SeriesRecord) -> dict:
        digest = hashlib.sha256(series.values.tobytes()).hexdigest()[:16]
        dataset_id = f"ds-{digest}"
        if dataset_id not in self._meta:
            values_path = os.path.join(self.root, f"{dataset_id}.txt")
            write_series(series, values_path)
            meta = {
                "dataset_id": dataset_id,
                "name": series.name,
                "length": series.length,
                "min": float(series.values.min()),
                "max": float(series.values.max()),
                "mean": float(series.values.mean()),
            }
            with open(os.path.join(self.root, f"{dataset_id}.meta.json"), "w") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)
            self._meta[dataset_id] = meta
            self._series[dataset_id] = series
        return self._meta[dataset_id]

    def get_meta(self, dataset_id: str) -> dict | None:
        return self._meta.get(dataset_id)

    def get_series(self, dataset_id: str) -> SeriesRecord | None:
        if dataset_id not in self._meta:
            return None
        if dataset_id not in self._series:
            path = os.path.join(self.root, f"{dataset_id}.txt")
            values = np.loadtxt(path, dtype=np.float64, ndmin=1)
            self._series[dataset_id] = make_series(
                values, name=self._meta[dataset_id]["name"], source=path)
        return self._series[dataset_id]


class JobRegistry:
    """Single-writer job table with a FIFO queue per dataset."""

    def __init__(self, pool_size: int, engine_workers: int):
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._pending: dict[str, list[str]] = {}
        self._running: set[str] = set()
        self._seq = 0
        self._pool = ThreadPoolExecutor(max_workers=pool_size)
        self._engine_workers = engine_workers

    def submit(self, request: JobRequest, series: SeriesRecord) -> Job:
        with self._lock:
            self._seq += 1
            job = Job(job_id=f"job-{self._seq:06d}", dataset_id=request.dataset_id,
                      request=request)
            self._jobs[job.job_id] = job
            self._pending.setdefault(request.dataset_id, []).append(job.job_id)
        self._maybe_start(request.dataset_id, series)
        return job

    def _maybe_start(self, dataset_id: str, series: SeriesRecord) -> None:
        with self._lock:
            if dataset_id in self._running:
                return
            queue = self._pending.get(dataset_id) or []
            if not queue:
                return
            job = self._jobs[queue.pop(0)]
            self._running.add(dataset_id)
        self._pool.submit(self._run, job, series)

    def _run(self, job: Job, series: SeriesRecord) -> None:
        job.state = "running"
        job.started_at = time.time()

        def progress(length: int) -> None:
            job.current_length = length

        try:
            req = job.request
            job.result = valmod_run(series, req.lmin, req.lmax, k=req.k, p=req.p,
                                    exclusion=req.exclusion,
                                    workers=self._engine_workers,
                                    progress=progress)
            job.state = "done"
        except Exception as exc:  # failure lands in the descriptor, not the log
            job.state = "failed"
            job.error = str(exc)
        finally:
            job.finished_at = time.time()
            with self._lock:
                self._running.discard(job.dataset_id)
            self._maybe_start(job.dataset_id, series)

    def get(self, job_id: str) -> Job | None:
        return self._jobs.get(job_id)


def _unprocessable(field_name: str, message: str) -> HTTPException:
    return HTTPException(status_code=422,
                         detail=[{"loc": ["body", field_name], "msg": message}])


def create_app(data_dir: str = "valmod_data", pool_size: int = 2,
               engine_workers: int = 1) -> FastAPI:
    app = FastAPI(title="valmod service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    datasets = DatasetStore(data_dir)
    jobs = JobRegistry(pool_size=pool_size, engine_workers=engine_workers)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/datasets")
    async def upload_dataset(file: UploadFile = File(...),
                             format: str = Form("plain"),
                             column: Optional[str] = Form(None),
                             delimiter: str = Form(","),
                             name: Optional[str] = Form(None)):
        payload = await file.read()
        try:
            series = ingest_series(payload, format, column=column,
                                   delimiter=delimiter,
                                   name=name or (file.filename or "upload"))
        except (ParseError, ParameterError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        meta = datasets.add(series)
        return {"dataset_id": meta["dataset_id"], "name": meta["name"],
                "length": meta["length"]}

    @app.get("/datasets/{dataset_id}")
    def dataset_meta(dataset_id: str):
        meta = datasets.get_meta(dataset_id)
        if meta is None:
            raise HTTPException(status_code=404, detail="dataset not found")
        return meta

    @app.get("/datasets/{dataset_id}/preview")
    def dataset_preview(dataset_id: str,
                        start: int = Query(0, alias="from"),
                        end: Optional[int] = Query(None, alias="to"),
                        points: int = 1000):
        series = datasets.get_series(dataset_id)
        if series is None:
            raise HTTPException(status_code=404, detail="dataset not found")
        end = series.length if end is None else min(end, series.length)
        start = max(0, start)
        if start >= end:
            raise HTTPException(status_code=422, detail="empty preview range")
        # min-max per bucket keeps narrow spikes visible at low resolution
        span = series.values[start:end]
        buckets = min(max(1, points // 2), span.size)
        edges = np.linspace(0, span.size, buckets + 1, dtype=int)
        offsets, values = [], []
        for b in range(buckets):
            seg = span[edges[b]:edges[b + 1]]
            if seg.size == 0:
                continue
            lo = int(np.argmin(seg))
            hi = int(np.argmax(seg))
            for pos in sorted({lo, hi}):
                offsets.append(int(start + edges[b] + pos))
                values.append(float(seg[pos]))
        return {"dataset_id": dataset_id, "from": start, "to": end,
                "offsets": offsets, "values": values}

    @app.post("/jobs")
    def submit_job(request: JobRequest):
        series = datasets.get_series(request.dataset_id)
        if series is None:
            raise HTTPException(status_code=404, detail="dataset not found")
        if request.lmin < 2:
            raise _unprocessable("lmin", "lmin must be >= 2")
        if request.lmin > request.lmax:
            raise _unprocessable("lmax", "lmax must be >= lmin")
        if 2 * request.lmax > series.length:
            raise _unprocessable(
                "lmax", f"series too short: need |D| >= 2*lmax "
                        f"(|D|={series.length}, lmax={request.lmax})")
        if not (1 <= request.k <= request.p):
            raise _unprocessable("k", "need 1 <= k <= p")
        if request.exclusion is not None and request.exclusion < 1:
            raise _unprocessable("exclusion", "exclusion radius must be >= 1")
        job = jobs.submit(request, series)
        return {"job_id": job.job_id}

    def _job_or_404(job_id: str) -> Job:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail="job not found")
        return job

    def _finished_job(job_id: str) -> Job:
        job = _job_or_404(job_id)
        if job.state == "failed":
            raise HTTPException(status_code=409, detail=f"job failed: {job.error}")
        if job.state != "done":
            raise HTTPException(status_code=409, detail=f"job is {job.state}")
        return job

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        return _job_or_404(job_id).descriptor()

    @app.get("/jobs/{job_id}/valmap")
    def job_valmap(job_id: str, length: Optional[int] = None):
        job = _finished_job(job_id)
        view = job.request.lmax if length is None else length
        try:
            snap = valmap_at(job.result.valmap, view)
        except ParameterError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return vio.snapshot_payload(snap)

    @app.get("/jobs/{job_id}/motifs")
    def job_motifs(job_id: str, length: Optional[int] = None):
        job = _finished_job(job_id)
        results = job.result.results
        if length is not None:
            match = [r for r in results if r.length == length]
            if not match:
                raise HTTPException(status_code=422,
                                    detail=f"length {length} outside the job range")
            results = match
        pairs = [vio.pair_payload(p) for r in results for p in r.pairs]
        if length is None:
            pairs.sort(key=lambda d: (d["norm_distance"], d["length"],
                                      d["left"], d["right"]))
        return {"job_id": job_id, "length": length, "pairs": pairs}

    @app.post("/jobs/{job_id}/motifset")
    def job_motifset(job_id: str, request: MotifSetRequest):
        job = _finished_job(job_id)
        series = datasets.get_series(job.dataset_id)
        if not (job.request.lmin <= request.length <= job.request.lmax):
            raise _unprocessable("length", "length outside the job range")
        if request.radius_factor <= 0:
            raise _unprocessable("radius_factor", "radius_factor must be > 0")
        if min(request.left, request.right) < 0 or \
                max(request.left, request.right) + request.length > series.length:
            raise _unprocessable("left", "seed windows exceed the series")
        try:
            d = pair_distance(series, request.left, request.right, request.length)
            pair = MotifPair.make(request.left, request.right, request.length, d)
            mset = expand(series, pair, radius_factor=request.radius_factor,
                          exclusion=job.request.exclusion)
        except ParameterError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return vio.motifset_payload(mset)

    return app
