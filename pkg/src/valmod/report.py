"""Figure rendering for run outputs.

Renders the series, the fixed-length profile, the normalized-profile triple,
and motif overlays to image files next to the delimited outputs. Import stays
local to the CLI report path; the engine never touches matplotlib.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .series import SeriesRecord

FIG_W = 11.0
DPI = 120


def _finite_or_nan(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=float).copy()
    out[~np.isfinite(out)] = np.nan
    return out


def plot_series(series: SeriesRecord, path: str,
                highlights: list[tuple[int, int]] | None = None) -> str:
    """Line plot of the raw series; optional (offset, length) highlights."""
    fig, ax = plt.subplots(figsize=(FIG_W, 3.0))
    ax.plot(series.values, lw=0.7, color="#30506d")
    for off, length in highlights or []:
        ax.plot(range(off, off + length), series.values[off:off + length], lw=1.8)
    ax.set_xlim(0, series.length - 1)
    ax.set_xlabel("offset")
    ax.set_title(series.name)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_matrix_profile(series: SeriesRecord, mp: np.ndarray, window: int,
                        path: str) -> str:
    """Series and its matrix profile on aligned x-axes."""
    fig, axes = plt.subplots(2, 1, figsize=(FIG_W, 5.0), sharex=True)
    axes[0].plot(series.values, lw=0.7, color="#30506d")
    axes[0].set_ylabel("series")
    axes[1].plot(_finite_or_nan(mp), lw=0.9, color="#a03b3b")
    axes[1].set_ylabel(f"profile (l={window})")
    axes[1].set_xlabel("offset")
    axes[0].set_xlim(0, series.length - 1)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_valmap(series: SeriesRecord, mpn: np.ndarray, lp: np.ndarray,
                checkpoint_offsets: list[int], path: str) -> str:
    """Normalized profile and length profile stacked under the series.

    Checkpoint positions are marked on the length panel so updated regions
    stand out.
    """
    fig, axes = plt.subplots(3, 1, figsize=(FIG_W, 7.0), sharex=True)
    axes[0].plot(series.values, lw=0.7, color="#30506d")
    axes[0].set_ylabel("series")
    axes[1].plot(_finite_or_nan(mpn), lw=0.9, color="#a03b3b")
    axes[1].set_ylabel("normalized profile")
    axes[2].plot(lp, lw=0.9, color="#3b7d52", drawstyle="steps-post")
    if checkpoint_offsets:
        offs = np.asarray(sorted(set(checkpoint_offsets)), dtype=int)
        axes[2].plot(offs, np.asarray(lp)[offs], ".", ms=3, color="#d08a00")
    axes[2].set_ylabel("best length")
    axes[2].set_xlabel("offset")
    axes[0].set_xlim(0, series.length - 1)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_motif_overlay(series: SeriesRecord, offsets: list[int], length: int,
                       path: str) -> str:
    """Aligned overlay of the windows at the given offsets."""
    fig, axes = plt.subplots(1, 2, figsize=(FIG_W, 3.2),
                             gridspec_kw={"width_ratios": [2.2, 1.0]})
    axes[0].plot(series.values, lw=0.6, color="#b9c4cd")
    for off in offsets:
        axes[0].plot(range(off, off + length), series.values[off:off + length], lw=1.6)
    axes[0].set_xlim(0, series.length - 1)
    axes[0].set_xlabel("offset")
    axes[0].set_title(f"{len(offsets)} occurrences at l={length}")
    for off in offsets:
        win = series.values[off:off + length]
        win = win - win.mean()
        axes[1].plot(win, lw=1.0, alpha=0.8)
    axes[1].set_title("aligned shapes")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_run_dir(run_dir: str, series: SeriesRecord) -> list[str]:
    """Render figures for whatever delimited outputs a run directory holds."""
    from .io import read_matrix_profile_columns

    written: list[str] = []
    mp_path = os.path.join(run_dir, "matrix_profile.csv")
    cfg_path = os.path.join(run_dir, "config.json")
    window = None
    if os.path.exists(cfg_path):
        import json

        with open(cfg_path) as fh:
            cfg = json.load(fh)
        window = cfg.get("length") or cfg.get("lmin")
    if os.path.exists(mp_path):
        cols = read_matrix_profile_columns(mp_path)
        out = os.path.join(run_dir, "matrix_profile.png")
        written.append(plot_matrix_profile(series, cols["mp"], window or 0, out))

    vm_path = os.path.join(run_dir, "valmap.csv")
    if os.path.exists(vm_path):
        mpn, lp = [], []
        with open(vm_path) as fh:
            next(fh)
            for line in fh:
                _, v, _, L = line.strip().split(",")
                mpn.append(float(v))
                lp.append(int(L))
        cp_offsets: list[int] = []
        cp_path = os.path.join(run_dir, "checkpoints.csv")
        if os.path.exists(cp_path):
            with open(cp_path) as fh:
                next(fh)
                cp_offsets = [int(line.split(",")[1]) for line in fh if line.strip()]
        out = os.path.join(run_dir, "valmap.png")
        written.append(plot_valmap(series, np.array(mpn), np.array(lp),
                                   cp_offsets, out))

    tk_path = os.path.join(run_dir, "topk.csv")
    if os.path.exists(tk_path):
        best = None
        with open(tk_path) as fh:
            next(fh)
            for line in fh:
                L, rank, left, right, dist, dn = line.strip().split(",")
                row = (float(dn), int(left), int(right), int(L))
                if best is None or row < best:
                    best = row
        if best is not None:
            out = os.path.join(run_dir, "top_motif.png")
            written.append(plot_motif_overlay(series, [best[1], best[2]],
                                              best[3], out))
    if not written:
        written.append(plot_series(series, os.path.join(run_dir, "series.png")))
    return written
