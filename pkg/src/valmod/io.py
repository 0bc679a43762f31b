"""Delimited and JSON serialization of run artifacts.

All text outputs are deterministic: floats use round-trip repr, +inf renders
as the literal ``inf``, and nothing carries timestamps. JSON payload shapes
here are the same ones the HTTP service serves.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .distance import MatrixProfile, MotifPair
from .engine import LengthResult, PruneStats
from .motifset import MotifSet
from .valmap import Checkpoint, Valmap, ValmapSnapshot


def _fmt(value: float) -> str:
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def write_matrix_profile(profile: MatrixProfile, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("offset,mp,ip\n")
        for i in range(profile.mp.shape[0]):
            fh.write(f"{i},{_fmt(profile.mp[i])},{int(profile.ip[i])}\n")


def read_matrix_profile_columns(path: str) -> dict[str, np.ndarray]:
    offsets, mp, ip = [], [], []
    with open(path) as fh:
        next(fh)
        for line in fh:
            o, m, j = line.strip().split(",")
            offsets.append(int(o))
            mp.append(float(m))
            ip.append(int(j))
    return {"offset": np.array(offsets), "mp": np.array(mp),
            "ip": np.array(ip, dtype=np.int64)}


def write_valmap(valmap: Valmap | ValmapSnapshot, path: str) -> None:
    with open(path, "w") as fh:
        fh.write("offset,mpn,ip,lp\n")
        for i in range(valmap.mpn.shape[0]):
            fh.write(f"{i},{_fmt(valmap.mpn[i])},{int(valmap.ip[i])},{int(valmap.lp[i])}\n")


def write_checkpoints(checkpoints: list[Checkpoint], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("length,offset,old_dn,new_dn,new_ip,new_lp\n")
        for cp in checkpoints:
            fh.write(f"{cp.length},{cp.offset},{_fmt(cp.old_dn)},"
                     f"{_fmt(cp.new_dn)},{cp.new_ip},{cp.new_lp}\n")


def write_topk(results: list[LengthResult], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("length,rank,left,right,distance,norm_distance\n")
        for res in results:
            for rank, pair in enumerate(res.pairs, start=1):
                fh.write(f"{res.length},{rank},{pair.left},{pair.right},"
                         f"{_fmt(pair.distance)},{_fmt(pair.norm_distance)}\n")


def write_trace(trace: list[PruneStats], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("length,profiles_valid,profiles_recomputed,minLBAbs,smallest_minDist\n")
        for row in trace:
            fh.write(f"{row.length},{row.profiles_valid},{row.profiles_recomputed},"
                     f"{_fmt(row.min_lb_abs)},{_fmt(row.smallest_min_dist)}\n")


def _json_float(value: float):
    # JSON has no inf; the service and files use null for "no value"
    return None if math.isinf(float(value)) else float(value)


def pair_payload(pair: MotifPair) -> dict:
    return {"left": pair.left, "right": pair.right, "length": pair.length,
            "distance": pair.distance, "norm_distance": pair.norm_distance}


def motifset_payload(mset: MotifSet) -> dict:
    return {
        "pair": pair_payload(mset.pair),
        "radius": mset.radius,
        "exclusion": mset.exclusion,
        "members": [{"offset": m.offset, "distance": m.distance}
                    for m in mset.members],
    }


def snapshot_payload(snap: ValmapSnapshot) -> dict:
    return {
        "lmin": snap.lmin,
        "lmax": snap.lmax,
        "view_length": snap.view_length,
        "mpn": [_json_float(v) for v in snap.mpn],
        "ip": [int(v) for v in snap.ip],
        "lp": [int(v) for v in snap.lp],
        "checkpoints": [checkpoint_payload(cp) for cp in snap.checkpoints],
    }


def checkpoint_payload(cp: Checkpoint) -> dict:
    return {"length": cp.length, "offset": cp.offset,
            "old_dn": _json_float(cp.old_dn), "new_dn": cp.new_dn,
            "new_ip": cp.new_ip, "new_lp": cp.new_lp}


def write_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_config_echo(config: dict, out_dir: str) -> str:
    """Persist the run configuration next to its outputs.

    Runtime-only settings (worker counts, bind addresses) are not part of the
    echo: outputs are byte-identical across them and the echo records only
    what determines the results.
    """
    path = os.path.join(out_dir, "config.json")
    write_json(config, path)
    return path
