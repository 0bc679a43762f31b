"""Exact variable-length motif discovery for data series.

Core pieces: z-normalized distance profiles and fixed-length matrix profiles,
a pruning discovery loop that carries partial profiles across a length range
with admissible lower bounds, a length-normalized ranking structure with
checkpoint replay, motif-set expansion, a CLI, and an HTTP analysis service.
"""

from .distance import (
    DistanceProfile,
    MatrixProfile,
    MotifPair,
    default_exclusion,
    distance_profile,
    matrix_profile,
    pair_distance,
    topk_pairs,
    znorm_distance,
)
from .engine import LengthResult, PruneStats, ValmodResult, fixed_length_topk, valmod_run
from .errors import EngineError, ParameterError, ParseError, ValmodError
from .lowerbound import LbEntry, admissibility_report, extension_bound, lb_init, lb_rank, lb_update
from .motifset import MotifSet, MotifSetMember, expand
from .series import (
    RollingStats,
    SeriesRecord,
    SubsequenceRef,
    ingest_series,
    make_series,
    rolling_stats,
    series_to_text,
    write_series,
    znorm,
)
from .synth import planted_walk
from .valmap import Checkpoint, Valmap, ValmapSnapshot, length_normalized, valmap_at, valmap_init, valmap_update

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "DistanceProfile",
    "EngineError",
    "LbEntry",
    "LengthResult",
    "MatrixProfile",
    "MotifPair",
    "MotifSet",
    "MotifSetMember",
    "ParameterError",
    "ParseError",
    "PruneStats",
    "RollingStats",
    "SeriesRecord",
    "SubsequenceRef",
    "Valmap",
    "ValmapSnapshot",
    "ValmodError",
    "ValmodResult",
    "admissibility_report",
    "default_exclusion",
    "distance_profile",
    "expand",
    "extension_bound",
    "fixed_length_topk",
    "ingest_series",
    "lb_init",
    "lb_rank",
    "lb_update",
    "length_normalized",
    "make_series",
    "matrix_profile",
    "pair_distance",
    "planted_walk",
    "rolling_stats",
    "series_to_text",
    "topk_pairs",
    "valmap_at",
    "valmap_init",
    "valmap_update",
    "valmod_run",
    "write_series",
    "znorm",
    "znorm_distance",
]
