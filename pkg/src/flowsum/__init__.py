"""Weighted flow-volume summaries with bounded tables.

``ImSum`` does its maintenance at table swaps (amortized O(1) per update);
``DimSum`` spreads the same work over updates (worst-case O(1)).  Both
answer every query identically.
"""

from .baselines import CountMinSketch, SpaceSavingHeap, cm_query, cm_update, ssh_query, ssh_update
from .core import (
    MAX_U64,
    CapacityExceeded,
    ExactOracle,
    FlowTable,
    OpCounter,
    ParameterError,
    Params,
    VolumeOverflow,
    params_new,
)
from .dimsum import DimSum, Phase, ScheduleViolation
from .imsum import Generation, ImSum, elephant_threshold
from .selection import C_SEL, Done, RankError, SelectionTask, kth_largest, kth_largest_counted
from .traces import (
    TraceFormatError,
    TraceRecord,
    TruncatedTrace,
    UniformPayload,
    Unit,
    ZipfSpec,
    read_bin,
    read_csv,
    write_bin,
    write_csv,
    zipf_stream,
)

__all__ = [
    "MAX_U64", "C_SEL", "CapacityExceeded", "CountMinSketch", "DimSum", "Done", "ExactOracle",
    "FlowTable", "Generation", "ImSum", "OpCounter", "ParameterError", "Params", "Phase",
    "RankError", "ScheduleViolation", "SelectionTask", "SpaceSavingHeap", "TraceFormatError",
    "TraceRecord", "TruncatedTrace", "UniformPayload", "Unit", "VolumeOverflow", "ZipfSpec",
    "cm_query", "cm_update", "elephant_threshold", "kth_largest", "kth_largest_counted",
    "params_new", "read_bin", "read_csv", "ssh_query", "ssh_update", "write_bin", "write_csv",
    "zipf_stream",
]
