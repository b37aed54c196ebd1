"""Synthetic Zipf workloads and trace file I/O.

Two on-disk formats are supported:

* CSV: one ``<id>,<weight>`` line per record, decimal, no header.
* Binary: fixed 16-byte records, a little-endian u64 id followed by a
  little-endian u64 weight, with no header or framing.

Random draws use numpy's PCG64 bit generator seeded with the 64-bit seed,
so a given :class:`ZipfSpec` always produces the same trace.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union

import numpy as np

from .core import MAX_U64, ParameterError

RECORD_DTYPE = np.dtype([("id", "<u8"), ("weight", "<u8")])
RECORD_SIZE = RECORD_DTYPE.itemsize  # 16


class TraceRecord(NamedTuple):
    id: int
    weight: int


class TraceFormatError(ValueError):
    """A trace file could not be parsed."""

    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class TruncatedTrace(TraceFormatError):
    """A binary trace ends in a partial record."""


@dataclass(frozen=True)
class Unit:
    """Every record has weight 1."""


@dataclass(frozen=True)
class UniformPayload:
    """Weights drawn uniformly from ``lo..hi`` inclusive."""

    lo: int = 64
    hi: int = 1500

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= MAX_U64):
            raise ParameterError(f"bad payload range {self.lo}..{self.hi}")


WeightMode = Union[Unit, UniformPayload]


@dataclass(frozen=True)
class ZipfSpec:
    universe: int
    skew: float
    count: int
    seed: int = 0
    weight_mode: WeightMode = field(default_factory=Unit)

    def __post_init__(self):
        if self.universe < 1:
            raise ParameterError("universe must be positive")
        if self.count < 1:
            raise ParameterError("count must be positive")
        if not self.skew >= 0:
            raise ParameterError("skew must be nonnegative")
        if not (0 <= self.seed <= MAX_U64):
            raise ParameterError("seed must fit in 64 bits")

    def probabilities(self) -> np.ndarray:
        """``p_i`` for ids ``1..universe``; checked to sum to 1."""
        ranks = np.arange(1, self.universe + 1, dtype=np.float64)
        w = ranks ** -float(self.skew)
        p = w / w.sum()
        if abs(float(p.sum()) - 1.0) > 2.0**-40:
            raise ParameterError("Zipf probabilities do not sum to 1")
        return p


def zipf_arrays(spec: ZipfSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw the whole trace as ``(ids, weights)`` u64 arrays."""
    p = spec.probabilities()
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    u = rng.random(spec.count)
    idx = np.searchsorted(cdf, u, side="right")
    np.minimum(idx, spec.universe - 1, out=idx)
    ids = (idx + 1).astype(np.uint64)
    mode = spec.weight_mode
    if isinstance(mode, UniformPayload):
        weights = rng.integers(mode.lo, mode.hi, size=spec.count, endpoint=True, dtype=np.uint64)
    else:
        weights = np.ones(spec.count, dtype=np.uint64)
    return ids, weights


def zipf_stream(spec: ZipfSpec) -> Iterator[TraceRecord]:
    """Yield the records of ``spec`` in order.

    >>> recs = list(zipf_stream(ZipfSpec(universe=2, skew=1.0, count=3, seed=7)))
    >>> len(recs), all(r.weight == 1 and r.id in (1, 2) for r in recs)
    (3, True)
    """
    ids, weights = zipf_arrays(spec)
    for x, w in zip(ids.tolist(), weights.tolist()):
        yield TraceRecord(x, w)


def _as_arrays(records) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(records, tuple) and len(records) == 2 and isinstance(records[0], np.ndarray):
        return records[0].astype(np.uint64, copy=False), records[1].astype(np.uint64, copy=False)
    recs = list(records)
    for r in recs:
        if not (0 <= r[0] <= MAX_U64 and 0 <= r[1] <= MAX_U64):
            raise ValueError(f"record {tuple(r)} does not fit in u64")
    ids = np.array([r[0] for r in recs], dtype=np.uint64)
    weights = np.array([r[1] for r in recs], dtype=np.uint64)
    return ids, weights


# -- CSV -------------------------------------------------------------------


def write_csv(path: str | os.PathLike, records: Iterable[TraceRecord] | tuple) -> None:
    ids, weights = _as_arrays(records)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for x, w in zip(ids.tolist(), weights.tolist()):
            fh.write(f"{x},{w}\n")


def _parse_u64(tok: str, what: str, lineno: int) -> int:
    if not tok.isascii() or not tok.isdigit():
        raise TraceFormatError(f"{what} {tok!r} is not a decimal integer", lineno)
    v = int(tok)
    if v > MAX_U64:
        raise TraceFormatError(f"{what} {tok} exceeds 2**64 - 1", lineno)
    return v


def read_csv(path: str | os.PathLike) -> list[TraceRecord]:
    out: list[TraceRecord] = []
    with open(path, encoding="ascii", errors="replace", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            parts = line.split(",")
            if len(parts) != 2:
                raise TraceFormatError(f"expected '<id>,<weight>', got {line!r}", lineno)
            out.append(TraceRecord(_parse_u64(parts[0], "id", lineno), _parse_u64(parts[1], "weight", lineno)))
    return out


# -- binary ----------------------------------------------------------------


def encode_bin(records) -> bytes:
    ids, weights = _as_arrays(records)
    buf = np.empty(len(ids), dtype=RECORD_DTYPE)
    buf["id"] = ids
    buf["weight"] = weights
    return buf.tobytes()


def write_bin(path: str | os.PathLike, records) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_bin(records))


def read_bin_arrays(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray]:
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size % RECORD_SIZE:
        raise TruncatedTrace(f"{raw.size} bytes is not a multiple of {RECORD_SIZE}")
    rec = raw.view(RECORD_DTYPE)
    return rec["id"].copy(), rec["weight"].copy()


def read_bin(path: str | os.PathLike) -> list[TraceRecord]:
    ids, weights = read_bin_arrays(path)
    return [TraceRecord(x, w) for x, w in zip(ids.tolist(), weights.tolist())]


def detect_format(path: str | os.PathLike) -> str:
    return "csv" if str(path).lower().endswith(".csv") else "bin"


def load_trace(path: str | os.PathLike, fmt: str | None = None) -> tuple[list[int], list[int]]:
    """Load a whole trace into two Python int lists, ready for replay."""
    fmt = fmt or detect_format(path)
    if fmt == "csv":
        recs = read_csv(path)
        return [r.id for r in recs], [r.weight for r in recs]
    if fmt == "bin":
        ids, weights = read_bin_arrays(path)
        return ids.tolist(), weights.tolist()
    raise ValueError(f"unknown trace format {fmt!r}")


def save_trace(path: str | os.PathLike, records, fmt: str | None = None) -> None:
    fmt = fmt or detect_format(path)
    if fmt == "csv":
        write_csv(path, records)
    elif fmt == "bin":
        write_bin(path, records)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
