"""Benchmark and audit harness behind the command-line tool.

Throughput passes run uninstrumented instances so counters do not distort
updates/ms.  Op statistics come from one extra instrumented pass, and
audits replay the trace through the exact oracle separately.
"""

from __future__ import annotations

import csv
import math
import os
import statistics
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .baselines import CountMinSketch, SpaceSavingHeap
from .core import ExactOracle, OpCounter, ParameterError, as_fraction, params_new
from .dimsum import DimSum
from .imsum import ImSum, elephant_threshold

ALGOS = ("imsum", "dimsum", "ssh", "cm", "exact")
BENCH_HEADER = ("algo", "epsilon_log2", "gamma", "skew", "updates_per_ms",
                "mean_ops", "max_ops", "peak_entries", "wall_ms")
# algorithms that must satisfy the deterministic error bound
DETERMINISTIC = ("imsum", "dimsum", "ssh", "exact")


@dataclass
class BenchConfig:
    algo: str
    epsilon_log2: int
    gamma: float = 4.0
    delta: float = 2.0**-10
    repeats: int = 5
    seed: int = 0
    skew: float | None = None

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ParameterError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGOS)}")
        if not (isinstance(self.epsilon_log2, int) and self.epsilon_log2 <= 0):
            raise ParameterError("epsilon_log2 must be a nonpositive integer")
        if not self.gamma > 0:
            raise ParameterError("gamma must be positive")
        if not (0 < self.delta < 1):
            raise ParameterError("delta must lie in (0, 1)")
        if self.repeats < 1:
            raise ParameterError("repeats must be positive")

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, 2**-self.epsilon_log2)


@dataclass
class BenchResult:
    algo: str
    epsilon_log2: int
    gamma: float
    skew: float | None
    updates_per_ms: float
    mean_ops: float
    max_ops: int
    peak_entries: int
    wall_ms: float

    def row(self) -> list:
        d = asdict(self)
        d["skew"] = "" if self.skew is None else self.skew
        return [d[k] for k in BENCH_HEADER]


class _Exact(ExactOracle):
    def entries(self) -> int:
        return len(self.counts)

    def elephants(self, theta: float) -> set[int]:
        thr = elephant_threshold(self.total, theta)
        return {x for x, c in self.counts.items() if c >= thr}


def make_algo(cfg: BenchConfig, *, instrumented: bool = False):
    eps = cfg.epsilon
    if cfg.algo in ("imsum", "dimsum"):
        p = params_new(eps, cfg.gamma)
        counter = OpCounter() if instrumented else None
        return (ImSum if cfg.algo == "imsum" else DimSum)(p, counter)
    if cfg.algo == "ssh":
        return SpaceSavingHeap.for_epsilon(eps, count_ops=instrumented)
    if cfg.algo == "cm":
        return CountMinSketch(eps, cfg.delta, seed=cfg.seed)
    return _Exact()


def _peak(algo) -> int:
    peak = getattr(algo, "peak_entries", None)
    return max(peak or 0, algo.entries())


def _op_stats(algo) -> tuple[float, int]:
    if isinstance(algo, (ImSum, DimSum)):
        c = algo.counter
        return c.mean(), c.per_update_max
    if isinstance(algo, SpaceSavingHeap):
        return algo.mean_ops(), algo.ops_max
    if isinstance(algo, CountMinSketch):
        return float(algo.depth), algo.depth
    return 1.0, 1


def replay(algo, ids: Sequence[int], weights: Sequence[int]) -> float:
    """Feed the trace and return the elapsed wall time in milliseconds."""
    upd = algo.update
    t0 = time.perf_counter()
    for x, w in zip(ids, weights):
        upd(x, w)
    return (time.perf_counter() - t0) * 1e3


def run_bench(cfg: BenchConfig, ids: Sequence[int], weights: Sequence[int]) -> BenchResult:
    walls = [replay(make_algo(cfg), ids, weights) for _ in range(cfg.repeats)]
    wall = statistics.median(walls)
    inst = make_algo(cfg, instrumented=True)
    replay(inst, ids, weights)
    mean_ops, max_ops = _op_stats(inst)
    ups = len(ids) / wall if wall > 0 else math.inf
    return BenchResult(cfg.algo, cfg.epsilon_log2, cfg.gamma, cfg.skew, ups,
                       mean_ops, max_ops, _peak(inst), wall)


def append_results(path: str | os.PathLike, results: Sequence[BenchResult]) -> None:
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(BENCH_HEADER)
        for r in results:
            w.writerow(r.row())


# -- audits ------------------------------------------------------------------


@dataclass
class ErrorAudit:
    algo: str
    total: int
    bound: Fraction
    flows: list[tuple[int, int, int]] = field(default_factory=list)  # final (id, f, est)
    checks: int = 0
    violations: int = 0  # f <= est <= f + R*eps broken
    under: int = 0  # est < f
    max_error: int = 0

    @property
    def violation_fraction(self) -> float:
        return self.violations / self.checks if self.checks else 0.0

    def cm_tolerance(self, delta: float) -> float:
        n = max(self.checks, 1)
        return delta + 3 * math.sqrt(delta * (1 - delta) / n)

    def passed(self, delta: float) -> bool:
        if self.algo in DETERMINISTIC:
            return self.violations == 0
        return self.under == 0 and self.violation_fraction <= self.cm_tolerance(delta)


def _check(audit: ErrorAudit, algo, oracle: ExactOracle, eps: Fraction, final: bool) -> None:
    r = oracle.total
    q = algo.query
    for x, f in oracle.counts.items():
        est = q(x)
        err = est - f
        audit.checks += 1
        if err < 0:
            audit.under += 1
            audit.violations += 1
        elif err * eps.denominator > r * eps.numerator:
            audit.violations += 1
        if err > audit.max_error:
            audit.max_error = err
        if final:
            audit.flows.append((x, f, est))


def error_audit(cfg: BenchConfig, ids: Sequence[int], weights: Sequence[int],
                checkpoint: int | None = None) -> ErrorAudit:
    """Replay in lockstep with the oracle; query every distinct id at the end
    and, if ``checkpoint`` is set, every ``checkpoint`` records."""
    algo = make_algo(cfg)
    oracle = ExactOracle()
    eps = cfg.epsilon
    audit = ErrorAudit(cfg.algo, 0, Fraction(0))
    for t, (x, w) in enumerate(zip(ids, weights), 1):
        algo.update(x, w)
        oracle.update(x, w)
        if checkpoint and t % checkpoint == 0 and t != len(ids):
            _check(audit, algo, oracle, eps, final=False)
    _check(audit, algo, oracle, eps, final=True)
    audit.total = oracle.total
    audit.bound = oracle.total * eps
    return audit


def write_error_csv(path: str | os.PathLike, audit: ErrorAudit) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("id", "f", "estimate", "error"))
        for x, f, est in sorted(audit.flows):
            w.writerow((x, f, est, est - f))


@dataclass
class ElephantAudit:
    reported: set[int]
    missed: set[int]  # f > R*theta but not reported
    false: set[int]  # f < R*(theta - eps) but reported
    scanned: int

    @property
    def passed(self) -> bool:
        return not self.missed and not self.false


def elephant_audit(cfg: BenchConfig, theta: float, ids: Sequence[int],
                   weights: Sequence[int]) -> ElephantAudit:
    if not (cfg.epsilon < as_fraction(theta) <= 1):
        raise ParameterError(f"theta must lie in (epsilon, 1], got {theta}")
    if cfg.algo == "cm":
        raise ParameterError("the Count-Min sketch cannot enumerate flows")
    algo = make_algo(cfg)
    replay(algo, ids, weights)
    oracle = ExactOracle()
    for x, w in zip(ids, weights):
        oracle.update(x, w)
    got = algo.elephants(theta)
    scanned = algo.elephants_scan_size() if hasattr(algo, "elephants_scan_size") else algo.entries()
    return ElephantAudit(
        reported=got,
        missed=oracle.elephants(theta) - got,
        false=got & oracle.non_elephants(theta, cfg.epsilon),
        scanned=scanned,
    )
