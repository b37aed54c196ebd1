"""Acceptance suite: one check per criterion, each reporting PASS or FAIL.

Run with pytest (the summary lines appear at the end of the session) or
directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from flowsum.baselines import CountMinSketch, SpaceSavingHeap
from flowsum.core import OpCounter, params_new
from flowsum.dimsum import DimSum
from flowsum.imsum import ImSum
from flowsum.selection import C_SEL, SelectionTask, kth_largest, kth_largest_counted
from flowsum.traces import (
    TraceRecord,
    UniformPayload,
    Unit,
    ZipfSpec,
    encode_bin,
    read_bin,
    read_csv,
    write_bin,
    write_csv,
    zipf_arrays,
)

DATA = Path(__file__).parent / "data"
RESULTS: dict[int, tuple[bool, str]] = {}

SUITE_STREAMS = 200
SUITE_EPS = (4, 6, 8, 10)  # epsilon = 2**-e
SUITE_GAMMA = (1, 4)
SUITE_UNIVERSE = 2**16
CHECKPOINTS = 10  # evenly spaced, plus the stream end
THETAS = ("2eps", "4eps", 0.05, 0.1, 0.3)


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# -- suite (1): shared by criteria 1, 2, 3, 4, 8 and 10 --------------------


@dataclass
class SuiteStats:
    runs: int = 0
    checks: int = 0
    err_violations: int = 0
    q_violations: int = 0
    q_monotone_violations: int = 0
    gen_violations: int = 0
    min_gen_slack: int | None = None
    space_violations: int = 0
    peak_ratio: float = 0.0
    elephant_checks: int = 0
    elephant_violations: int = 0
    scan_violations: int = 0
    query_mismatches: int = 0
    ssh_checks: int = 0
    ssh_violations: int = 0
    ssh_audit_failures: int = 0
    schedule_violations: int = 0
    updates: int = 0
    seconds: float = 0.0


def suite_streams():
    rng = random.Random(20240601)
    for i in range(SUITE_STREAMS):
        skew = (0.7, 1.0, 1.3)[i % 3]
        mode = UniformPayload(64, 1500) if (i // 3) % 2 else Unit()
        length = int(round(10 ** rng.uniform(4, 5)))
        spec = ZipfSpec(SUITE_UNIVERSE, skew, length, seed=rng.getrandbits(64), weight_mode=mode)
        yield spec


def _estimate_vector(algo, universe: int) -> np.ndarray:
    """Vectorised ``query`` over ids 0..universe, following the lookup order."""
    if isinstance(algo, SpaceSavingHeap):
        est = np.full(universe + 1, algo.est[0] if algo.est else 0, dtype=np.int64)
        est[np.array(algo.ids, dtype=np.int64)] = algo.est
        return est
    est = np.full(universe + 1, algo.q, dtype=np.int64)
    layers = [algo.passive._d, algo.active._d]
    if isinstance(algo, DimSum):
        layers.insert(0, algo.pending._d)
    for d in layers:  # later layers shadow earlier ones
        if d:
            est[np.fromiter(d.keys(), np.int64, len(d))] = np.fromiter(d.values(), np.int64, len(d))
    return est


def _theta(t, e: int) -> Fraction:
    if t == "2eps":
        return Fraction(2, 2**e)
    if t == "4eps":
        return Fraction(4, 2**e)
    return Fraction(str(t))


def _check_point(st: SuiteStats, algos, counts: np.ndarray, r: int, e: int, rng: random.Random, final: bool):
    seen = np.nonzero(counts)[0] if r else np.zeros(0, dtype=np.int64)
    f = counts[seen]
    for name, a in algos.items():
        est = _estimate_vector(a, SUITE_UNIVERSE)[seen]
        err = est - f
        bad = int(np.count_nonzero((err < 0) | (err * 2**e > r)))
        if name == "ssh":
            st.ssh_checks += len(seen)
            st.ssh_violations += bad
            try:
                a.audit()
            except AssertionError:
                st.ssh_audit_failures += 1
            continue
        st.checks += len(seen)
        st.err_violations += bad
        # the vectorised path must agree with the public query()
        for x in rng.sample(list(seen), min(20, len(seen))):
            if a.query(int(x)) != est[np.searchsorted(seen, x)]:
                st.query_mismatches += 1
        # elephants at every checkpoint
        for t in THETAS:
            th = _theta(t, e)
            got = a.elephants(th)
            must = set(seen[f * th.denominator > r * th.numerator].tolist())
            eps = Fraction(1, 2**e)
            lim = th - eps
            never = set(seen[f * lim.denominator < r * lim.numerator].tolist())
            st.elephant_checks += 1
            if not must <= got or got & never:
                st.elephant_violations += 1
            if a.elephants_scan_size() > 2 * a.T:
                st.scan_violations += 1


def run_suite() -> SuiteStats:
    st = SuiteStats()
    rng = random.Random(7)
    t0 = time.perf_counter()
    for spec in suite_streams():
        ids_a, ws_a = zipf_arrays(spec)
        ids, ws = ids_a.tolist(), ws_a.tolist()
        n = len(ids)
        cps = sorted({max(1, (n * j) // (CHECKPOINTS + 1)) for j in range(1, CHECKPOINTS + 1)} | {n})
        prefix_counts = {}
        for c in cps:
            prefix_counts[c] = np.bincount(ids_a[:c].astype(np.int64), weights=ws_a[:c].astype(np.float64),
                                           minlength=SUITE_UNIVERSE + 1).astype(np.int64)
        totals = np.cumsum(ws_a.astype(np.int64))
        for e in SUITE_EPS:
            for g in SUITE_GAMMA:
                p = params_new(Fraction(1, 2**e), g)
                algos = {"imsum": ImSum(p), "dimsum": DimSum(p), "ssh": SpaceSavingHeap.for_epsilon(Fraction(1, 2**e))}
                ups = [a.update for a in algos.values()]
                start = 0
                for c in cps:
                    for fn in ups:
                        for x, w in zip(ids[start:c], ws[start:c]):
                            fn(x, w)
                    start = c
                    r = int(totals[c - 1])
                    _check_point(st, algos, prefix_counts[c], r, e, rng, c == n)
                st.runs += 1
                st.updates += n
                for name in ("imsum", "dimsum"):
                    a = algos[name]
                    gens = a.generations
                    # q only changes at swaps and R never decreases, so the
                    # bound at each swap implies it after every update
                    for gen in gens:
                        if gen.q * 2**e > int(totals[gen.update_index - 1]):
                            st.q_violations += 1
                    qs = [0] + [gen.q for gen in gens]
                    st.q_monotone_violations += sum(1 for a_, b_ in zip(qs, qs[1:]) if b_ < a_)
                    idx = [0] + [gen.update_index for gen in gens]
                    for a_, b_ in zip(idx, idx[1:]):
                        slack = (b_ - a_) - p.g_min
                        if slack < 0:
                            st.gen_violations += 1
                        if st.min_gen_slack is None or slack < st.min_gen_slack:
                            st.min_gen_slack = slack
                    peak = max(a.peak_entries, a.entries())
                    if peak > 2 * p.T:
                        st.space_violations += 1
                    st.peak_ratio = max(st.peak_ratio, peak / (2 * p.T))
                st.schedule_violations += algos["dimsum"].schedule_violations
    st.seconds = time.perf_counter() - t0
    return st


_SUITE: SuiteStats | None = None


@pytest.fixture(scope="module")
def suite() -> SuiteStats:
    global _SUITE
    if _SUITE is None:
        _SUITE = run_suite()
    return _SUITE


def test_c01_error_bound(suite):
    ok = suite.err_violations == 0 and suite.query_mismatches == 0 and suite.runs == SUITE_STREAMS * 8
    report(1, ok, f"{suite.runs} runs, {suite.checks} (algo, checkpoint, id) checks over IM-SUM and DIM-SUM, "
                  f"{suite.err_violations} violations, {suite.query_mismatches} query mismatches, "
                  f"{suite.updates} updates in {suite.seconds:.0f}s")
    assert ok


def test_c02_quantile_bound(suite):
    ok = suite.q_violations == 0 and suite.q_monotone_violations == 0
    report(2, ok, f"q*2^e <= R violations {suite.q_violations}, q decreases {suite.q_monotone_violations}")
    assert ok


def test_c03_generation_length(suite):
    ok = suite.gen_violations == 0
    report(3, ok, f"generations shorter than ceil(gamma/eps): {suite.gen_violations}, "
                  f"min slack {suite.min_gen_slack}")
    assert ok


def test_c04_space_bound(suite):
    ok = suite.space_violations == 0
    report(4, ok, f"peak entries > 2T: {suite.space_violations}, max peak/2T = {suite.peak_ratio:.3f}")
    assert ok


def test_c08_elephants(suite):
    ok = suite.elephant_violations == 0 and suite.scan_violations == 0 and suite.elephant_checks > 0
    report(8, ok, f"{suite.elephant_checks} elephant queries, {suite.elephant_violations} violations, "
                  f"{suite.scan_violations} scans over 2T")
    assert ok


# -- criterion 5 -------------------------------------------------------------


def _canonical(s) -> tuple[int, dict[int, int]]:
    """(q, resident estimates that differ from q): equal iff query() agrees everywhere."""
    q = s.q
    out = {x: v for x, v in s._resident() if v != q}
    return q, out


def test_c05_equivalence():
    rng = random.Random(555)
    divergences = 0
    updates = 0
    t0 = time.perf_counter()
    for _ in range(1000):
        e = rng.randint(2, 5)
        g = rng.choice([Fraction(1, 2), 1, 2, 4])
        p = params_new(Fraction(1, 2**e), g)
        a, b = ImSum(p), DimSum(p)
        universe = rng.choice([8, 64, 512])
        heavy = rng.random() < 0.5
        keys = set()
        qa, qb = [], []
        for _ in range(rng.randint(100, 1500)):
            x = int(universe ** rng.random()) if heavy else rng.randrange(universe)
            w = rng.randint(0, rng.choice([1, 10, 1000]))
            a.update(x, w)
            b.update(x, w)
            keys.add(x)
            updates += 1
            ca, cb = _canonical(a), _canonical(b)
            if ca != cb:
                divergences += 1
        qa = [gen.q for gen in a.generations]
        qb = [gen.q for gen in b.generations]
        if qa != qb:
            divergences += 1
        # direct spot check through the public query()
        if any(a.query(x) != b.query(x) for x in keys):
            divergences += 1
    ok = divergences == 0
    report(5, ok, f"1000 streams, {updates} updates compared, {divergences} divergences "
                  f"({time.perf_counter() - t0:.0f}s)")
    assert ok


# -- criterion 6 -------------------------------------------------------------


def test_c06_worst_case_slicing():
    ids_a, ws_a = zipf_arrays(ZipfSpec(10**6, 1.0, 10**6, seed=6))
    ids, ws = ids_a.tolist(), ws_a.tolist()
    maxima, bounds, violations = {}, {}, 0
    for e in (6, 8, 10, 12):
        c = OpCounter()
        s = DimSum(params_new(Fraction(1, 2**e), 4), c)
        try:
            for x, w in zip(ids, ws):
                s.update(x, w)
        except RuntimeError:
            violations += 1
        violations += s.schedule_violations
        maxima[e] = c.per_update_max
        bounds[e] = s.worst_case_bound()
    spread = max(maxima.values()) - min(maxima.values())
    # constant within +-1: every value lies within 1 of a common centre
    ok = violations == 0 and spread <= 2 and all(maxima[e] <= bounds[e] for e in maxima)
    report(6, ok, f"max ops per update by -log2(eps): {maxima} (spread {spread}), "
                  f"bound B = {sorted(set(bounds.values()))}, schedule violations {violations}")
    assert ok


# -- criterion 7 -------------------------------------------------------------


def test_c07_amortized_vs_ssh():
    im, ssh = {}, {}
    for e in range(8, 17):
        p = params_new(Fraction(1, 2**e), 4)
        length = max(8 * p.T, 200_000)
        ids_a, ws_a = zipf_arrays(ZipfSpec(10**7, 0.7, length, seed=70 + e, weight_mode=UniformPayload(64, 1500)))
        ids, ws = ids_a.tolist(), ws_a.tolist()
        c = OpCounter()
        s = ImSum(p, c)
        h = SpaceSavingHeap.for_epsilon(Fraction(1, 2**e), count_ops=True)
        for x, w in zip(ids, ws):
            s.update(x, w)
        for x, w in zip(ids, ws):
            h.update(x, w)
        im[e] = c.mean()
        ssh[e] = h.mean_ops()
    ratio = max(im.values()) / min(im.values())
    seq = [ssh[e] for e in sorted(ssh)]
    increasing = all(b > a for a, b in zip(seq, seq[1:]))
    ok = ratio < 2 and increasing
    report(7, ok, f"IM-SUM mean ops max/min = {ratio:.2f} "
                  f"({', '.join(f'{im[e]:.1f}' for e in sorted(im))}); SSH mean ops "
                  f"({', '.join(f'{v:.1f}' for v in seq)}) strictly increasing: {increasing}")
    assert ok


# -- criterion 9 -------------------------------------------------------------


def test_c09_selection_oracle():
    rng = random.Random(99)
    wrong = resumed_wrong = over = 0
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(10_000):
        n = rng.randint(1, 512)
        hi = rng.choice([1, 4, 16, 10**6])
        vals = [rng.randint(0, hi) for _ in range(n)]
        k = rng.randint(1, n)
        truth = sorted(vals, reverse=True)[k - 1]
        v, ops = kth_largest_counted(vals, k)
        if v != truth or kth_largest(vals, k) != truth:
            wrong += 1
        t = SelectionTask(vals, k)
        while not t.done:
            t.step(rng.randint(1, 64))
        if t.result != truth:
            resumed_wrong += 1
        if max(ops, t.ops_spent) > C_SEL * n:
            over += 1
        worst = max(worst, ops / n)
    ok = wrong == resumed_wrong == over == 0
    report(9, ok, f"10000 instances: {wrong} wrong one-shot, {resumed_wrong} wrong resumable, "
                  f"{over} over {C_SEL}n (worst {worst:.1f}n, {time.perf_counter() - t0:.0f}s)")
    assert ok


# -- criterion 10 ------------------------------------------------------------


def test_c10_baselines(suite):
    ssh_ok = suite.ssh_violations == 0 and suite.ssh_audit_failures == 0
    ids_a, ws_a = zipf_arrays(ZipfSpec(5000, 1.0, 10_000, seed=10))
    ids, ws = ids_a.tolist(), ws_a.tolist()
    counts = {}
    for x, w in zip(ids, ws):
        counts[x] = counts.get(x, 0) + w
    total = sum(ws)
    eps, delta = Fraction(1, 2**8), 2.0**-3
    trials = fails = under = 0
    conserved = True
    for seed in range(200):
        cm = CountMinSketch(eps, delta, seed=seed)
        for x, w in zip(ids, ws):
            cm.update(x, w)
        conserved &= cm.row_sums() == [total] * cm.depth
        for x, f in counts.items():
            est = cm.query(x)
            trials += 1
            under += est < f
            fails += (est - f) * eps.denominator > total * eps.numerator
    frac = fails / trials
    tol = delta + 3 * math.sqrt(delta * (1 - delta) / trials)
    cm_ok = under == 0 and conserved and frac <= tol
    ok = ssh_ok and cm_ok
    report(10, ok, f"SSH: {suite.ssh_checks} checks, {suite.ssh_violations} violations, "
                   f"{suite.ssh_audit_failures} heap audit failures; CM: failure fraction {frac:.5f} "
                   f"<= {tol:.5f} over {trials} (seed, id) pairs, underestimates {under}, "
                   f"row sums conserved {conserved}")
    assert ok


# -- criterion 11 ------------------------------------------------------------


def test_c11_zipf_generator():
    n, s, draws = 10**4, 1.0, 10**6
    spec = ZipfSpec(n, s, draws, seed=11)
    ids, _ = zipf_arrays(spec)
    h = sum(Fraction(1, i) for i in range(1, n + 1))
    freq = np.bincount(ids.astype(np.int64), minlength=11)
    worst = 0.0
    for i in range(1, 11):
        p = float(Fraction(1, i) / h)
        z = abs(int(freq[i]) - draws * p) / math.sqrt(draws * p * (1 - p))
        worst = max(worst, z)
    deterministic = encode_bin(zipf_arrays(spec)) == encode_bin((ids, _))
    ok = worst <= 3 and deterministic
    report(11, ok, f"top-10 max |z| = {worst:.2f} (limit 3), byte-identical rerun: {deterministic}")
    assert ok


# -- criterion 12 ------------------------------------------------------------


def test_c12_io_formats(tmp_path):
    rng = random.Random(12)
    extremes = [0, 1, 2**63, 2**64 - 1]
    bad = 0
    for i in range(100):
        recs = [TraceRecord(rng.getrandbits(64), rng.choice(extremes + [rng.getrandbits(64)]))
                for _ in range(rng.randint(0, 60))]
        write_csv(tmp_path / "r.csv", recs)
        write_bin(tmp_path / "r.bin", recs)
        bad += read_csv(tmp_path / "r.csv") != recs
        bad += read_bin(tmp_path / "r.bin") != recs
    golden = [TraceRecord(1, 5), TraceRecord(42, 2**64 - 1), TraceRecord(0xDEADBEEF, 0)]
    write_bin(tmp_path / "g.bin", golden)
    golden_bytes = (DATA / "golden3.bin").read_bytes()
    byte_exact = (tmp_path / "g.bin").read_bytes() == golden_bytes and len(golden_bytes) == 48
    decoded = read_bin(DATA / "golden3.bin") == golden
    ok = bad == 0 and byte_exact and decoded
    report(12, ok, f"200 randomized round-trips, {bad} mismatches; golden file byte-exact: {byte_exact}, "
                   f"decodes: {decoded}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
