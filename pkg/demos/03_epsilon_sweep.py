"""Throughput and op counts across epsilon, written as a bench CSV.

The columns match ``flowsum bench`` so the file can be fed to any plotting
tool.  Timings depend on the machine; op counts do not.

    python3 demos/03_epsilon_sweep.py [out.csv]
"""

from __future__ import annotations

import sys

from flowsum.bench import BenchConfig, append_results, run_bench
from flowsum.traces import ZipfSpec, zipf_arrays

out = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
ids, weights = zipf_arrays(ZipfSpec(10**6, 1.0, 200_000, seed=1))
ids, weights = ids.tolist(), weights.tolist()

rows = []
for algo in ("imsum", "dimsum", "ssh", "exact"):
    for e in range(-8, -15, -2):
        r = run_bench(BenchConfig(algo, e, repeats=3, skew=1.0), ids, weights)
        rows.append(r)
        print(f"{algo:7s} eps=2^{e:<4d} {r.updates_per_ms:8.0f} upd/ms  mean ops {r.mean_ops:6.2f}  "
              f"max ops {r.max_ops:7d}  entries {r.peak_entries}")
append_results(out, rows)
print(f"appended {len(rows)} rows to {out}")
