"""Estimate flow volumes on a skewed trace and compare against exact counts.

    python3 demos/01_quickstart.py
"""

from __future__ import annotations

from fractions import Fraction

from flowsum import ExactOracle, ImSum, UniformPayload, ZipfSpec, params_new
from flowsum.traces import zipf_arrays

eps = Fraction(1, 2**8)
params = params_new(eps, 4)
print(f"epsilon={eps}  k={params.k}  T={params.T}  g_min={params.g_min}")

ids, weights = zipf_arrays(ZipfSpec(100_000, 1.1, 300_000, seed=3, weight_mode=UniformPayload(64, 1500)))
summary, oracle = ImSum(params), ExactOracle()
for x, w in zip(ids.tolist(), weights.tolist()):
    summary.update(x, w)
    oracle.update(x, w)

r = oracle.total
print(f"{len(oracle.counts)} distinct flows, R={r}, allowed error R*eps={float(r * eps):.0f}")
print(f"resident entries {summary.entries()} (2T = {2 * params.T}), q={summary.q}")

worst = max(summary.query(x) - f for x, f in oracle.counts.items())
print(f"largest overestimate {worst}")

print("\n  id        true   estimate")
for x, f in sorted(oracle.counts.items(), key=lambda kv: -kv[1])[:8]:
    print(f"{x:4d} {f:11d} {summary.query(x):10d}")

theta = 0.02
got = summary.elephants(theta)
print(f"\nflows above {theta:.0%} of the volume: {sorted(got)}")
print(f"exact answer: {sorted(oracle.elephants(theta))}")
