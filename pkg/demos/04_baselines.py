"""Space Saving and Count-Min next to IM-SUM on the same weighted trace.

    python3 demos/04_baselines.py
"""

from __future__ import annotations

from fractions import Fraction

from flowsum import CountMinSketch, ExactOracle, ImSum, SpaceSavingHeap, UniformPayload, ZipfSpec, params_new
from flowsum.traces import zipf_arrays

eps = Fraction(1, 2**7)
ids, weights = zipf_arrays(ZipfSpec(50_000, 0.9, 100_000, seed=4, weight_mode=UniformPayload(64, 1500)))
ids, weights = ids.tolist(), weights.tolist()

algos = {
    "imsum": ImSum(params_new(eps, 4)),
    "ssh": SpaceSavingHeap.for_epsilon(eps),
    "cm": CountMinSketch(eps, 2.0**-10, seed=1),
}
oracle = ExactOracle()
for x, w in zip(ids, weights):
    oracle.update(x, w)
    for a in algos.values():
        a.update(x, w)

bound = oracle.total * eps
print(f"R*eps = {float(bound):.0f}")
for name, a in algos.items():
    errs = [a.query(x) - f for x, f in oracle.counts.items()]
    over = sum(e > bound for e in errs)
    print(f"{name:6s} entries {a.entries():6d}  mean error {sum(errs) / len(errs):9.1f}  "
          f"max error {max(errs):7d}  over bound {over}")
