"""Per-update cost: IM-SUM pays for maintenance in bursts, DIM-SUM spreads it.

Both summaries see the same stream and end in the same state; only the
distribution of work over updates differs.

    python3 demos/02_worst_case_updates.py
"""

from __future__ import annotations

from fractions import Fraction

from flowsum import DimSum, ImSum, OpCounter, ZipfSpec, params_new
from flowsum.traces import zipf_arrays

ids, weights = zipf_arrays(ZipfSpec(10**6, 1.0, 400_000, seed=5))
ids, weights = ids.tolist(), weights.tolist()

print(" -log2(eps)  IM-SUM mean/max      DIM-SUM mean/max   bound B  generations")
for e in (6, 8, 10, 12):
    p = params_new(Fraction(1, 2**e), 4)
    ci, cd = OpCounter(), OpCounter()
    im, dim = ImSum(p, ci), DimSum(p, cd)
    for x, w in zip(ids, weights):
        im.update(x, w)
        dim.update(x, w)
    assert im.estimates() == {x: dim.query(x) for x in im.estimates()}
    print(f"{e:10d}  {ci.mean():6.2f} / {ci.per_update_max:8d}   {cd.mean():6.2f} / {cd.per_update_max:4d}"
          f"   {dim.worst_case_bound():7d}  {dim.generation:11d}")
