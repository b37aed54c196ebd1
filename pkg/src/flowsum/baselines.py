"""Baselines: heap-based Space Saving (SSH) and the Count-Min sketch."""

from __future__ import annotations

import math

import numpy as np

from .core import MAX_U64, ParameterError, VolumeOverflow, as_fraction
from .imsum import elephant_threshold

MERSENNE_89 = (1 << 89) - 1


class SpaceSavingHeap:
    """Space Saving with ``ceil(1/epsilon)`` counters kept in a binary min-heap.

    ``est`` and ``ids`` are parallel arrays in heap order; ``index`` maps a
    flow id to its heap slot.  When ``count_ops`` is set, each comparison,
    slot swap and index access adds one to ``ops``.

    >>> s = SpaceSavingHeap(2)
    >>> for x, w in [("a", 5), ("b", 3), ("c", 2)]:
    ...     s.update(x, w)
    >>> s.query("a"), s.query("c"), s.query("b")
    (5, 5, 5)
    """

    def __init__(self, capacity: int, *, count_ops: bool = False):
        if capacity < 1:
            raise ParameterError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.est: list[int] = []
        self.ids: list = []
        self.index: dict = {}
        self.total_r = 0
        self.ops = 0
        self.ops_max = 0
        self.updates = 0
        self.count_ops = count_ops

    @classmethod
    def for_epsilon(cls, epsilon: float, **kw) -> SpaceSavingHeap:
        eps = as_fraction(epsilon)
        if not (0 < eps <= 1):
            raise ParameterError(f"epsilon must lie in (0, 1], got {epsilon!r}")
        return cls(math.ceil(1 / eps), **kw)

    def __len__(self) -> int:
        return len(self.est)

    def entries(self) -> int:
        return len(self.est)

    def _sift_down(self, i: int) -> int:
        est, ids, index = self.est, self.ids, self.index
        n = len(est)
        v, x = est[i], ids[i]
        ops = 0
        while True:
            c = 2 * i + 1
            if c >= n:
                break
            r = c + 1
            if r < n:
                ops += 1
                if est[r] < est[c]:
                    c = r
            ops += 1
            if est[c] >= v:
                break
            est[i] = est[c]
            ids[i] = ids[c]
            index[ids[i]] = i
            ops += 1
            i = c
        est[i] = v
        ids[i] = x
        index[x] = i
        return ops + 1

    def _sift_up(self, i: int) -> int:
        est, ids, index = self.est, self.ids, self.index
        v, x = est[i], ids[i]
        ops = 0
        while i:
            p = (i - 1) >> 1
            ops += 1
            if est[p] <= v:
                break
            est[i] = est[p]
            ids[i] = ids[p]
            index[ids[i]] = i
            ops += 1
            i = p
        est[i] = v
        ids[i] = x
        index[x] = i
        return ops + 1

    def update(self, x, w: int) -> None:
        r = self.total_r + w
        if r > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.total_r = r
        self.updates += 1
        i = self.index.get(x)
        if i is not None:
            self.est[i] += w
            ops = self._sift_down(i)
        elif len(self.est) < self.capacity:
            self.est.append(w)
            self.ids.append(x)
            ops = self._sift_up(len(self.est) - 1)
        else:
            # evict the minimum; the newcomer inherits its count
            del self.index[self.ids[0]]
            self.ids[0] = x
            self.est[0] += w
            ops = 1 + self._sift_down(0)
        if self.count_ops:
            ops += 1  # index lookup
            self.ops += ops
            if ops > self.ops_max:
                self.ops_max = ops

    def query(self, x) -> int:
        i = self.index.get(x)
        if i is not None:
            return self.est[i]
        return self.est[0] if self.est else 0

    def mean_ops(self) -> float:
        return self.ops / self.updates if self.updates else 0.0

    def audit(self) -> None:
        """Raise AssertionError unless the heap and index are consistent."""
        est, ids = self.est, self.ids
        n = len(est)
        assert n <= self.capacity, "heap over capacity"
        assert len(ids) == n == len(self.index), "heap/index size mismatch"
        for i in range(1, n):
            assert est[(i - 1) >> 1] <= est[i], f"heap order broken at slot {i}"
        for x, i in self.index.items():
            assert ids[i] == x, f"index points {x} at slot {i} holding {ids[i]}"

    def elephants(self, theta: float) -> set:
        thr = elephant_threshold(self.total_r, theta)
        return {x for x, v in zip(self.ids, self.est) if v >= thr}


def ssh_update(s: SpaceSavingHeap, x, w: int) -> None:
    s.update(x, w)


def ssh_query(s: SpaceSavingHeap, x) -> int:
    return s.query(x)


class CountMinSketch:
    """Count-Min sketch with ``ceil(ln 1/delta)`` rows of ``ceil(e/epsilon)`` cells.

    Row ``i`` hashes with ``((a_i * x + b_i) mod p) mod width`` for the
    Mersenne prime ``p = 2**89 - 1``, a pairwise-independent family over
    64-bit ids.  ``(a_i, b_i)`` are drawn from a seeded PCG64 generator.

    >>> cm = CountMinSketch(0.25, 0.1, seed=1)
    >>> cm.update(7, 5); cm.query(7), cm.query(8) <= 5
    (5, True)
    """

    def __init__(self, epsilon: float, delta: float, *, seed: int = 0,
                 depth: int | None = None, width: int | None = None):
        eps = as_fraction(epsilon)
        if not (0 < eps <= 1):
            raise ParameterError(f"epsilon must lie in (0, 1], got {epsilon!r}")
        if not (0 < delta < 1):
            raise ParameterError(f"delta must lie in (0, 1), got {delta!r}")
        self.epsilon = epsilon
        self.delta = delta
        self.depth = depth if depth is not None else max(1, math.ceil(math.log(1 / delta)))
        self.width = width if width is not None else math.ceil(math.e / float(eps))
        rng = np.random.Generator(np.random.PCG64(seed))
        self.hash_seeds = [
            (_draw96(rng) % (MERSENNE_89 - 1) + 1, _draw96(rng) % MERSENNE_89) for _ in range(self.depth)
        ]
        self.cells = [[0] * self.width for _ in range(self.depth)]
        self.total_r = 0
        self.ops = 0
        self.updates = 0

    def _slots(self, x: int):
        w = self.width
        return [((a * x + b) % MERSENNE_89) % w for a, b in self.hash_seeds]

    def update(self, x: int, w: int) -> None:
        r = self.total_r + w
        if r > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.total_r = r
        for row, j in zip(self.cells, self._slots(x)):
            row[j] += w
        self.ops += self.depth
        self.updates += 1

    def query(self, x: int) -> int:
        return min(row[j] for row, j in zip(self.cells, self._slots(x)))

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.cells]

    def entries(self) -> int:
        return self.depth * self.width

    def mean_ops(self) -> float:
        return self.ops / self.updates if self.updates else 0.0


def _draw96(rng: np.random.Generator) -> int:
    return int.from_bytes(rng.bytes(12), "little")


def cm_update(s: CountMinSketch, x: int, w: int) -> None:
    s.update(x, w)


def cm_query(s: CountMinSketch, x: int) -> int:
    return s.query(x)
