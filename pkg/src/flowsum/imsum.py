"""IM-SUM: weighted volume estimation with amortized O(1) updates.

Two bounded tables are kept.  Updates write only the *active* table;
queries read active, then passive, then fall back to the quantile ``q``.
When the active table fills, the passive table (frozen since the previous
swap) is maintained in one go and the tables switch roles:

1. ``q`` becomes the k-th largest passive value (k = ceil(1/epsilon));
2. passive entries strictly above ``q`` that are not in the full active
   table survive and seed the next active table;
3. the passive table is flushed;
4. the full active table becomes the new passive table.

At most k - 1 entries survive, so every generation lasts at least
``g_min`` updates and neither table ever holds more than ``T`` entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core import MAX_U64, as_fraction, CapacityExceeded, FlowTable, OpCounter, Params, VolumeOverflow
from .selection import kth_largest_counted


@dataclass(frozen=True)
class Generation:
    """Snapshot taken at a table swap."""

    update_index: int  # number of updates processed when the swap happened
    q: int
    total: int


def elephant_threshold(total: int, theta: float) -> int:
    """Smallest integer estimate that satisfies ``est >= total * theta``."""
    return math.ceil(total * as_fraction(theta))


class _TwoTableSummary:
    """State and read-side operations shared by IM-SUM and DIM-SUM."""

    def __init__(self, params: Params, counter: OpCounter | None = None):
        self.params = params
        self.k = params.k
        self.T = params.table_capacity
        self.active = FlowTable(self.T)
        self.passive = FlowTable(self.T)
        self.q = 0
        self.total_r = 0
        self.n_updates = 0
        self.generation = 0
        self.generations: list[Generation] = []
        self.peak_entries = 0
        self.selection_regressions = 0
        self.counter = counter

    # -- reads ------------------------------------------------------------

    def query(self, x: int) -> int:
        v = self.active._d.get(x)
        if v is None:
            v = self.passive._d.get(x)
            if v is None:
                return self.q
        return v

    def total_weight(self) -> int:
        return self.total_r

    def _resident(self) -> Iterable[tuple[int, int]]:
        a = self.active._d
        yield from a.items()
        for x, v in self.passive._d.items():
            if x not in a:
                yield x, v

    def elephants(self, theta: float) -> set[int]:
        """Flows whose estimate is at least ``total * theta``.

        Only the resident entries are scanned, at most ``2T`` of them.
        """
        if not (0 < theta <= 1):
            raise ValueError(f"theta must lie in (0, 1], got {theta!r}")
        thr = elephant_threshold(self.total_r, theta)
        return {x for x, v in self._resident() if v >= thr}

    def elephants_scan_size(self) -> int:
        return len(self.active) + len(self.passive)

    def entries(self) -> int:
        return len(self.active) + len(self.passive)

    def estimates(self) -> dict[int, int]:
        """Resident estimates, active shadowing passive."""
        return dict(self._resident())

    def _bump_total(self, w: int) -> None:
        r = self.total_r + w
        if r > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.total_r = r

    def _record_swap(self) -> None:
        self.generation += 1
        self.generations.append(Generation(self.n_updates, self.q, self.total_r))

    def feed(self, ids: Iterable[int], weights: Iterable[int]) -> None:
        upd = self.update
        for x, w in zip(ids, weights):
            upd(x, w)


class ImSum(_TwoTableSummary):
    """Amortized-O(1) summary; maintenance runs serially at each swap.

    >>> from flowsum.core import params_new
    >>> s = ImSum(params_new(0.5, 1))
    >>> for x, w in [(1, 5), (2, 3), (3, 2), (4, 1), (1, 2), (5, 4)]:
    ...     s.update(x, w)
    >>> s.q, s.query(2), s.query(1)
    (3, 3, 7)
    """

    def __init__(self, params: Params, counter: OpCounter | None = None):
        super().__init__(params, counter)
        if counter is not None:
            self.update = self._update_counted

    def update(self, x: int, w: int) -> None:
        a = self.active._d
        v = a.get(x)
        if v is None:
            v = self.passive._d.get(x)
            if v is None:
                v = self.q
        r = self.total_r + w
        if r > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.total_r = r
        a[x] = v + w
        self.n_updates += 1
        if len(a) >= self.T:
            self.maintain()

    def _update_counted(self, x: int, w: int) -> None:
        c = self.counter
        before = c.total()
        a = self.active._d
        ops = 1
        v = a.get(x)
        if v is None:
            ops += 1
            v = self.passive._d.get(x)
            if v is None:
                v = self.q
        self._bump_total(w)
        a[x] = v + w
        ops += 1
        c.table_ops += ops
        self.n_updates += 1
        if len(a) >= self.T:
            self.maintain()
        c.close_update(c.total() - before)

    def maintain(self) -> None:
        """Retire the passive table and swap.  Requires a full active table."""
        a = self.active._d
        if len(a) != self.T:
            if len(a) > self.T:
                raise CapacityExceeded(f"active table holds {len(a)} > {self.T} entries")
            raise RuntimeError("maintain() called before the active table filled")
        c = self.counter
        p = self.passive._d
        n = len(p)
        q = self.q
        if n >= self.k:
            cand, sel_ops = kth_largest_counted(list(p.values()), self.k, copy=False)
            if c is not None:
                c.table_ops += n  # collecting the values
                c.selection_ops += sel_ops
            if cand < q:
                self.selection_regressions += 1
            else:
                q = cand
        survivors = {y: v for y, v in p.items() if v > q and y not in a}
        if c is not None:
            c.selection_ops += n  # one comparison per passive entry
            c.table_ops += 2 * len(survivors) + 1  # membership + insert, then flush
        if len(survivors) >= self.k:
            raise AssertionError(f"{len(survivors)} survivors exceed k - 1 = {self.k - 1}")
        self.peak_entries = max(self.peak_entries, len(a) + n)
        self.q = q
        fresh = self.passive
        fresh.clear()
        fresh._d.update(survivors)
        self.passive = self.active
        self.active = fresh
        self._record_swap()
