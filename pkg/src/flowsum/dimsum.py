"""DIM-SUM: the de-amortized summary with O(1) worst-case updates.

DIM-SUM answers every query exactly as IM-SUM would on the same stream.
The difference is *when* maintenance work happens: instead of one linear
pass at each swap, the work for the next swap is cut into slices, and
before each update ``ceil(M / U)`` basic operations are performed, where
``M`` is the remaining maintenance budget and ``U`` a lower bound on the
number of updates left before the active table fills.

A maintenance cycle runs through these phases, in order:

``COPYING``
    move the survivors of the previous passive table (held in
    ``pending``) into the active table;
``COLLECTING``
    snapshot the frozen passive table into id/value arrays;
``SELECTING``
    resumable median-of-medians for the k-th largest snapshot value;
``SCANNING``
    collect snapshot entries strictly above the new quantile that are not
    in the active table; they become ``pending`` at the next swap.

Survivors waiting in ``pending`` are part of the logical active table: they
count towards its capacity and are looked up after the passive table.
"""

from __future__ import annotations

import math
from enum import IntEnum

from .core import MAX_U64, CapacityExceeded, FlowTable, OpCounter, Params, VolumeOverflow
from .imsum import _TwoTableSummary
from .selection import C_SEL, Done, SelectionTask


class Phase(IntEnum):
    IDLE = 0
    COPYING = 1
    COLLECTING = 2
    SELECTING = 3
    SCANNING = 4


class ScheduleViolation(RuntimeError):
    """The active table filled before maintenance finished."""


class DimSum(_TwoTableSummary):
    """Worst-case O(1) summary with the same observable behaviour as IM-SUM.

    >>> from flowsum.core import params_new
    >>> s = DimSum(params_new(0.5, 1))
    >>> for x, w in [(1, 5), (2, 3), (3, 2), (4, 1), (1, 2), (5, 4)]:
    ...     s.update(x, w)
    >>> s.q, s.query(2), sorted(s.elephants(0.3))
    (3, 3, [1])
    """

    def __init__(self, params: Params, counter: OpCounter | None = None, *, c_sel: int = C_SEL):
        super().__init__(params, counter)
        self.c_sel = c_sel
        self.pending = FlowTable(max(1, self.k - 1))
        self.candidates = FlowTable(max(1, self.k - 1))
        self.phase = Phase.IDLE
        self.remaining_m = 0
        self.q_next = 0
        self.sel_task: SelectionTask | None = None
        self.snap_ids: list[int] = []
        self.snap_vals: list[int] = []
        self._cursor = 0
        self._collect_iter = None
        self._scan_owed = 0  # 1: conditional insert of the last scanned entry owed
        self._u_slack = 0
        self.max_slice = 0
        self.schedule_violations = 0

    # -- reads ------------------------------------------------------------

    def query(self, x: int) -> int:
        v = self.active._d.get(x)
        if v is None:
            v = self.passive._d.get(x)
            if v is None:
                v = self.pending._d.get(x)
                if v is None:
                    return self.q
        return v

    def _resident(self):
        yield from super()._resident()
        yield from self.pending._d.items()

    def elephants_scan_size(self) -> int:
        return len(self.active) + len(self.passive) + len(self.pending)

    def entries(self) -> int:
        return len(self.active) + len(self.passive) + len(self.pending)

    def remaining_u(self) -> int:
        """Lower bound on the updates left before the active table fills.

        Pending survivors are counted as if there were k - 1 of them, so the
        first slice of every cycle is sized against ``g_min`` updates.
        """
        return max(1, self.T - len(self.active) - len(self.pending) - self._u_slack)

    # -- updates ----------------------------------------------------------

    def update(self, x: int, w: int) -> None:
        c = self.counter
        cost = 0
        if self.phase:
            m = self.remaining_m
            budget = min(-(-m // self.remaining_u()), m)
            if budget:
                done = self.maintenance_slice(budget)
                cost += done
                if done > self.max_slice:
                    self.max_slice = done
        a = self.active._d
        ops = 1
        v = a.get(x)
        if v is None:
            ops += 1
            v = self.passive._d.get(x)
            if v is None:
                pend = self.pending._d
                if pend:
                    ops += 1
                    v = pend.pop(x, None)
                if v is None:
                    v = self.q
            cand = self.candidates._d
            if cand:
                ops += 1
                cand.pop(x, None)
        r = self.total_r + w
        if r > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.total_r = r
        a[x] = v + w
        ops += 1
        self.n_updates += 1
        filled = len(a) + len(self.pending._d)
        if filled >= self.T:
            if filled > self.T:
                raise CapacityExceeded(f"active table holds {filled} > {self.T} entries")
            ops += self._swap()
        if c is not None:
            c.table_ops += ops
            c.close_update(cost + ops)

    def _swap(self) -> int:
        if self.phase:
            self.schedule_violations += 1
            raise ScheduleViolation(
                f"active table filled in phase {self.phase.name} with {self.remaining_m} ops budgeted"
            )
        self.peak_entries = max(self.peak_entries, self.entries())
        self.q = self.q_next
        retired = self.passive
        retired.clear()
        self.passive = self.active
        self.active = retired
        self.pending, self.candidates = self.candidates, self.pending
        self._record_swap()
        self._start_cycle()
        return 1

    def _start_cycle(self) -> None:
        n = len(self.passive)
        self.snap_ids = []
        self.snap_vals = []
        self._collect_iter = iter(self.passive._d.items())
        self._cursor = 0
        self._scan_owed = 0
        self.sel_task = None
        self.q_next = self.q
        self._u_slack = self.k - 1 - len(self.pending)
        sel = self.c_sel * n if n >= self.k else 0
        # copy: one move each; scan: one comparison each plus one
        # conditional insert for each of at most k - 1 survivors
        self.remaining_m = len(self.pending) + n + sel + n + (self.k - 1)
        self.phase = Phase.COPYING if len(self.pending) else Phase.COLLECTING
        if n == 0 and not len(self.pending):
            self.phase = Phase.IDLE
            self.remaining_m = 0

    def maintenance_slice(self, budget: int) -> int:
        """Advance maintenance by at most ``budget`` basic operations."""
        if budget < 1:
            raise ValueError("budget must be at least 1")
        spent = 0
        while spent < budget and self.phase:
            ph = self.phase
            left = budget - spent
            if ph == Phase.COPYING:
                spent += self._copy(left)
            elif ph == Phase.COLLECTING:
                spent += self._collect(left)
            elif ph == Phase.SELECTING:
                spent += self._select(left)
            else:
                spent += self._scan(left)
        self.remaining_m -= spent
        if self.remaining_m < 0:
            raise AssertionError("maintenance overran its budget")
        if self.counter is not None:
            self.counter.selection_ops += spent
        return spent

    def _copy(self, budget: int) -> int:
        pend = self.pending._d
        a = self.active._d
        moves = min(len(pend), budget)
        for _ in range(moves):
            x, v = pend.popitem()
            a[x] = v
        if not pend:
            self.phase = Phase.COLLECTING
        return moves

    def _collect(self, budget: int) -> int:
        it = self._collect_iter
        ids, vals = self.snap_ids, self.snap_vals
        done = 0
        for x, v in it:
            ids.append(x)
            vals.append(v)
            done += 1
            if done == budget:
                break
        if len(ids) == len(self.passive):
            self._collect_iter = None
            if len(vals) >= self.k:
                self.sel_task = SelectionTask(vals, self.k, c_sel=self.c_sel, copy=True)
                self.phase = Phase.SELECTING
            else:
                self.phase = Phase.SCANNING
        return done

    def _select(self, budget: int) -> int:
        task = self.sel_task
        before = task.ops_spent
        st = task.step(budget)
        if isinstance(st, Done):
            if st.value < self.q:
                self.selection_regressions += 1
            else:
                self.q_next = st.value
            self.sel_task = None
            self.phase = Phase.SCANNING
        return task.ops_spent - before

    def _scan(self, budget: int) -> int:
        ids, vals = self.snap_ids, self.snap_vals
        q = self.q_next
        a = self.active._d
        cand = self.candidates._d
        n = len(vals)
        i = self._cursor
        spent = 0
        while spent < budget:
            if self._scan_owed:
                # conditional insert: probing the active table and inserting
                # form one table operation, so no update can slip in between
                x = ids[i - 1]
                if x not in a:
                    cand[x] = vals[i - 1]
                spent += 1
                self._scan_owed = 0
                continue
            if i >= n:
                break
            spent += 1
            if vals[i] > q:
                self._scan_owed = 1
            i += 1
        self._cursor = i
        if i >= n and not self._scan_owed:
            if len(cand) >= self.k:
                raise AssertionError(f"{len(cand)} survivors exceed k - 1 = {self.k - 1}")
            self.phase = Phase.IDLE
            self.snap_ids = []
            self.snap_vals = []
        return spent

    def worst_case_bound(self) -> int:
        """Per-update op bound ``B`` implied by the slicing schedule."""
        T, g, k = self.T, self.params.g_min, self.k
        return math.ceil(((self.c_sel + 2) * T + 2 * (k - 1)) / g) + 6
