"""Deterministic linear-time selection of the k-th largest value.

The algorithm is median-of-medians with groups of five and a three-way
partition.  Recursion is replaced by an explicit stack of frames so that a
selection can be paused after any single basic operation and resumed later,
which is what the de-amortized summary needs.

A *basic operation* is one element comparison (a three-way comparison
counts once) or one element move (appending or shifting a value).
Bookkeeping on cursors and list lengths is free.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

C_SEL = 24
"""Default constant in the ``ops <= C_SEL * n`` bound."""

SMALL = 5
"""Subproblems of at most this many values are insertion-sorted."""

_GROUPS, _PIVOT, _PARTITION, _SMALL_SORT = range(4)
_MED5_OPS = 7  # 6 comparisons + 1 move of the median


class RankError(ValueError):
    """Requested rank is outside ``1..len(values)``."""


@dataclass(frozen=True)
class Done:
    value: int


class InProgress:
    __slots__ = ()

    def __repr__(self) -> str:
        return "InProgress"


IN_PROGRESS = InProgress()


def _median5(a: int, b: int, c: int, d: int, e: int) -> int:
    # 6 comparisons; mirrors the stepwise version in _Frame._med5_step
    if a > b:
        a, b = b, a
    if c > d:
        c, d = d, c
    if a <= c:
        x1, x2 = (e, b) if e <= b else (b, e)
        y1, y2 = c, d
    else:
        x1, x2 = (e, d) if e <= d else (d, e)
        y1, y2 = a, b
    if x1 <= y1:
        return x2 if x2 <= y1 else y1
    return y2 if y2 <= x1 else x1


class _Frame:
    """One pending subproblem: the ``r``-th largest (0-based) of ``arr``."""

    __slots__ = (
        "arr", "r", "stage", "i", "meds", "pivot", "gt", "lt", "eq",
        "pending", "g", "pc", "buf", "j", "key",
    )

    def __init__(self, arr: list[int], r: int):
        self.reset(arr, r)

    def reset(self, arr: list[int], r: int) -> None:
        self.arr = arr
        self.r = r
        self.i = 0
        self.pivot = None
        self.pending = 0  # 1: move into gt owed, -1: move into lt owed
        self.pc = 0
        self.g = None
        if len(arr) <= SMALL:
            self.stage = _SMALL_SORT
            self.buf: list[int] = []
            self.j = -1
            self.key = None
        else:
            self.stage = _GROUPS
            self.meds: list[int] = []

    # -- group medians ----------------------------------------------------

    def _med5_step(self) -> int | None:
        """Run one comparison/move of the current group; return median when moved."""
        g = self.g
        pc = self.pc
        if pc == 0:
            if g[0] > g[1]:
                g[0], g[1] = g[1], g[0]
        elif pc == 1:
            if g[2] > g[3]:
                g[2], g[3] = g[3], g[2]
        elif pc == 2:
            a, b, c, d, e = g
            # after this step g = [x_other, e, y1, y2, -] with x_other paired with e
            if a <= c:
                g[:] = [b, e, c, d, None]
            else:
                g[:] = [d, e, a, b, None]
        elif pc == 3:
            if g[1] <= g[0]:
                g[0], g[1] = g[1], g[0]
        elif pc == 4:
            x1, x2, y1, y2, _ = g
            g[:] = [x2, y1, None, None, None] if x1 <= y1 else [y2, x1, None, None, None]
        elif pc == 5:
            g[0] = g[0] if g[0] <= g[1] else g[1]
        else:
            self.meds.append(g[0])
            self.pc = 0
            self.g = None
            return g[0]
        self.pc = pc + 1
        return None

    def run_groups(self, budget: int) -> int:
        arr = self.arr
        n = len(arr)
        full = n - n % 5
        meds = self.meds
        spent = 0
        while spent < budget:
            if self.g is not None:
                self._med5_step()
                spent += 1
                if self.g is None:
                    self.i += 5
                continue
            i = self.i
            if i >= n:
                self.stage = _PIVOT
                return spent
            if i >= full:
                # partial trailing group: its first element stands in as median
                meds.append(arr[i])
                spent += 1
                self.i = n
                continue
            room = (budget - spent) // _MED5_OPS
            if room:
                stop = min(full, i + 5 * room)
                med = _median5
                for s in range(i, stop, 5):
                    meds.append(med(arr[s], arr[s + 1], arr[s + 2], arr[s + 3], arr[s + 4]))
                spent += (stop - i) // 5 * _MED5_OPS
                self.i = stop
            else:
                self.g = arr[i:i + 5]
                self.pc = 0
        if self.g is None and self.i >= n:
            self.stage = _PIVOT
        return spent

    # -- partition --------------------------------------------------------

    def run_partition(self, budget: int) -> int:
        arr = self.arr
        n = len(arr)
        p = self.pivot
        gt, lt = self.gt, self.lt
        spent = 0
        if self.pending and spent < budget:
            (gt if self.pending > 0 else lt).append(arr[self.i - 1])
            self.pending = 0
            spent += 1
        while spent < budget and self.i < n:
            room = (budget - spent) // 2
            if room:
                i = self.i
                stop = min(n, i + room)
                g0, l0 = len(gt), len(lt)
                eq = 0
                for v in arr[i:stop]:
                    if v > p:
                        gt.append(v)
                    elif v < p:
                        lt.append(v)
                    else:
                        eq += 1
                self.eq += eq
                spent += (stop - i) + (len(gt) - g0) + (len(lt) - l0)
                self.i = stop
            else:
                v = arr[self.i]
                self.i += 1
                spent += 1
                if v > p:
                    self.pending = 1
                elif v < p:
                    self.pending = -1
                else:
                    self.eq += 1
                return spent
        return spent

    # -- small subproblems ------------------------------------------------

    def run_small(self, budget: int) -> int:
        # insertion sort into ``buf`` in descending order
        arr = self.arr
        buf = self.buf
        spent = 0
        while spent < budget:
            if self.j < 0:
                if self.i >= len(arr):
                    return spent
                self.key = arr[self.i]
                self.i += 1
                buf.append(None)
                self.j = len(buf) - 1
                self.pc = 0 if self.j > 0 else 2  # 0 compare, 1 shift, 2 place
            j = self.j
            spent += 1
            if self.pc == 0:
                self.pc = 1 if buf[j - 1] < self.key else 2
            elif self.pc == 1:
                buf[j] = buf[j - 1]
                self.j = j - 1
                self.pc = 0 if j > 1 else 2
            else:
                buf[j] = self.key
                self.j = -1
        return spent

    def small_done(self) -> bool:
        return self.j < 0 and self.i >= len(self.arr)

    def digest_fields(self) -> tuple:
        return (
            self.stage, len(self.arr), self.r, self.i, self.pc, self.pending,
            self.pivot,
            len(self.meds) if self.stage in (_GROUPS, _PIVOT) else None,
            (len(self.gt), len(self.lt), self.eq) if self.stage == _PARTITION else None,
            tuple(self.buf) if self.stage == _SMALL_SORT else None,
        )


class SelectionTask:
    """Resumable selection of the ``k``-th largest element of ``values``.

    The task owns a private copy of ``values``.  ``step(budget)`` performs
    at most ``budget`` basic operations and reports progress; once the
    result is known every further ``step`` returns the same ``Done``.

    >>> t = SelectionTask([1, 5, 3, 2, 4], 2)
    >>> while not isinstance(t.step(1), Done):
    ...     pass
    >>> t.result
    4
    """

    def __init__(self, values: Sequence[int], k: int, *, c_sel: int = C_SEL, copy: bool = True):
        n = len(values)
        if not (1 <= k <= n):
            raise RankError(f"rank {k} outside 1..{n}")
        self.n = n
        self.k = k
        self.c_sel = c_sel
        self.ops_spent = 0
        self.result: int | None = None
        arr = list(values) if copy else values
        self.work_stack: list[_Frame] = []
        if n == 1:
            self.result = arr[0]
        else:
            self.work_stack.append(_Frame(arr, k - 1))

    @property
    def state(self) -> InProgress | Done:
        return IN_PROGRESS if self.result is None else Done(self.result)

    @property
    def done(self) -> bool:
        return self.result is not None

    def op_bound(self) -> int:
        return self.c_sel * self.n

    def step(self, budget: int) -> InProgress | Done:
        if budget < 1:
            raise ValueError("budget must be at least 1")
        if self.result is not None:
            return Done(self.result)
        spent = 0
        stack = self.work_stack
        while spent < budget and stack:
            f = stack[-1]
            st = f.stage
            if st == _GROUPS:
                spent += f.run_groups(budget - spent)
            elif st == _PIVOT:
                m = len(f.meds)
                f.stage = _PARTITION
                f.gt, f.lt, f.eq, f.i = [], [], 0, 0
                meds = f.meds
                f.meds = None
                if m == 1:
                    f.pivot = meds[0]
                else:
                    stack.append(_Frame(meds, (m - 1) // 2))
            elif st == _PARTITION:
                if f.pivot is None:
                    raise AssertionError("partition without pivot")
                spent += f.run_partition(budget - spent)
                if f.i >= len(f.arr) and not f.pending:
                    self._decide(f)
            else:
                spent += f.run_small(budget - spent)
                if f.small_done():
                    self._finish(f.buf[f.r])
        self.ops_spent += spent
        if not stack and self.result is None:
            raise AssertionError("selection stack emptied without a result")
        return IN_PROGRESS if self.result is None else Done(self.result)

    def _decide(self, f: _Frame) -> None:
        ng = len(f.gt)
        if f.r < ng:
            f.reset(f.gt, f.r)
        elif f.r < ng + f.eq:
            self._finish(f.pivot)
            return
        else:
            f.reset(f.lt, f.r - ng - f.eq)
        if len(f.arr) == 1:
            self._finish(f.arr[0])

    def _finish(self, value: int) -> None:
        stack = self.work_stack
        stack.pop()
        if stack:
            parent = stack[-1]
            parent.pivot = value
        else:
            self.result = value

    def run(self) -> int:
        """Complete the selection with an unlimited budget."""
        while self.result is None:
            self.step(1 << 62)
        return self.result

    def state_digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.ops_spent, self.result, [f.digest_fields() for f in self.work_stack])).encode())
        return h.hexdigest()


def kth_largest(values: Sequence[int], k: int) -> int:
    """Return the ``k``-th largest element of ``values`` (duplicates count).

    >>> kth_largest([1, 5, 3, 2, 4], 2)
    4
    """
    return SelectionTask(values, k).run()


def kth_largest_counted(values: Sequence[int], k: int, *, copy: bool = True) -> tuple[int, int]:
    """Like :func:`kth_largest` but also return the number of basic ops spent."""
    t = SelectionTask(values, k, copy=copy)
    v = t.run()
    return v, t.ops_spent
