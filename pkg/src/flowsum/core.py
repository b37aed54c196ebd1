"""Shared building blocks: parameters, the bounded flow table, the exact
oracle and operation counters.

Volumes are Python ints constrained to the unsigned 64-bit range, so every
bound check in the test-suite is an exact integer comparison.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction

MAX_U64 = 2**64 - 1


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read as their shortest decimal repr.

    >>> as_fraction(0.7), as_fraction(2.0**-3)
    (Fraction(7, 10), Fraction(1, 8))
    """
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


class ParameterError(ValueError):
    """A parameter lies outside its documented domain."""


class CapacityExceeded(RuntimeError):
    """A new key was inserted into a full FlowTable.

    Inside IM-SUM / DIM-SUM this can only mean a bookkeeping bug.
    """


class VolumeOverflow(OverflowError):
    """A running total exceeded 2**64 - 1."""


@dataclass(frozen=True)
class Params:
    """Accuracy/space parameters and every capacity derived from them.

    ``k`` is the rank of the quantile kept in ``q``, ``table_capacity`` is
    the size of each of the two tables and ``g_min`` the minimum number of
    updates between two table swaps.
    """

    epsilon: float | Fraction
    gamma: float | Fraction
    k: int
    table_capacity: int
    g_min: int

    @property
    def T(self) -> int:
        return self.table_capacity

    def epsilon_fraction(self) -> Fraction:
        return as_fraction(self.epsilon)

    def error_bound(self, total: int) -> Fraction:
        """``total * epsilon`` as an exact rational."""
        return total * as_fraction(self.epsilon)


def params_new(epsilon: float, gamma: float) -> Params:
    """Derive k, T and g_min from (epsilon, gamma) with exact arithmetic.

    >>> p = params_new(0.5, 1)
    >>> (p.k, p.table_capacity, p.g_min)
    (2, 3, 2)
    """
    try:
        eps = as_fraction(epsilon)
        gam = as_fraction(gamma)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"non-numeric parameter: {exc}") from None
    if not (0 < eps <= 1):
        raise ParameterError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    if not gam > 0:
        raise ParameterError(f"gamma must be positive, got {gamma!r}")
    k = math.ceil(1 / eps)
    g_min = math.ceil(gam / eps)
    T = g_min + k - 1
    return Params(epsilon=epsilon, gamma=gamma, k=k, table_capacity=T, g_min=g_min)


class FlowTable:
    """Bounded map from flow id to volume.

    Inserting a new key into a full table raises :class:`CapacityExceeded`
    instead of evicting anything.  ``clear`` is O(1): the backing dict is
    replaced, which is the flush the maintenance procedure relies on.
    """

    __slots__ = ("capacity", "_d")

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ParameterError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._d: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._d)

    def __contains__(self, x: int) -> bool:
        return x in self._d

    def __iter__(self) -> Iterator[int]:
        return iter(self._d)

    def __repr__(self) -> str:
        return f"FlowTable(capacity={self.capacity}, entries={self._d!r})"

    def get(self, x: int, default: int | None = None) -> int | None:
        return self._d.get(x, default)

    def upsert(self, x: int, v: int) -> None:
        d = self._d
        if x not in d and len(d) >= self.capacity:
            raise CapacityExceeded(f"insert of new key {x} into full table (capacity {self.capacity})")
        if v < 0:
            raise ValueError("volumes are non-negative")
        d[x] = v

    def remove(self, x: int) -> int | None:
        return self._d.pop(x, None)

    def items(self):
        return self._d.items()

    def values(self):
        return self._d.values()

    def to_dict(self) -> dict[int, int]:
        return dict(self._d)

    def clear(self) -> None:
        self._d = {}

    def drain(self) -> Iterator[tuple[int, int]]:
        """Yield and remove entries one at a time.

        Consuming part of the iterator leaves the rest of the table intact.
        """
        d = self._d
        while d:
            yield d.popitem()

    def is_full(self) -> bool:
        return len(self._d) >= self.capacity


@dataclass
class ExactOracle:
    """Unbounded exact counter used as ground truth in tests and audits."""

    counts: dict[int, int] = field(default_factory=dict)
    total: int = 0
    length: int = 0

    def update(self, x: int, w: int) -> None:
        total = self.total + w
        if total > MAX_U64:
            raise VolumeOverflow("stream total exceeds 2**64 - 1")
        self.counts[x] = self.counts.get(x, 0) + w
        self.total = total
        self.length += 1

    def query(self, x: int) -> int:
        return self.counts.get(x, 0)

    def elephants(self, theta: float) -> set[int]:
        """Flows whose volume strictly exceeds ``total * theta``."""
        thr = self.total * as_fraction(theta)
        return {x for x, c in self.counts.items() if c > thr}

    def non_elephants(self, theta: float, epsilon: float) -> set[int]:
        """Flows an elephant query must not report: ``f < total*(theta-eps)``."""
        thr = self.total * (as_fraction(theta) - as_fraction(epsilon))
        return {x for x, c in self.counts.items() if c < thr}


@dataclass
class OpCounter:
    """Operation counts for the runtime checks.

    ``table_ops`` counts hash-table reads, inserts and removals;
    ``selection_ops`` counts element comparisons and moves inside
    maintenance.  ``per_update_max``/``per_update_sum`` aggregate the total
    cost of each completed update call.
    """

    table_ops: int = 0
    selection_ops: int = 0
    per_update_max: int = 0
    per_update_sum: int = 0
    updates: int = 0

    def total(self) -> int:
        return self.table_ops + self.selection_ops

    def close_update(self, cost: int) -> None:
        self.updates += 1
        self.per_update_sum += cost
        if cost > self.per_update_max:
            self.per_update_max = cost

    def mean(self) -> float:
        return self.per_update_sum / self.updates if self.updates else 0.0

    def reset(self) -> None:
        self.table_ops = self.selection_ops = 0
        self.per_update_max = self.per_update_sum = self.updates = 0
