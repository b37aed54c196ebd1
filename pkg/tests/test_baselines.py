from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streams import oracle_of, random_stream
from flowsum.baselines import CountMinSketch, SpaceSavingHeap, cm_query, cm_update, ssh_query, ssh_update
from flowsum.core import ParameterError


def test_ssh_examples():
    s = SpaceSavingHeap(2)
    assert ssh_query(s, "a") == 0
    ssh_update(s, "a", 5)
    ssh_update(s, "b", 3)
    assert (ssh_query(s, "a"), ssh_query(s, "b")) == (5, 3)
    ssh_update(s, "c", 2)
    assert dict(zip(s.ids, s.est)) == {"a": 5, "c": 5}
    assert ssh_query(s, "b") == 5  # absent: heap minimum
    s.audit()


def test_ssh_capacity_from_epsilon():
    assert SpaceSavingHeap.for_epsilon(2.0**-6).capacity == 64
    assert SpaceSavingHeap.for_epsilon(0.3).capacity == 4
    with pytest.raises(ParameterError):
        SpaceSavingHeap(0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 100)), max_size=300), st.integers(1, 4))
def test_ssh_bound_every_prefix(stream, e):
    s = SpaceSavingHeap.for_epsilon(2.0**-e)
    o = oracle_of([])
    for x, w in stream:
        s.update(x, w)
        o.update(x, w)
        s.audit()
        for y, f in o.counts.items():
            est = s.query(y)
            assert f <= est and (est - f) * 2**e <= o.total


def test_ssh_ops_counted():
    s = SpaceSavingHeap(8, count_ops=True)
    for x, w in random_stream(random.Random(1), 1000, 100):
        s.update(x, w)
    assert s.mean_ops() >= 1 and s.ops_max >= 1


def test_cm_shape_and_examples():
    cm = CountMinSketch(2.0**-4, 2.0**-10, seed=3)
    assert (cm.depth, cm.width) == (math.ceil(10 * math.log(2)), math.ceil(16 * math.e))
    assert cm_query(cm, 1) == 0
    cm_update(cm, 1, 5)
    assert all(sum(1 for c in row if c == 5) == 1 for row in cm.cells)
    assert cm_query(cm, 1) == 5


def test_cm_collisions_sum():
    cm = CountMinSketch(0.5, 0.5, depth=1, width=1)
    cm.update(1, 5)
    cm.update(2, 3)
    assert cm.query(1) == cm.query(2) == 8


def test_cm_conservation_and_overestimate():
    cm = CountMinSketch(2.0**-6, 0.01, seed=9)
    stream = random_stream(random.Random(2), 5000, 2000)
    o = oracle_of(stream)
    for x, w in stream:
        cm.update(x, w)
    assert cm.row_sums() == [o.total] * cm.depth
    assert all(cm.query(x) >= f for x, f in o.counts.items())


def test_cm_seeded_hashes_reproducible():
    a, b = CountMinSketch(0.1, 0.1, seed=5), CountMinSketch(0.1, 0.1, seed=5)
    assert a.hash_seeds == b.hash_seeds
    assert a.hash_seeds != CountMinSketch(0.1, 0.1, seed=6).hash_seeds


@pytest.mark.parametrize("eps, delta", [(0, 0.1), (0.1, 0), (0.1, 1)])
def test_cm_rejects(eps, delta):
    with pytest.raises(ParameterError):
        CountMinSketch(eps, delta)
