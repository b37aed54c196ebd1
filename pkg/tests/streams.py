"""Stream helpers shared by the tests."""

from __future__ import annotations

import random

from flowsum.core import ExactOracle


def random_stream(rng: random.Random, length: int, universe: int, max_w: int = 100):
    """Skewed random stream: low ids are picked more often."""
    out = []
    for _ in range(length):
        x = int(universe ** rng.random())
        out.append((x, rng.randint(0, max_w)))
    return out


def oracle_of(stream) -> ExactOracle:
    o = ExactOracle()
    for x, w in stream:
        o.update(x, w)
    return o
