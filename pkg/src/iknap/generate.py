"""Random instance families for tests and benchmarks."""

from __future__ import annotations

import math
import random

from .model import CONTINUOUS, DISCRETE, ImprovementLevel, Instance, Item

FAMILIES = ("uniform", "correlated", "unit-cost")
MAX_VALUE = 100


def _levels(rng: random.Random, weight: int, depth: int) -> tuple[ImprovementLevel, ...]:
    weights = sorted((rng.randint(0, weight) for _ in range(depth)), reverse=True)
    costs = sorted(rng.sample(range(1, MAX_VALUE + 1), depth))
    return tuple(ImprovementLevel(w, c) for w, c in zip(weights, costs))


def generate(
    n: int,
    seed: int,
    family: str = "uniform",
    levels: int = 1,
    mode: str = DISCRETE,
) -> Instance:
    """Deterministic random instance.

    Profits and weights are integers in [1, 100] (correlated: profit is the
    weight plus noise in [-10, 10]).  Each item gets between 1 and ``levels``
    improvement levels with decreasing weights and increasing costs in
    [1, 100]; the unit-cost family has exactly one level of cost 1.  Budgets
    are drawn as fractions of the totals: B in [0.3, 0.6] of the base
    weights, C in [0.2, 0.5] of the most expensive level costs.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if mode == CONTINUOUS:
        levels = min(levels, 1)
    rng = random.Random(f"{family}:{n}:{levels}:{seed}")
    items = []
    for _ in range(n):
        w = rng.randint(1, MAX_VALUE)
        if family == "correlated":
            p = max(1, w + rng.randint(-10, 10))
        else:
            p = rng.randint(1, MAX_VALUE)
        if family == "unit-cost":
            lv = (ImprovementLevel(rng.randint(0, w), 1),)
        else:
            lv = _levels(rng, w, rng.randint(1, levels)) if levels > 0 else ()
        items.append(Item(p, w, lv))
    total_w = sum(it.base_weight for it in items)
    total_c = sum(it.levels[-1].cost for it in items if it.levels)
    B = math.floor(rng.uniform(0.3, 0.6) * total_w)
    C = math.floor(rng.uniform(0.2, 0.5) * total_c)
    return Instance(tuple(items), B, C, mode)
