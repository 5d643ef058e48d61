"""Brute-force exact solvers for tiny instances.

These are the ground truth every approximation guarantee is checked
against, so they stay deliberately simple: full enumeration of item states.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

import numpy as np

from .model import (
    Instance,
    Rational,
    Solution,
    VariantError,
    rational,
)

DEFAULT_LIMIT = 2_000_000


class OracleLimitError(RuntimeError):
    """The instance has more states than the oracle is allowed to enumerate."""


def state_limit(limit: int | None = None) -> int:
    if limit is not None:
        return limit
    env = os.environ.get("IK_ORACLE_LIMIT")
    return int(env) if env else DEFAULT_LIMIT


def discrete_states(instance: Instance) -> int:
    return math.prod(item.depth + 2 for item in instance.items)


def _scaled(values: list[Rational]) -> tuple[list[int], int]:
    """Integers proportional to ``values`` and the common denominator."""
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    return [int(Fraction(v) * den) for v in values], den


def exact_discrete(instance: Instance, limit: int | None = None) -> tuple[Solution, Rational]:
    """Enumerate every (unpacked | packed at level 0..j(i)) assignment.

    Profits, weights and costs are scaled to integers by their common
    denominators so the enumeration runs on exact integer arrays.
    """
    if instance.continuous:
        raise VariantError("exact_discrete needs a discrete-mode instance")
    limit = state_limit(limit)
    states = discrete_states(instance)
    if states > limit:
        raise OracleLimitError(f"{states} states exceed the oracle limit {limit}")
    n = instance.n
    if n == 0:
        return Solution.empty(0), 0

    profits, pden = _scaled([it.profit for it in instance.items])
    weights, wden = _scaled(
        [instance.B] + [it.weight_at(l) for it in instance.items for l in range(it.depth + 1)]
    )
    costs, cden = _scaled(
        [instance.C] + [it.cost_at(l) for it in instance.items for l in range(1, it.depth + 1)]
    )
    cap_w, weights = weights[0], weights[1:]
    cap_c, costs = costs[0], costs[1:]
    big = all(abs(v) < 2**40 for v in profits + weights + costs) and n < 64

    tot_p = tot_w = tot_c = None
    wpos = cpos = 0
    for i, item in enumerate(instance.items):
        k = item.depth
        opt_p = [0] + [profits[i]] * (k + 1)
        opt_w = [0] + weights[wpos:wpos + k + 1]
        opt_c = [0, 0] + costs[cpos:cpos + k]
        wpos += k + 1
        cpos += k
        p, w, c = (np.array(v, dtype=np.int64 if big else object) for v in (opt_p, opt_w, opt_c))
        if tot_p is None:
            tot_p, tot_w, tot_c = p, w, c
        else:
            tot_p = np.add.outer(tot_p, p).ravel()
            tot_w = np.add.outer(tot_w, w).ravel()
            tot_c = np.add.outer(tot_c, c).ravel()

    feasible = (tot_w <= cap_w) & (tot_c <= cap_c)
    masked = np.where(feasible, tot_p, -1)
    best = int(np.argmax(masked))

    digits = []
    for item in reversed(instance.items):
        base = item.depth + 2
        digits.append(best % base)
        best //= base
    digits.reverse()
    packed = tuple(1 if s else 0 for s in digits)
    levels = tuple(s - 1 if s else 0 for s in digits)
    value = rational(Fraction(int(masked.max()) if feasible.any() else 0, pden))
    return Solution(packed, levels), value


def exact_continuous(instance: Instance, limit: int | None = None) -> tuple[Solution, Rational]:
    """Optimum of the continuous single-level problem by subset enumeration.

    For a fixed packing the greedy improvement is optimal, so trying every
    packing with its greedy improvement is exact.  The walk visits items in
    greedy order, which lets each subset extend its prefix's greedy state.
    """
    from .continuous import improvement_order

    if not instance.continuous or not instance.single_level():
        raise VariantError("exact_continuous needs a continuous single-level instance")
    limit = state_limit(limit)
    n = instance.n
    if 2**n > limit:
        raise OracleLimitError(f"2^{n} subsets exceed the oracle limit {limit}")
    order = improvement_order(instance)
    items = instance.items
    B = instance.B

    best_value: Rational = 0
    best_set: tuple[tuple[int, Rational], ...] = ()

    # net = packed weight minus greedy reduction; adding items never lowers it
    def walk(pos: int, budget: Rational, net: Rational, profit: Rational, chosen: tuple):
        nonlocal best_value, best_set
        if net > B:
            return
        if profit > best_value:
            best_value, best_set = profit, chosen
        for t in range(pos, n):
            i = order[t]
            item = items[i]
            y: Rational = 0
            if item.reduction > 0:
                if item.cost == 0:
                    y = 1
                elif budget > 0:
                    y = min(Fraction(1), Fraction(budget) / item.cost)
                    y = rational(y)
            walk(
                t + 1,
                budget - item.cost * y,
                net + item.base_weight - item.reduction * y,
                profit + item.profit,
                chosen + ((i, y),),
            )

    walk(0, instance.C, 0, 0, ())
    packed = [0] * n
    improvement: list[Rational] = [0] * n
    for i, y in best_set:
        packed[i] = 1
        improvement[i] = y
    return Solution(tuple(packed), tuple(improvement)), rational(best_value)
