"""Single-level knapsack with continuous weight improvements.

For a fixed packing the best improvement is a fractional knapsack over the
packed items, filled in order of cost per unit of weight reduction.  That
greedy order leaves at most one partially improved item, the fractional
index ``k``: items before ``k`` are fully improved, items after it not at
all.  Fixing ``k`` removes the improvement variables and leaves a binary
problem with one continuous variable, which is approximated by guessing the
most profitable items and rounding an LP with at most two fractional values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import ratlp
from .model import (
    Instance,
    InvariantError,
    Rational,
    Solution,
    VariantError,
    preprocess,
    rational,
)


def improvement_order(instance: Instance) -> list[int]:
    """Item indices by cost per unit reduction, ties by index.

    Zero-cost improvements come first (ratio 0); items without a reduction
    never benefit from improvement and go last.
    """
    def key(i: int):
        item = instance.items[i]
        if item.reduction <= 0:
            return (1, Fraction(0), i)
        return (0, Fraction(item.cost) / item.reduction, i)

    return sorted(range(instance.n), key=key)


def greedy_improvement(
    instance: Instance, packed: Iterable[int], budget: Rational | None = None
) -> tuple[tuple[Rational, ...], Rational]:
    """Optimal improvement fractions for the packed set and the reduction they buy.

    Walks the improvement order, improving each packed item fully while the
    budget lasts and the first one that exhausts it fractionally.
    """
    chosen = set(packed)
    remaining = instance.C if budget is None else rational(budget)
    y: list[Rational] = [0] * instance.n
    reduction: Rational = 0
    for i in improvement_order(instance):
        item = instance.items[i]
        if i not in chosen or item.reduction <= 0:
            continue
        if item.cost == 0:
            frac: Rational = 1
        elif remaining <= 0:
            break
        else:
            frac = rational(min(Fraction(1), Fraction(remaining) / item.cost))
            remaining -= item.cost * frac
        y[i] = frac
        reduction += item.reduction * frac
    return tuple(y), rational(reduction)


def feasibility_check(instance: Instance, packed: Iterable[int]) -> bool:
    """True iff some improvement makes the packing fit."""
    chosen = set(packed)
    _, reduction = greedy_improvement(instance, chosen)
    weight = sum((instance.items[i].base_weight for i in chosen), 0)
    return weight - reduction <= instance.B


def transformed_weight(instance: Instance, packed: Iterable[int], k: int) -> Rational:
    """Packed weight with the improvement eliminated for fractional index ``k``.

    Items ahead of ``k`` in the improvement order are fully improved and ``k``
    absorbs the rest of the budget, so their reduction is rewritten through
    the cost row.  Equals the effective weight of the greedy improvement
    whenever ``k`` is the item that exhausts the budget.
    """
    chosen = set(packed)
    order = improvement_order(instance)
    pos = order.index(k)
    kk = instance.items[k]
    rate = Fraction(kk.reduction) / kk.cost
    total = Fraction(kk.base_weight) - instance.C * rate
    for t, i in enumerate(order):
        if i == k or i not in chosen:
            continue
        item = instance.items[i]
        if t < pos:
            total += item.base_weight - item.reduction + rate * item.cost
        else:
            total += item.base_weight
    return rational(total)


@dataclass(frozen=True)
class PkProblem:
    """Binary subproblem for a fixed fractional index.

    ``k is None`` stands for solutions that pay for no improvement: only
    zero-cost improvements are applied and there is no continuous variable.

    Constraints on a packing ``S`` of ``items`` with improvement ``y`` of k:
        sum(weight[S]) - y_weight * y <= weight_cap
        sum(cost[S])   + y_cost * y   <= cost_cap,      0 <= y <= 1
    """

    instance: Instance
    k: int | None
    items: tuple[int, ...]
    profit: tuple[Rational, ...]
    weight: tuple[Rational, ...]
    cost: tuple[Rational, ...]
    improved: frozenset
    weight_cap: Rational
    cost_cap: Rational
    y_weight: Rational = 0
    y_cost: Rational = 0
    base_profit: Rational = 0

    def improvement_for(self, weight_used: Rational, cost_used: Rational) -> Rational | None:
        """Smallest feasible ``y`` for the given row usage, or None if none exists."""
        if cost_used > self.cost_cap:
            return None
        if self.k is None:
            return 0 if weight_used <= self.weight_cap else None
        y_max = min(Fraction(1), Fraction(self.cost_cap - cost_used) / self.y_cost)
        need = max(Fraction(0), Fraction(weight_used - self.weight_cap) / self.y_weight)
        return rational(need) if need <= y_max else None

    def to_solution(self, chosen: Iterable[int], y: Rational) -> Solution:
        """Map a packing (positions into ``items``) back to the instance."""
        n = self.instance.n
        packed = [0] * n
        improvement: list[Rational] = [0] * n
        for t in chosen:
            i = self.items[t]
            packed[i] = 1
            if i in self.improved:
                improvement[i] = 1
        if self.k is not None:
            packed[self.k] = 1
            improvement[self.k] = y
        return Solution(tuple(packed), tuple(improvement))


def build_pk(instance: Instance, k: int | None) -> PkProblem:
    items = instance.items
    B, C = instance.B, instance.C
    if k is None:
        improved = frozenset(
            i for i, it in enumerate(items) if it.cost == 0 and it.reduction > 0
        )
        idx = tuple(range(instance.n))
        return PkProblem(
            instance, None, idx,
            profit=tuple(items[i].profit for i in idx),
            weight=tuple(items[i].base_weight - (items[i].reduction if i in improved else 0)
                         for i in idx),
            cost=(0,) * len(idx),
            improved=improved,
            weight_cap=B,
            cost_cap=C,
        )
    kk = items[k]
    if kk.reduction <= 0 or kk.cost <= 0:
        raise ValueError(f"item {k} cannot be a fractional index (reduction {kk.reduction}, "
                         f"cost {kk.cost})")
    order = improvement_order(instance)
    ahead = frozenset(order[:order.index(k)])
    idx = tuple(i for i in range(instance.n) if i != k)
    return PkProblem(
        instance, k, idx,
        profit=tuple(items[i].profit for i in idx),
        weight=tuple(items[i].base_weight - (items[i].reduction if i in ahead else 0)
                     for i in idx),
        cost=tuple(items[i].cost if i in ahead else 0 for i in idx),
        improved=ahead,
        weight_cap=B - kk.base_weight,
        cost_cap=C,
        y_weight=kk.reduction,
        y_cost=kk.cost,
        base_profit=kk.profit,
    )


def admissible_indices(instance: Instance) -> list[int]:
    return [i for i, it in enumerate(instance.items) if it.reduction > 0 and it.cost > 0]


def as_epsilon(eps) -> Fraction:
    eps = Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    return eps


def guess_size(m: int, eps: Fraction) -> int:
    return min(m, math.ceil(2 / eps))


def _rounded_lp(pk: PkProblem, rest: list[int], wsum, csum, trace) -> tuple[list[int], Fraction]:
    """Solve the LP over ``rest`` with the guessed set's usage, round x down."""
    has_y = pk.k is not None
    nvar = len(rest) + (1 if has_y else 0)
    lp = ratlp.LinearProgram(
        [pk.profit[t] for t in rest] + ([0] if has_y else []),
        [(0, 1)] * nvar,
    )
    wrow = {v: pk.weight[t] for v, t in enumerate(rest)}
    if has_y:
        wrow[len(rest)] = -pk.y_weight
    lp.add_row(wrow, "<=", pk.weight_cap - wsum)
    if has_y:
        crow = {v: pk.cost[t] for v, t in enumerate(rest)}
        crow[len(rest)] = pk.y_cost
        lp.add_row(crow, "<=", pk.cost_cap - csum)
    sol = ratlp.solve(lp)
    if not sol.optimal:
        raise InvariantError(f"P(k) relaxation is {sol.status} for a feasible guess")
    frac = ratlp.fractional_vars(sol)
    if trace is not None:
        trace.append({"lp": "pk", "k": pk.k, "fractional": len(frac)})
    if len(frac) > 2:
        raise InvariantError(f"P(k) relaxation has {len(frac)} fractional variables")
    kept = [t for v, t in enumerate(rest) if sol.values[v] == 1]
    return kept, sol.objective


def _search(pk: PkProblem, eps: Fraction, floor, trace) -> tuple[Rational, Solution] | None:
    """Best candidate strictly above ``floor`` (None if there is none)."""
    m = len(pk.items)
    q = guess_size(m, eps)
    profit, weight, cost = pk.profit, pk.weight, pk.cost
    best_value = floor
    best: Solution | None = None

    def consider(value, chosen, wsum, csum):
        nonlocal best_value, best
        if best_value is None or value > best_value:
            y = pk.improvement_for(wsum, csum)
            if y is None:
                raise InvariantError("candidate packing lost feasibility")
            best_value, best = value, pk.to_solution(chosen, y)

    def walk(pos, chosen, wsum, csum, psum, pmin):
        if pk.improvement_for(wsum, csum) is None:
            return  # supersets only get heavier and costlier
        if len(chosen) < q or q == 0:
            consider(pk.base_profit + psum, chosen, wsum, csum)
            if len(chosen) < q:
                for t in range(pos, m):
                    walk(t + 1, chosen + [t], wsum + weight[t], csum + cost[t],
                         psum + profit[t], profit[t] if pmin is None else min(pmin, profit[t]))
            return
        picked = set(chosen)
        rest = [t for t in range(m) if t not in picked and profit[t] <= pmin]
        bound = pk.base_profit + psum + sum((profit[t] for t in rest), 0)
        if best_value is not None and bound <= best_value:
            return
        if not rest:
            consider(pk.base_profit + psum, chosen, wsum, csum)
            return
        kept, lp_value = _rounded_lp(pk, rest, wsum, csum, trace)
        value = pk.base_profit + psum + sum((profit[t] for t in kept), 0)
        if value < pk.base_profit + psum + lp_value - 2 * pmin:
            raise InvariantError("rounding lost more than two items' profit")
        consider(value, chosen + kept,
                 wsum + sum((weight[t] for t in kept), 0),
                 csum + sum((cost[t] for t in kept), 0))

    walk(0, [], 0, 0, 0, None)
    if best is None:
        return None
    return rational(best_value), best


def ptas_pk(pk: PkProblem, eps, trace: list | None = None) -> Solution | None:
    """(1 - eps)-approximate solution of ``pk``; None when it has no feasible packing.

    Enumerates, in lexicographic order, every packing with fewer than ``q``
    items and every guess of ``q`` items; for a guess, items more profitable
    than the guess's cheapest member are excluded and the rest is filled by
    the rounded-down LP relaxation.
    """
    found = _search(pk, as_epsilon(eps), None, trace)
    return None if found is None else found[1]


def ptas_ikcs(instance: Instance, eps, trace: list | None = None) -> Solution:
    """(1 - eps)-approximation for the continuous single-level problem.

    Runs the subproblem scheme for the no-paid-improvement candidate and for
    every admissible fractional index, keeping the best (ties: smallest k).
    """
    if not instance.continuous or not instance.single_level():
        raise VariantError("cs-ptas needs a continuous single-level instance")
    eps = as_epsilon(eps)
    reduced, mapping = preprocess(instance)
    best: tuple[Rational, Solution] | None = None
    for k in [None] + admissible_indices(reduced):
        found = _search(build_pk(reduced, k), eps, None if best is None else best[0], trace)
        if found is not None:
            best = found
    solution = Solution.empty(reduced.n) if best is None else best[1]
    return mapping.lift(solution, continuous=True)
