"""Multi-level knapsack with discrete weight improvements.

``dp_exact`` fills W(i, q, r), the least weight reaching profit exactly
``r`` with the first ``i`` items and improvement spend at most ``q``.
``ptas_scaled`` runs the same table on scaled-down profits, and
``lp_three_approx`` rounds a vertex of the LP relaxation, which has at most
two items with fractional variables.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import ratlp
from .continuous import as_epsilon
from .model import (
    Instance,
    InvariantError,
    Rational,
    Solution,
    VariantError,
    preprocess,
    rational,
    singleton_level,
)
from .report import RunReport, finish, pick_best

SKIP = -1


@dataclass
class DpTable:
    """Dense W(i, q, r) table over integer-scaled weights.

    ``W`` holds weights multiplied by ``scale``; ``inf`` marks unreachable
    cells.  ``branch[i, q, r]`` is the choice for item ``i`` (SKIP or the
    level it was packed at) so solutions can be read back.
    """

    W: np.ndarray
    branch: np.ndarray
    scale: int
    inf: int
    profits: tuple[int, ...]
    costs: tuple[tuple[int, ...], ...]

    @property
    def budget(self) -> int:
        return self.W.shape[1] - 1

    def weight(self, i: int, q: int, r: int):
        """Exact W(i, q, r), or ``math.inf`` when profit ``r`` is unreachable."""
        if r < 0 or r >= self.W.shape[2]:
            return math.inf
        if q < 0:
            return math.inf
        v = int(self.W[i, min(q, self.budget), r])
        return math.inf if v >= self.inf else rational(Fraction(v, self.scale))

    def best_profit(self, B: Rational) -> int:
        cap = min(math.floor(Fraction(B) * self.scale), self.inf - 1)
        ok = np.nonzero(self.W[-1, self.budget] <= cap)[0]
        return int(ok.max()) if len(ok) else 0

    def reconstruct(self, r: int) -> dict[int, int]:
        """Item -> level for a solution reaching profit ``r`` at full budget."""
        q = self.budget
        levels = {}
        for i in range(self.W.shape[0] - 1, 0, -1):
            b = int(self.branch[i, q, r])
            if b == SKIP:
                continue
            levels[i - 1] = b
            q -= self.costs[i - 1][b]
            r -= self.profits[i - 1]
        if r != 0:
            raise InvariantError("table back-pointers do not reach profit 0")
        return levels


def _integral(values, what: str) -> list[int]:
    out = []
    for v in values:
        if Fraction(v).denominator != 1:
            raise VariantError(f"{what} must be integral for the DP (got {v}); use ptas_scaled")
        out.append(int(v))
    return out


def fill_table(instance: Instance, profits: Sequence[int]) -> DpTable:
    """Fill W(i, q, r) for ``profits`` (integers) and the instance's weights/costs.

    Level costs must be integers and the spend axis runs to ``floor(C)``,
    capped where extra budget cannot buy anything more.
    """
    items = instance.items
    n = instance.n
    costs = tuple(tuple(_integral([it.cost_at(l) for l in range(it.depth + 1)], "improvement costs"))
                  for it in items)
    budget = min(math.floor(instance.C), sum(c[-1] for c in costs))
    budget = max(budget, 0)
    P = sum(profits)

    scale = 1
    for it in items:
        for l in range(it.depth + 1):
            scale = math.lcm(scale, Fraction(it.weight_at(l)).denominator)
    weights = [[int(Fraction(it.weight_at(l)) * scale) for l in range(it.depth + 1)] for it in items]
    inf = sum(max(w) for w in weights) + 1
    dtype = np.int64 if inf < 2**61 else object

    W = np.full((n + 1, budget + 1, P + 1), inf, dtype=dtype)
    W[0, :, 0] = 0
    branch = np.full((n + 1, budget + 1, P + 1), SKIP, dtype=np.int16)
    for i in range(1, n + 1):
        prev = W[i - 1]
        best = prev.copy()
        arg = np.full(prev.shape, SKIP, dtype=np.int16)
        p = profits[i - 1]
        for lvl, (w, c) in enumerate(zip(weights[i - 1], costs[i - 1])):
            if c > budget:
                break
            src = prev[: budget + 1 - c, : P + 1 - p]
            cand = np.full(prev.shape, inf, dtype=dtype)
            cand[c:, p:] = np.where(src >= inf, inf, src + w)
            better = cand < best
            best = np.where(better, cand, best)
            arg[better] = lvl
        W[i] = best
        branch[i] = arg
    return DpTable(W, branch, scale, inf, tuple(profits), costs)


def _require_discrete(instance: Instance, algo: str) -> None:
    if instance.continuous:
        raise VariantError(f"{algo} needs a discrete-mode instance")


def dp_exact(instance: Instance) -> RunReport:
    started = time.perf_counter()
    _require_discrete(instance, "dp")
    reduced, mapping = preprocess(instance)
    profits = _integral([it.profit for it in reduced.items], "profits")
    table = fill_table(reduced, profits)
    r = table.best_profit(reduced.B)
    solution = Solution.from_levels(reduced.n, table.reconstruct(r))
    report = finish("dp", instance, mapping.lift(solution), 1, started,
                    table_shape=list(table.W.shape))
    if report.objective != r:
        raise InvariantError(f"reconstructed profit {report.objective} != table optimum {r}")
    return report


def ptas_scaled(instance: Instance, eps) -> RunReport:
    """Profit-scaling scheme: DP on floor(p / K) with K = eps * p_max / n."""
    started = time.perf_counter()
    _require_discrete(instance, "ptas")
    eps = as_epsilon(eps)
    reduced, mapping = preprocess(instance)
    n = reduced.n
    p_max = max((it.profit for it in reduced.items), default=0)
    if p_max == 0:
        return finish("ptas", instance, Solution.empty(instance.n), 1 - eps, started, K=None)
    K = eps * p_max / n
    scaled = [math.floor(Fraction(it.profit) / K) for it in reduced.items]
    table = fill_table(reduced, scaled)
    r = table.best_profit(reduced.B)
    solution = Solution.from_levels(n, table.reconstruct(r))
    return finish("ptas", instance, mapping.lift(solution), 1 - eps, started,
                  K=str(K), scaled_optimum=r)


def _relaxation(instance: Instance) -> tuple[ratlp.LinearProgram, list[list[int]]]:
    """LP relaxation with one x and one y per level for every item.

    Returns the program and, per item, its column indices ``[x, y^1, ..]``.
    """
    cols: list[list[int]] = []
    objective: list[Rational] = []
    bounds = []
    for it in instance.items:
        start = len(objective)
        cols.append(list(range(start, start + it.depth + 1)))
        objective += [it.profit] + [0] * it.depth
        bounds += [(0, 1)] + [(0, None)] * it.depth
    lp = ratlp.LinearProgram(objective, bounds)
    wrow: dict[int, Rational] = {}
    crow: dict[int, Rational] = {}
    for it, c in zip(instance.items, cols):
        wrow[c[0]] = it.base_weight
        for l in range(1, it.depth + 1):
            wrow[c[l]] = it.weight_at(l) - it.weight_at(l - 1)
            crow[c[l]] = it.cost_at(l) - it.cost_at(l - 1)
    lp.add_row(wrow, "<=", instance.B)
    lp.add_row(crow, "<=", instance.C)
    for c in cols:
        for l in range(1, len(c)):
            lp.add_row({c[l]: 1, c[l - 1]: -1}, "<=", 0)
    return lp, cols


def lp_three_approx(instance: Instance, trace: list | None = None) -> RunReport:
    started = time.perf_counter()
    _require_discrete(instance, "lp3")
    reduced, mapping = preprocess(instance)
    n = reduced.n
    lp, cols = _relaxation(reduced)
    sol = ratlp.solve(lp)
    if not sol.optimal:
        raise InvariantError(f"relaxation is {sol.status}")
    loose = [i for i, c in enumerate(cols) if any(sol.values[j].denominator != 1 for j in c)]
    if trace is not None:
        trace.append({"lp": "lp3", "non_integral": len(loose)})
    if len(loose) > 2:
        raise InvariantError(f"{len(loose)} non-integral items at a vertex (at most 2 possible)")

    levels = {}
    for i, c in enumerate(cols):
        if i not in loose and sol.values[c[0]] == 1:
            levels[i] = sum(int(sol.values[j]) for j in c[1:])
    candidates = [("integral", Solution.from_levels(n, levels))]
    for i in loose:
        lvl = singleton_level(reduced.items[i], reduced)
        if lvl is None:
            raise InvariantError(f"item {i} survived preprocessing without a fitting form")
        candidates.append((f"single-{i}", Solution.from_levels(n, {i: lvl})))
    name, best, values = pick_best(reduced, candidates)
    return finish("lp3", instance, mapping.lift(best), Fraction(1, 3), started,
                  chosen=name, candidates=values, non_integral=len(loose))
