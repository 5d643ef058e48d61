"""Single-level knapsack with discrete (all-or-nothing) weight improvements.

Three algorithms:

* ``six_approx``: best of an LP-rounded two-constraint knapsack over the
  improved forms and a greedy knapsack over the base forms.
* ``ckp_three_approx`` (unit costs): LP rounding of the doubled-item
  relaxation where only improved copies count against ``floor(C)``.
* ``lp_two_approx`` (unit costs): LP rounding of the natural relaxation,
  using the per-item census of tight constraints at a vertex.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import ratlp
from .model import (
    Instance,
    InvariantError,
    Rational,
    Solution,
    VariantError,
    preprocess,
)
from .report import RunReport, finish, pick_best

log = logging.getLogger(__name__)

Y_ZERO = "y=0"
X_EQ_Y = "x=y"
X_ONE = "x=1"


def greedy_kp_2approx(weights: Sequence[Rational], profits: Sequence[Rational], B: Rational) -> list[int]:
    """Greedy-by-density prefix or the best single item, whichever is worth more.

    Items heavier than ``B`` are ignored.  Returns the chosen indices.
    """
    fits = [i for i, w in enumerate(weights) if w <= B]

    def density(i):
        w = weights[i]
        return (0, 0, i) if w == 0 else (1, -Fraction(profits[i]) / w, i)

    prefix: list[int] = []
    load: Rational = 0
    for i in sorted(fits, key=density):
        if load + weights[i] > B:
            break
        prefix.append(i)
        load += weights[i]
    single = max(fits, key=lambda i: (profits[i], -i), default=None)
    if single is not None and profits[single] > sum((profits[i] for i in prefix), 0):
        return [single]
    return prefix


def _require_single_level(instance: Instance, algo: str) -> None:
    if instance.continuous:
        raise VariantError(f"{algo} needs a discrete-mode instance")
    if not instance.single_level():
        raise VariantError(f"{algo} needs a single-level instance")


def _require_unit_costs(instance: Instance, algo: str) -> None:
    _require_single_level(instance, algo)
    if not instance.unit_costs():
        raise VariantError(f"{algo} needs unit improvement costs")


def _packing(n: int, unimproved=(), improved=()) -> Solution:
    levels = {i: 0 for i in unimproved}
    levels.update({i: 1 for i in improved})
    return Solution.from_levels(n, levels)


def _alone(instance: Instance, i: int) -> Solution:
    """Item ``i`` packed on its own, improved when it has a level.

    After preprocessing every surviving form of an item fits by itself, and
    an item without a level has a fitting base form.
    """
    return _packing(instance.n, improved=[i]) if instance.items[i].levels else _packing(instance.n, [i])


def six_approx(instance: Instance) -> RunReport:
    started = time.perf_counter()
    _require_single_level(instance, "six")
    reduced, mapping = preprocess(instance)
    items = reduced.items
    n = reduced.n

    # two-constraint knapsack over improved forms
    mkp = [i for i, it in enumerate(items) if it.levels]
    lp = ratlp.LinearProgram([items[i].profit for i in mkp], [(0, 1)] * len(mkp))
    lp.add_row([items[i].improved_weight for i in mkp], "<=", reduced.B)
    lp.add_row([items[i].cost for i in mkp], "<=", reduced.C)
    sol = ratlp.solve(lp)
    frac = ratlp.fractional_vars(sol)
    if len(frac) > 2:
        raise InvariantError(f"MKP relaxation has {len(frac)} fractional variables")
    candidates = [("mkp-integral", _packing(n, improved=[mkp[v] for v, x in enumerate(sol.values) if x == 1]))]
    candidates += [(f"mkp-single-{mkp[v]}", _packing(n, improved=[mkp[v]])) for v, _ in frac]

    kp = greedy_kp_2approx([it.base_weight for it in items], [it.profit for it in items], reduced.B)
    candidates.append(("kp-greedy", _packing(n, kp)))

    name, best, values = pick_best(reduced, candidates)
    return finish("six", instance, mapping.lift(best), Fraction(1, 6), started,
                  chosen=name, candidates=values, fractional=len(frac))


def ckp_three_approx(instance: Instance, trace: list | None = None) -> RunReport:
    started = time.perf_counter()
    _require_unit_costs(instance, "ckp3")
    reduced, mapping = preprocess(instance)
    items = reduced.items
    n = reduced.n
    k = math.floor(reduced.C)

    # columns: x_0..x_{n-1} (base copies), then one improved copy per item with a level
    hat = [i for i, it in enumerate(items) if it.levels]
    lp = ratlp.LinearProgram(
        [it.profit for it in items] + [items[i].profit for i in hat],
        [(0, 1)] * (n + len(hat)),
    )
    lp.add_row([it.base_weight for it in items] + [items[i].improved_weight for i in hat],
               "<=", reduced.B)
    card = lp.add_row([0] * n + [1] * len(hat), "<=", k)
    sol = ratlp.solve(lp)
    frac = ratlp.fractional_vars(sol)
    card_tight = sol.tight(card)

    base = [i for i in range(n) if sol.values[i] == 1]
    improved = [hat[v] for v in range(len(hat)) if sol.values[n + v] == 1]
    record = {"lp": "ckp", "fractional": len(frac), "cardinality_tight": card_tight}
    if len(frac) == 2:
        record["pair_sum"] = str(frac[0][1] + frac[1][1])
    if trace is not None:
        trace.append(record)
    if len(frac) > 2:
        raise InvariantError(f"CKP' relaxation has {len(frac)} fractional variables")

    candidates = [("base", _packing(n, base)), ("improved", _packing(n, improved=improved))]
    if len(frac) == 1:
        col = frac[0][0]
        i = col if col < n else hat[col - n]
        candidates.insert(0, (f"single-{i}", _alone(reduced, i)))
    elif len(frac) == 2:
        (c1, v1), (c2, v2) = frac
        if c1 < n or c2 < n or not card_tight or v1 + v2 != 1:
            raise InvariantError(
                f"fractional pair violates the improved-copies structure: {frac}, "
                f"cardinality tight={card_tight}"
            )
        i, j = hat[c1 - n], hat[c2 - n]
        if items[j].improved_weight > items[i].improved_weight:
            i, j = j, i
        candidates = [
            (f"single-{i}", _packing(n, improved=[i])),
            ("base", _packing(n, base)),
            (f"improved+{j}", _packing(n, improved=improved + [j])),
        ]
    name, best, values = pick_best(reduced, candidates)
    return finish("ckp3", instance, mapping.lift(best), Fraction(1, 3), started,
                  chosen=name, candidates=values, **{k_: v for k_, v in record.items() if k_ != "lp"})


@dataclass(frozen=True)
class ItemCategory:
    tag: str
    tight: frozenset

    @property
    def integral(self) -> bool:
        return self.tag == "T4"


def categorize_items(x: Sequence[Fraction], y: Sequence[Fraction]) -> list[ItemCategory]:
    """Classify each item by which of y=0, x=y, x=1 hold with equality.

    Two tight constraints (T4) means the item is integral.  At a vertex of
    the relaxation at most two items can be anything else.
    """
    out = []
    for xi, yi in zip(x, y):
        tight = set()
        if yi == 0:
            tight.add(Y_ZERO)
        if xi == yi:
            tight.add(X_EQ_Y)
        if xi == 1:
            tight.add(X_ONE)
        if len(tight) == 3:
            raise InvariantError("x=1, y=0 and x=y cannot hold together")
        if len(tight) == 2:
            tag = "T4"
        elif len(tight) == 1:
            tag = "T2" if X_EQ_Y in tight else "T3"
        else:
            tag = "T1"
        out.append(ItemCategory(tag, frozenset(tight)))
    loose = sum(1 for c in out if not c.integral)
    if loose > 2:
        raise InvariantError(f"{loose} non-integral items at a vertex (at most 2 possible)")
    return out


def lp_two_approx(instance: Instance, trace: list | None = None) -> RunReport:
    started = time.perf_counter()
    _require_unit_costs(instance, "lp2")
    reduced, mapping = preprocess(instance)
    items = reduced.items
    n = reduced.n
    k = math.floor(reduced.C)

    # columns: x_0..x_{n-1}, y_0..y_{n-1}; y is pinned to 0 for items without a level
    lp = ratlp.LinearProgram(
        [it.profit for it in items] + [0] * n,
        [(0, 1)] * n + [(0, None if it.levels else 0) for it in items],
    )
    lp.add_row([it.base_weight for it in items] + [-it.reduction for it in items], "<=", reduced.B)
    card = lp.add_row([0] * n + [1] * n, "<=", k)
    for i in range(n):
        lp.add_row({n + i: 1, i: -1}, "<=", 0)
    sol = ratlp.solve(lp)
    x, y = sol.values[:n], sol.values[n:]
    cats = categorize_items(x, y)
    loose = [i for i, c in enumerate(cats) if not c.integral]
    card_tight = sol.tight(card)
    record = {"lp": "lp2", "non_integral": len(loose), "cardinality_tight": card_tight,
              "types": [c.tag for c in cats]}
    if trace is not None:
        trace.append(record)

    t4 = [i for i in range(n) if cats[i].integral and x[i] == 1]
    t4_base = [i for i in t4 if y[i] == 0]
    t4_improved = [i for i in t4 if y[i] == 1]
    anomaly = None
    if not loose:
        candidates = [("lp-integral", _packing(n, t4_base, t4_improved))]
    elif len(loose) == 1:
        i = loose[0]
        candidates = [("t4", _packing(n, t4_base, t4_improved)), (f"single-{i}", _alone(reduced, i))]
    elif card_tight and y[loose[0]] + y[loose[1]] == 1:
        # y_i + y_j = 1 and y <= x put at least min(w^_i, w^_j) of the pair in
        # the knapsack, so T4 plus the lighter improved item always fits
        i, j = loose
        if items[i].improved_weight > items[j].improved_weight:
            i, j = j, i
        candidates = [
            (f"t4+{i}", _packing(n, t4_base, t4_improved + [i])),
            (f"single-{j}", _packing(n, improved=[j])),
        ]
    else:
        anomaly = f"two non-integral items {loose} without a tight unit pair"
        log.warning("lp2: %s; falling back to singleton candidates", anomaly)
        candidates = [("t4", _packing(n, t4_base, t4_improved))]
        candidates += [(f"single-{i}", _alone(reduced, i)) for i in loose]
    name, best, values = pick_best(reduced, candidates)
    return finish("lp2", instance, mapping.lift(best), Fraction(1, 2), started,
                  chosen=name, candidates=values, non_integral=len(loose),
                  cardinality_tight=card_tight, anomaly=anomaly)
