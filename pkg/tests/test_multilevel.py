from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from iknap import multilevel
from iknap.generate import generate
from iknap.model import CONTINUOUS, Instance, VariantError, evaluate
from iknap.oracle import exact_discrete

from conftest import instances_st, make


def check(report, instance, bound):
    ev = evaluate(instance, report.solution)
    assert ev.feasible and ev.total_profit == report.objective
    opt = exact_discrete(instance)[1]
    assert bound * opt <= report.objective <= opt
    return opt


def test_dp_two_item_example():
    report = multilevel.dp_exact(make([(3, 4, [(2, 1)]), (2, 3, [])], 5, 1))
    assert report.objective == 5
    assert report.solution.improvement == (1, 0)


def test_dp_deep_single_item():
    report = multilevel.dp_exact(make([(4, 5, [(3, 1), (1, 2)])], 1, 2))
    assert report.objective == 4 and report.solution.improvement == (2,)


@pytest.mark.parametrize("seed", range(20))
def test_dp_without_budget_is_classic_knapsack(seed):
    inst = generate(random.Random(seed).randint(1, 9), seed, "uniform", 2)
    inst = Instance(inst.items, inst.B, 0)
    best = 0
    for pick in itertools.product((0, 1), repeat=inst.n):
        if sum(it.base_weight for it, x in zip(inst.items, pick) if x) <= inst.B:
            best = max(best, sum(it.profit for it, x in zip(inst.items, pick) if x))
    assert multilevel.dp_exact(inst).objective == best


@settings(max_examples=150, deadline=None)
@given(instances_st(max_n=6, max_levels=3))
def test_dp_matches_oracle(inst):
    check(multilevel.dp_exact(inst), inst, 1)


def test_dp_accepts_rational_weights_only():
    inst = make([(3, Fraction(7, 2), [(Fraction(3, 2), 1)]), (2, Fraction(5, 2), [])], 4, 1)
    assert multilevel.dp_exact(inst).objective == 5
    with pytest.raises(VariantError):
        multilevel.dp_exact(make([(Fraction(1, 2), 1, [])], 1, 0))
    with pytest.raises(VariantError):
        multilevel.dp_exact(make([(1, 1, [(0, Fraction(1, 2))])], 1, 1))
    with pytest.raises(VariantError):
        multilevel.dp_exact(make([(1, 1, [])], 1, 0, CONTINUOUS))


@pytest.mark.parametrize("seed", range(10))
def test_table_invariants(seed):
    inst = generate(6, seed, "uniform", 2)
    profits = [it.profit for it in inst.items]
    table = multilevel.fill_table(inst, profits)
    W = table.W
    assert (W[:, :, 0] == 0).all()
    # more budget or more items never make a profit level heavier
    assert (np.diff(W, axis=1) <= 0).all()
    assert (W[1:] <= W[:-1]).all()
    r = table.best_profit(inst.B)
    levels = table.reconstruct(r)
    assert sum(profits[i] for i in levels) == r
    assert sum(inst.items[i].weight_at(l) for i, l in levels.items()) == table.weight(inst.n, table.budget, r)
    assert table.weight(0, 0, 1) == math.inf


def test_ptas_keeps_the_huge_item():
    inst = make([(10**6, 10, []), (1, 10, [])], 10, 0)
    report = multilevel.ptas_scaled(inst, Fraction(1, 2))
    assert report.objective == 10**6


def test_ptas_all_zero_profits():
    report = multilevel.ptas_scaled(make([(0, 1, []), (0, 2, [])], 5, 0), Fraction(1, 10))
    assert report.objective == 0 and report.solution.packed == (0, 0)


def test_ptas_with_near_identity_scaling():
    # K = 0.5 * 2 / 2 < 1 leaves the profits untouched
    inst = make([(2, 3, [(1, 1)]), (1, 2, [])], 3, 1)
    assert multilevel.ptas_scaled(inst, Fraction(1, 2)).objective == 3


@settings(max_examples=100, deadline=None)
@given(instances_st(max_n=6, max_levels=2, rational_data=True))
def test_ptas_ratio_on_rational_profits(inst):
    for eps in (Fraction(1, 10), Fraction(1, 2)):
        check(multilevel.ptas_scaled(inst, eps), inst, 1 - eps)


def test_lp3_integral_relaxation_is_exact():
    inst = make([(3, 2, [(1, 1), (0, 2)]), (4, 3, [])], 10, 5)
    report = multilevel.lp_three_approx(inst)
    assert report.extras["non_integral"] == 0
    assert report.objective == 7


@settings(max_examples=150, deadline=None)
@given(instances_st(max_n=6, max_levels=3, rational_data=True))
def test_lp3_ratio(inst):
    trace = []
    report = multilevel.lp_three_approx(inst, trace)
    assert trace[0]["non_integral"] <= 2
    check(report, inst, Fraction(1, 3))
