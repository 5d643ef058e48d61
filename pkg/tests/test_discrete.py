from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iknap import discrete
from iknap.discrete import categorize_items, greedy_kp_2approx
from iknap.generate import generate
from iknap.model import InvariantError, VariantError, evaluate
from iknap.oracle import exact_discrete

from conftest import instances_st, make


def knapsack_opt(weights, profits, B):
    best = 0
    for pick in itertools.product((0, 1), repeat=len(weights)):
        if sum(w for w, x in zip(weights, pick) if x) <= B:
            best = max(best, sum(p for p, x in zip(profits, pick) if x))
    return best


def check(report, instance, bound):
    ev = evaluate(instance, report.solution)
    assert ev.feasible and ev.total_profit == report.objective
    opt = exact_discrete(instance)[1]
    assert report.objective <= opt
    assert report.objective >= bound * opt
    return opt


# greedy knapsack

def test_greedy_kp_takes_both_small_items():
    assert sorted(greedy_kp_2approx([1, 1], [2, 2], 2)) == [0, 1]


def test_greedy_kp_trap():
    assert greedy_kp_2approx([1, 1000], [1, 1000], 1000) == [1]


def test_greedy_kp_skips_items_that_never_fit():
    assert greedy_kp_2approx([5, 1], [100, 1], 3) == [1]


@settings(max_examples=500, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), max_size=12), st.integers(0, 150))
def test_greedy_kp_half_of_optimum(pw, B):
    profits = [p for p, _ in pw]
    weights = [w for _, w in pw]
    chosen = greedy_kp_2approx(weights, profits, B)
    assert len(set(chosen)) == len(chosen)
    assert sum(weights[i] for i in chosen) <= B
    assert 2 * sum(profits[i] for i in chosen) >= knapsack_opt(weights, profits, B)


# six_approx

def test_six_without_useful_improvements_is_greedy_knapsack():
    # the only level costs more than C and gets pruned
    inst = make([(6, 3, [(1, 9)]), (5, 3, []), (4, 2, [])], 5, 2)
    report = discrete.six_approx(inst)
    assert report.extras["chosen"] == "kp-greedy"
    assert report.objective == 10


def test_six_when_only_improved_items_fit():
    inst = make([(6, 8, [(2, 1)]), (5, 9, [(3, 1)]), (4, 9, [(4, 1)])], 5, 2)
    report = discrete.six_approx(inst)
    assert report.extras["chosen"].startswith("mkp")
    assert check(report, inst, Fraction(1, 6)) == 11 == report.objective


def test_six_needs_single_level():
    with pytest.raises(VariantError):
        discrete.six_approx(make([(1, 5, [(3, 1), (2, 2)])], 5, 5))


@pytest.mark.parametrize("seed", range(60))
def test_six_ratio(seed):
    inst = generate(random.Random(seed).randint(1, 10), seed, "uniform", 1)
    check(discrete.six_approx(inst), inst, Fraction(1, 6))


# ckp_three_approx

def test_ckp3_exact_when_everything_fits():
    inst = make([(3, 2, [(1, 1)]), (4, 3, [(1, 1)]), (5, 1, [])], 10, 3)
    report = discrete.ckp_three_approx(inst)
    assert report.objective == 12
    assert report.extras["fractional"] == 0


def test_ckp3_requires_unit_costs():
    with pytest.raises(VariantError):
        discrete.ckp_three_approx(make([(3, 2, [(1, 2)])], 10, 3))


def test_ckp3_fractional_pair_sums_to_one():
    seen = 0
    for seed in range(300):
        inst = generate(random.Random(seed).randint(2, 10), seed, "unit-cost", 1)
        trace = []
        report = discrete.ckp_three_approx(inst, trace)
        (rec,) = trace
        assert rec["fractional"] <= 2
        if rec["fractional"] == 2 and rec["cardinality_tight"]:
            assert Fraction(rec["pair_sum"]) == 1
            seen += 1
        check(report, inst, Fraction(1, 3))
    assert seen > 0


@settings(max_examples=150, deadline=None)
@given(instances_st(max_n=7, unit=True))
def test_ckp3_ratio_property(inst):
    check(discrete.ckp_three_approx(inst), inst, Fraction(1, 3))


# categorization

def test_categorize_integral_solution():
    cats = categorize_items([1, 1, 0], [0, 1, 0])
    assert [c.tag for c in cats] == ["T4", "T4", "T4"]
    assert cats[0].tight == {discrete.Y_ZERO, discrete.X_ONE}


def test_categorize_one_fractional_pair():
    cats = categorize_items([Fraction(2, 3), 1], [Fraction(2, 3), 0])
    assert [c.tag for c in cats] == ["T2", "T4"]


def test_categorize_types():
    half = Fraction(1, 2)
    assert [c.tag for c in categorize_items([half, 1], [Fraction(1, 4), half])] == ["T1", "T3"]
    assert [c.tag for c in categorize_items([half, 1], [0, 1])] == ["T3", "T4"]
    with pytest.raises(InvariantError):
        categorize_items([half] * 3, [0] * 3)


# lp_two_approx

def test_lp2_integral_case_is_exact():
    inst = make([(3, 2, [(1, 1)]), (4, 3, [(1, 1)])], 10, 2)
    report = discrete.lp_two_approx(inst)
    assert report.extras["non_integral"] == 0
    assert report.objective == 7


def test_lp2_single_loose_item():
    # C is not binding and the last item fits only partly
    inst = make([(10, 6, [(6, 1)]), (9, 6, [(6, 1)])], 8, 5)
    report = discrete.lp_two_approx(inst)
    assert report.extras["non_integral"] == 1
    check(report, inst, Fraction(1, 2))


def test_lp2_pair_prefers_lighter_improved_item():
    # the T4 packing plus the smaller-reduction item would overflow B by 1
    inst = make([(55, 13, [(13, 1)]), (6, 47, [(12, 1)]), (99, 12, [(12, 1)]), (24, 69, [(59, 1)])],
                83, 1)
    report = discrete.lp_two_approx(inst)
    assert report.extras["non_integral"] == 2
    assert report.extras["chosen"] == "t4+1"
    check(report, inst, Fraction(1, 2))


def test_lp2_requires_unit_costs():
    with pytest.raises(VariantError):
        discrete.lp_two_approx(make([(3, 2, [(1, 1), (0, 1)])], 10, 3))


@pytest.mark.parametrize("seed", range(80))
def test_lp2_ratio(seed):
    inst = generate(random.Random(seed).randint(1, 10), seed, "unit-cost", 1)
    trace = []
    report = discrete.lp_two_approx(inst, trace)
    check(report, inst, Fraction(1, 2))
    assert trace[0]["non_integral"] <= 2
    if trace[0]["non_integral"] <= 1 or not trace[0]["cardinality_tight"]:
        assert sum(t != "T4" for t in trace[0]["types"]) <= 1 or report.extras["anomaly"]


@settings(max_examples=150, deadline=None)
@given(instances_st(max_n=7, unit=True, rational_data=True))
def test_lp2_ratio_property(inst):
    check(discrete.lp_two_approx(inst), inst, Fraction(1, 2))
