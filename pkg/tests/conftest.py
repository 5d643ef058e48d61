from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from iknap.model import CONTINUOUS, DISCRETE, ImprovementLevel, Instance, Item


def make(items, B, C, mode=DISCRETE) -> Instance:
    """Instance from (p, w, [(w1, c1), ...]) tuples."""
    return Instance(
        tuple(Item(p, w, tuple(ImprovementLevel(lw, lc) for lw, lc in levels))
              for p, w, levels in items),
        B, C, mode,
    )


@st.composite
def items_st(draw, max_levels=2, unit=False, max_value=30):
    p = draw(st.integers(0, max_value))
    w = draw(st.integers(0, max_value))
    depth = 1 if unit else draw(st.integers(0, max_levels))
    weights = sorted(draw(st.lists(st.integers(0, w), min_size=depth, max_size=depth)), reverse=True)
    if unit:
        costs = [1]
    else:
        costs = sorted(draw(st.lists(st.integers(0, max_value), min_size=depth, max_size=depth)))
    return p, w, list(zip(weights, costs))


@st.composite
def instances_st(draw, max_n=6, max_levels=2, unit=False, mode=DISCRETE, rational_data=False):
    if mode == CONTINUOUS:
        max_levels = 1
    items = draw(st.lists(items_st(max_levels, unit), max_size=max_n))
    total_w = sum(w for _, w, _ in items)
    B = draw(st.integers(0, total_w + 1))
    C = draw(st.integers(0, 60))
    inst = make(items, B, C, mode)
    if rational_data:
        den = draw(st.integers(1, 7))
        inst = Instance(
            tuple(Item(Fraction(it.profit, den), Fraction(it.base_weight, den),
                       tuple(ImprovementLevel(Fraction(l.weight, den), l.cost) for l in it.levels))
                  for it in inst.items),
            Fraction(B, den), C, mode,
        )
    return inst


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
