"""Domain types for improvable knapsack instances.

An instance is a list of items, each with a profit, a base weight and an
ordered list of improvement levels.  Level ``l`` replaces the base weight by
``levels[l-1].weight`` at cumulative cost ``levels[l-1].cost`` drawn from the
improvement budget ``C``; the packed weight must stay within ``B``.

All numbers are exact rationals.  Integral values are stored as ``int`` and
everything else as :class:`fractions.Fraction`, which keeps the common
all-integer case fast without giving up exactness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]

CONTINUOUS = "continuous"
DISCRETE = "discrete"
MODES = (CONTINUOUS, DISCRETE)


class ModelError(ValueError):
    """Structurally invalid solution or instance data."""


class ParseError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class VariantError(ValueError):
    """An algorithm was asked to solve an instance outside its problem variant."""


class InvariantError(RuntimeError):
    """A structural property the algorithms rely on was violated (a bug)."""


def rational(value) -> Rational:
    """Convert ``value`` to an exact rational, collapsing integers to ``int``.

    Floats go through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        value = Fraction(repr(value))
    elif isinstance(value, (str, Decimal)):
        value = Fraction(value)
    elif not isinstance(value, Fraction):
        value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


def format_rational(value: Rational) -> str:
    """Exact string form: a plain decimal when it terminates, ``num/den`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


@dataclass(frozen=True)
class ImprovementLevel:
    weight: Rational
    cost: Rational

    def __post_init__(self):
        object.__setattr__(self, "weight", rational(self.weight))
        object.__setattr__(self, "cost", rational(self.cost))


@dataclass(frozen=True)
class Item:
    profit: Rational
    base_weight: Rational
    levels: tuple[ImprovementLevel, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "profit", rational(self.profit))
        object.__setattr__(self, "base_weight", rational(self.base_weight))
        levels = tuple(
            lvl if isinstance(lvl, ImprovementLevel) else ImprovementLevel(*lvl)
            for lvl in self.levels
        )
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self) -> int:
        """Number of improvement levels, j(i)."""
        return len(self.levels)

    def weight_at(self, level: int) -> Rational:
        return self.base_weight if level == 0 else self.levels[level - 1].weight

    def cost_at(self, level: int) -> Rational:
        return 0 if level == 0 else self.levels[level - 1].cost

    # Single-level shorthands; an item without levels has no reduction and no cost.
    @property
    def reduction(self) -> Rational:
        return self.base_weight - self.levels[0].weight if self.levels else 0

    @property
    def cost(self) -> Rational:
        return self.levels[0].cost if self.levels else 0

    @property
    def improved_weight(self) -> Rational:
        return self.levels[0].weight if self.levels else self.base_weight


@dataclass(frozen=True)
class Instance:
    items: tuple[Item, ...]
    knapsack_budget: Rational
    improvement_budget: Rational
    improvement_mode: str = DISCRETE

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "knapsack_budget", rational(self.knapsack_budget))
        object.__setattr__(self, "improvement_budget", rational(self.improvement_budget))
        if self.improvement_mode not in MODES:
            raise ModelError(f"unknown improvement mode {self.improvement_mode!r}")

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def B(self) -> Rational:
        return self.knapsack_budget

    @property
    def C(self) -> Rational:
        return self.improvement_budget

    @property
    def continuous(self) -> bool:
        return self.improvement_mode == CONTINUOUS

    def single_level(self) -> bool:
        return all(item.depth <= 1 for item in self.items)

    def unit_costs(self) -> bool:
        return self.single_level() and all(item.cost == 1 for item in self.items if item.levels)

    def max_depth(self) -> int:
        return max((item.depth for item in self.items), default=0)

    def with_items(self, items: Iterable[Item]) -> "Instance":
        return Instance(tuple(items), self.B, self.C, self.improvement_mode)


@dataclass(frozen=True)
class Solution:
    """Packing vector plus per-item improvement.

    In discrete mode ``improvement[i]`` is an integer level; in continuous
    mode it is the improved fraction ``y_i`` in [0, 1].
    """

    packed: tuple[int, ...]
    improvement: tuple[Rational, ...]

    def __post_init__(self):
        object.__setattr__(self, "packed", tuple(int(x) for x in self.packed))
        object.__setattr__(self, "improvement", tuple(rational(y) for y in self.improvement))

    @classmethod
    def empty(cls, n: int) -> "Solution":
        return cls((0,) * n, (0,) * n)

    @classmethod
    def from_levels(cls, n: int, levels: dict[int, Rational]) -> "Solution":
        """Build a solution packing exactly the keys of ``levels``."""
        packed = [0] * n
        improvement: list[Rational] = [0] * n
        for i, lvl in levels.items():
            packed[i] = 1
            improvement[i] = lvl
        return cls(tuple(packed), tuple(improvement))

    def chosen(self) -> list[int]:
        return [i for i, x in enumerate(self.packed) if x]

    def to_dict(self) -> dict:
        return {
            "packed": list(self.packed),
            "improvement": [
                y if isinstance(y, int) else format_rational(y) for y in self.improvement
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Solution":
        try:
            return cls(doc["packed"], doc["improvement"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError("solution", str(exc)) from exc


@dataclass(frozen=True)
class Evaluation:
    total_profit: Rational
    effective_weight: Rational
    improvement_cost: Rational
    feasible: bool


@dataclass(frozen=True)
class Violation:
    item: int | None
    level: int | None
    message: str

    def __str__(self) -> str:
        where = []
        if self.item is not None:
            where.append(f"item {self.item}")
        if self.level is not None:
            where.append(f"level {self.level}")
        return f"{self.message} at {', '.join(where)}" if where else self.message


def validate(instance: Instance) -> list[Violation]:
    """List every broken invariant of ``instance``; empty means valid."""
    out: list[Violation] = []
    if instance.B < 0:
        out.append(Violation(None, None, "negative knapsack budget"))
    if instance.C < 0:
        out.append(Violation(None, None, "negative improvement budget"))
    if instance.continuous and not instance.single_level():
        out.append(Violation(None, None, "continuous improvements need a single-level instance"))
    for i, item in enumerate(instance.items):
        if item.profit < 0:
            out.append(Violation(i, None, "negative profit"))
        if item.base_weight < 0:
            out.append(Violation(i, None, "negative base weight"))
        prev_w, prev_c = item.base_weight, 0
        for lvl, level in enumerate(item.levels, start=1):
            if level.weight < 0:
                out.append(Violation(i, lvl, "negative weight"))
            if level.cost < 0:
                out.append(Violation(i, lvl, "negative cost"))
            if level.weight > prev_w:
                out.append(Violation(i, lvl, "weights not non-increasing"))
            if level.cost < prev_c:
                out.append(Violation(i, lvl, "costs not non-decreasing"))
            prev_w, prev_c = level.weight, level.cost
    return out


def evaluate(instance: Instance, solution: Solution) -> Evaluation:
    n = instance.n
    if len(solution.packed) != n or len(solution.improvement) != n:
        raise ModelError(
            f"solution has {len(solution.packed)}/{len(solution.improvement)} entries, "
            f"instance has {n} items"
        )
    profit: Rational = 0
    weight: Rational = 0
    cost: Rational = 0
    for i, (item, x, y) in enumerate(zip(instance.items, solution.packed, solution.improvement)):
        if x not in (0, 1):
            raise ModelError(f"item {i}: packing indicator must be 0 or 1")
        if not x:
            if y != 0:
                raise ModelError(f"item {i}: unpacked item carries improvement {y}")
            continue
        profit += item.profit
        if instance.continuous:
            if not 0 <= y <= 1:
                raise ModelError(f"item {i}: improvement fraction {y} outside [0, 1]")
            if y and not item.levels:
                raise ModelError(f"item {i}: improved item has no improvement level")
            weight += item.base_weight - item.reduction * y
            cost += item.cost * y
        else:
            if not isinstance(y, int) or not 0 <= y <= item.depth:
                raise ModelError(f"item {i}: level {y} outside 0..{item.depth}")
            weight += item.weight_at(y)
            cost += item.cost_at(y)
    feasible = weight <= instance.B and cost <= instance.C
    return Evaluation(rational(profit), rational(weight), rational(cost), feasible)


@dataclass(frozen=True)
class IndexMap:
    """Maps a preprocessed instance back onto the instance it came from."""

    original_n: int
    items: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...] = field(default=())

    def lift(self, solution: Solution, continuous: bool = False) -> Solution:
        packed = [0] * self.original_n
        improvement: list[Rational] = [0] * self.original_n
        for new, orig in enumerate(self.items):
            if not solution.packed[new]:
                continue
            packed[orig] = 1
            y = solution.improvement[new]
            if continuous or y == 0:
                improvement[orig] = y
            else:
                improvement[orig] = self.levels[new][y - 1]
        return Solution(tuple(packed), tuple(improvement))


def preprocess(instance: Instance) -> tuple[Instance, IndexMap]:
    """Drop item forms that cannot be part of any feasible solution.

    Discrete mode removes every level whose weight exceeds ``B`` or whose
    cost exceeds ``C``, then every item left with no form that fits on its
    own.  A too-heavy base form of an item with a fitting level stays in the
    model; no algorithm packs it alone.  Continuous mode keeps all levels
    (partial improvements remain affordable) and only removes items that do
    not fit even with the largest affordable improvement.
    """
    B, C = instance.B, instance.C
    items: list[Item] = []
    kept: list[int] = []
    level_maps: list[tuple[int, ...]] = []
    for i, item in enumerate(instance.items):
        if instance.continuous:
            if item.levels and item.reduction > 0:
                frac = 1 if item.cost <= C else Fraction(C) / item.cost
                best = item.base_weight - item.reduction * frac
            else:
                best = item.base_weight
            if best > B:
                continue
            items.append(item)
            kept.append(i)
            level_maps.append(tuple(range(1, item.depth + 1)))
            continue
        keep = [
            (lvl, level)
            for lvl, level in enumerate(item.levels, start=1)
            if level.weight <= B and level.cost <= C
        ]
        if item.base_weight > B and not keep:
            continue
        items.append(Item(item.profit, item.base_weight, tuple(level for _, level in keep)))
        kept.append(i)
        level_maps.append(tuple(lvl for lvl, _ in keep))
    return instance.with_items(items), IndexMap(instance.n, tuple(kept), tuple(level_maps))


def singleton_level(item: Item, instance: Instance) -> int | None:
    """Lowest level at which ``item`` fits alone within both budgets."""
    for lvl in range(item.depth + 1):
        if item.weight_at(lvl) <= instance.B and item.cost_at(lvl) <= instance.C:
            return lvl
    return None


# ---------------------------------------------------------------------------
# JSON file format

def _number(value, location: str) -> Rational:
    if isinstance(value, bool) or not isinstance(value, (int, str, Decimal)):
        raise ParseError(location, f"expected a decimal string, got {value!r}")
    try:
        number = rational(value.strip() if isinstance(value, str) else value)
    except (ValueError, ZeroDivisionError, InvalidOperation):
        raise ParseError(location, f"not a number: {value!r}") from None
    if number < 0:
        raise ParseError(location, f"negative value {value!r}")
    return number


def _field(doc: dict, key: str, location: str):
    if not isinstance(doc, dict):
        raise ParseError(location, "expected an object")
    if key not in doc:
        raise ParseError(f"{location}.{key}" if location else key, f"missing field {key!r}")
    return doc[key]


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("document", "expected a JSON object")
    B = _number(_field(doc, "B", ""), "B")
    C = _number(_field(doc, "C", ""), "C")
    mode = doc.get("mode", DISCRETE)
    if mode not in MODES:
        raise ParseError("mode", f"expected one of {MODES}, got {mode!r}")
    raw_items = _field(doc, "items", "")
    if not isinstance(raw_items, list):
        raise ParseError("items", "expected a list")
    items = []
    for i, raw in enumerate(raw_items):
        loc = f"items[{i}]"
        p = _number(_field(raw, "p", loc), f"{loc}.p")
        w = _number(_field(raw, "w", loc), f"{loc}.w")
        raw_levels = raw.get("levels", [])
        if not isinstance(raw_levels, list):
            raise ParseError(f"{loc}.levels", "expected a list")
        levels = []
        for l, lvl in enumerate(raw_levels):
            lloc = f"{loc}.levels[{l}]"
            levels.append(ImprovementLevel(
                _number(_field(lvl, "w", lloc), f"{lloc}.w"),
                _number(_field(lvl, "c", lloc), f"{lloc}.c"),
            ))
        items.append(Item(p, w, tuple(levels)))
    return Instance(tuple(items), B, C, mode)


def instance_to_dict(instance: Instance) -> dict:
    return {
        "B": format_rational(instance.B),
        "C": format_rational(instance.C),
        "mode": instance.improvement_mode,
        "items": [
            {
                "p": format_rational(item.profit),
                "w": format_rational(item.base_weight),
                "levels": [
                    {"w": format_rational(lvl.weight), "c": format_rational(lvl.cost)}
                    for lvl in item.levels
                ],
            }
            for item in instance.items
        ],
    }


def parse_instance(data: bytes | str) -> Instance:
    try:
        doc = json.loads(data, parse_float=Decimal)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError("document", f"malformed JSON: {exc}") from exc
    return instance_from_dict(doc)


def serialize_instance(instance: Instance) -> bytes:
    return (json.dumps(instance_to_dict(instance), indent=2) + "\n").encode()


def profit_of(instance: Instance, indices: Sequence[int]) -> Rational:
    return rational(sum((instance.items[i].profit for i in indices), 0))
