from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .model import (
    Instance,
    InvariantError,
    Rational,
    Solution,
    evaluate,
    format_rational,
    rational,
)


def rational_field(value: Rational | None) -> dict | None:
    if value is None:
        return None
    return {"exact": format_rational(value), "approx": float(Fraction(value))}


def _read_rational(doc: dict | None) -> Rational | None:
    return None if doc is None else rational(doc["exact"])


@dataclass(frozen=True)
class RunReport:
    """Outcome of one algorithm run, optionally compared with an exact optimum.

    ``bound`` is the certified ratio: the objective is guaranteed to be at
    least ``bound`` times the optimum.
    """

    algorithm: str
    objective: Rational
    solution: Solution
    bound: Rational
    instance_id: str = ""
    oracle: Rational | None = None
    wall_ms: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def ratio(self) -> Fraction | None:
        if self.oracle is None:
            return None
        if self.oracle == 0:
            return Fraction(1) if self.objective == 0 else None
        return Fraction(self.objective) / self.oracle

    def with_oracle(self, value: Rational) -> "RunReport":
        return replace(self, oracle=rational(value))

    def violations(self) -> list[str]:
        out = []
        if self.oracle is not None:
            if self.objective > self.oracle:
                out.append(f"objective {self.objective} exceeds the optimum {self.oracle}")
            if self.objective < self.bound * self.oracle:
                out.append(
                    f"objective {self.objective} below {format_rational(self.bound)} "
                    f"x optimum {self.oracle}"
                )
        return out

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance_id": self.instance_id,
            "objective": rational_field(self.objective),
            "bound": rational_field(self.bound),
            "oracle": rational_field(self.oracle),
            "ratio": rational_field(self.ratio),
            "wall_ms": self.wall_ms,
            "solution": self.solution.to_dict(),
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        return cls(
            algorithm=doc["algorithm"],
            objective=_read_rational(doc["objective"]),
            solution=Solution.from_dict(doc["solution"]),
            bound=_read_rational(doc["bound"]),
            instance_id=doc.get("instance_id", ""),
            oracle=_read_rational(doc.get("oracle")),
            wall_ms=doc.get("wall_ms", 0.0),
            extras=doc.get("extras", {}),
        )


def finish(
    algorithm: str,
    instance: Instance,
    solution: Solution,
    bound: Rational,
    started: float,
    **extras,
) -> RunReport:
    """Evaluate ``solution`` exactly and wrap it in a report.

    Every solver funnels through here, so an infeasible answer is caught as
    an internal error instead of being reported.
    """
    ev = evaluate(instance, solution)
    if not ev.feasible:
        raise InvariantError(f"{algorithm} produced an infeasible solution: {ev}")
    return RunReport(
        algorithm=algorithm,
        objective=ev.total_profit,
        solution=solution,
        bound=rational(bound),
        wall_ms=(time.perf_counter() - started) * 1000,
        extras=extras,
    )


def pick_best(instance: Instance, candidates: list[tuple[str, Solution]]) -> tuple[str, Solution, dict]:
    """Highest-profit candidate, first one on ties; every candidate must be feasible."""
    values: dict[str, Rational] = {}
    best_name, best_sol, best_value = None, None, None
    for name, sol in candidates:
        ev = evaluate(instance, sol)
        if not ev.feasible:
            raise InvariantError(f"candidate {name} is infeasible: {ev}")
        values[name] = ev.total_profit
        if best_value is None or ev.total_profit > best_value:
            best_name, best_sol, best_value = name, sol, ev.total_profit
    return best_name, best_sol, {k: format_rational(v) for k, v in values.items()}
