"""Algorithm registry and the ratio-verification benchmark."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from . import continuous, discrete, multilevel, oracle
from .model import DISCRETE, Instance, InvariantError, VariantError, format_rational
from .generate import generate
from .report import RunReport, finish

COLUMNS = ("seed", "algo", "n", "value", "oracle", "ratio", "ms")


def run_oracle(instance: Instance, eps=None) -> RunReport:
    started = time.perf_counter()
    if instance.continuous:
        sol, _ = oracle.exact_continuous(instance)
    else:
        sol, _ = oracle.exact_discrete(instance)
    return finish("oracle", instance, sol, 1, started)


def run_cs_ptas(instance: Instance, eps) -> RunReport:
    started = time.perf_counter()
    trace: list = []
    sol = continuous.ptas_ikcs(instance, eps, trace=trace)
    worst = max((t["fractional"] for t in trace), default=0)
    return finish("cs-ptas", instance, sol, 1 - continuous.as_epsilon(eps), started,
                  lp_solves=len(trace), max_fractional=worst)


ALGORITHMS: dict[str, Callable[[Instance, object], RunReport]] = {
    "oracle": run_oracle,
    "dp": lambda inst, eps: multilevel.dp_exact(inst),
    "ptas": lambda inst, eps: multilevel.ptas_scaled(inst, eps),
    "six": lambda inst, eps: discrete.six_approx(inst),
    "ckp3": lambda inst, eps: discrete.ckp_three_approx(inst),
    "lp2": lambda inst, eps: discrete.lp_two_approx(inst),
    "lp3": lambda inst, eps: multilevel.lp_three_approx(inst),
    "cs-ptas": run_cs_ptas,
}


def run(algo: str, instance: Instance, eps=Fraction(1, 10),
        registry: dict | None = None) -> RunReport:
    registry = ALGORITHMS if registry is None else registry
    if algo not in registry:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(registry)}")
    return registry[algo](instance, eps)


def optimum(instance: Instance, limit: int | None = None):
    """Exact optimum by enumeration, or None when the instance is too large."""
    try:
        if instance.continuous:
            return oracle.exact_continuous(instance, limit)[1]
        return oracle.exact_discrete(instance, limit)[1]
    except oracle.OracleLimitError:
        return None


@dataclass
class BenchResult:
    rows: list[dict]
    summary: list[dict]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        writer.writerows(self.summary)
        return buf.getvalue()


def bench(
    family: str,
    count: int,
    algos: Iterable[str],
    eps=Fraction(1, 10),
    max_n: int = 8,
    levels: int = 1,
    mode: str = DISCRETE,
    first_seed: int = 0,
    registry: dict | None = None,
    limit: int | None = None,
) -> BenchResult:
    """Run every algorithm on ``count`` generated instances and check its bound.

    A row is a failure when the objective exceeds the optimum, falls below
    the certified fraction of it, or the solver trips an internal invariant.
    Rows are ordered by seed, then algorithm name.
    """
    algos = sorted(set(algos))
    rows, failures = [], []
    worst: dict[str, Fraction | None] = {a: None for a in algos}
    total_ms: dict[str, float] = {a: 0.0 for a in algos}
    for seed in range(first_seed, first_seed + count):
        n = random.Random(seed).randint(1, max_n)
        instance = generate(n, seed, family, levels, mode)
        opt = optimum(instance, limit)
        for algo in algos:
            row = {"seed": seed, "algo": algo, "n": n, "value": "", "oracle": "",
                   "ratio": "", "ms": ""}
            rows.append(row)
            if opt is not None:
                row["oracle"] = format_rational(opt)
            else:
                row["oracle"] = "no-oracle"
            try:
                report = run(algo, instance, eps, registry)
            except VariantError:
                row["value"] = "n/a"
                continue
            except oracle.OracleLimitError:
                row["value"] = "no-oracle"
                continue
            except InvariantError as exc:
                row["value"] = "error"
                failures.append(f"seed {seed} {algo}: {exc}")
                continue
            row["value"] = format_rational(report.objective)
            row["ms"] = f"{report.wall_ms:.3f}"
            total_ms[algo] += report.wall_ms
            if opt is None:
                continue
            report = report.with_oracle(opt)
            ratio = report.ratio
            if ratio is not None:
                row["ratio"] = f"{float(ratio):.6f}"
                if worst[algo] is None or ratio < worst[algo]:
                    worst[algo] = ratio
            failures += [f"seed {seed} {algo}: {v}" for v in report.violations()]
    summary = [
        {"seed": "summary", "algo": a, "n": "", "value": "", "oracle": "",
         "ratio": "" if worst[a] is None else f"{float(worst[a]):.6f}",
         "ms": f"{total_ms[a]:.3f}"}
        for a in algos
    ]
    return BenchResult(rows, summary, failures)
