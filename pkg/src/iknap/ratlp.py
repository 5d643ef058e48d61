"""Exact rational bounded-variable simplex.

Solves ``max c.x`` subject to linear rows (``<=``, ``>=`` or ``=``) and
per-variable bounds ``lo <= x <= up`` (``up`` may be infinite).  Bounds are
handled implicitly: a nonbasic variable sits at one of its bounds, so every
optimal answer is a vertex and the basis has one variable per row.  That is
what lets callers count fractional variables structurally.

Arithmetic is :class:`fractions.Fraction` throughout and pivoting follows
Bland's rule, so the result is exact and the method terminates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .model import InvariantError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

RELATIONS = ("<=", ">=", "=")

_LOWER, _UPPER, _BASIC = 0, 1, 2
_MAX_PIVOTS = 100_000

Coeffs = Union[Sequence, Mapping[int, object]]


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction


@dataclass
class LinearProgram:
    """A maximization LP with dense rational data.

    ``add_row`` accepts either a dense coefficient sequence or a sparse
    ``{column: coefficient}`` mapping.
    """

    objective: list[Fraction]
    rows: list[Row] = field(default_factory=list)
    bounds: list[tuple[Fraction, Fraction | None]] = field(default_factory=list)

    def __init__(self, objective, bounds=None):
        self.objective = [Fraction(c) for c in objective]
        n = len(self.objective)
        if bounds is None:
            bounds = [(0, None)] * n
        if len(bounds) != n:
            raise ValueError(f"{len(bounds)} bounds for {n} variables")
        self.bounds = []
        for j, (lo, up) in enumerate(bounds):
            if lo is None:
                raise ValueError(f"variable {j}: free variables are not supported")
            lo = Fraction(lo)
            up = None if up is None else Fraction(up)
            if up is not None and up < lo:
                raise ValueError(f"variable {j}: lower bound {lo} exceeds upper bound {up}")
            self.bounds.append((lo, up))
        self.rows = []

    @property
    def n(self) -> int:
        return len(self.objective)

    def add_row(self, coeffs: Coeffs, relation: str, rhs) -> int:
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        dense = [Fraction(0)] * self.n
        if isinstance(coeffs, Mapping):
            for j, a in coeffs.items():
                dense[j] += Fraction(a)
        else:
            if len(coeffs) != self.n:
                raise ValueError(f"row has {len(coeffs)} coefficients, expected {self.n}")
            dense = [Fraction(a) for a in coeffs]
        self.rows.append(Row(tuple(dense), relation, Fraction(rhs)))
        return len(self.rows) - 1


@dataclass(frozen=True)
class BasicLpSolution:
    status: str
    values: tuple[Fraction, ...] = ()
    objective: Fraction | None = None
    basis: frozenset = frozenset()
    slacks: tuple[Fraction, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def tight(self, row: int) -> bool:
        """Whether constraint ``row`` holds with equality."""
        return self.slacks[row] == 0


def fractional_vars(sol: BasicLpSolution) -> list[tuple[int, Fraction]]:
    """Variables whose value is not an integer, in index order."""
    if not sol.optimal:
        raise ValueError(f"fractional_vars needs an optimal solution, got {sol.status}")
    return [(j, v) for j, v in enumerate(sol.values) if v.denominator != 1]


class _Tableau:
    def __init__(self, lp: LinearProgram):
        n = lp.n
        m = len(lp.rows)
        self.n = n
        self.lo = [b[0] for b in lp.bounds]
        ups: list[Fraction | None] = [None if b[1] is None else b[1] - b[0] for b in lp.bounds]

        # one slack column per inequality row
        slack_of: list[int | None] = []
        ncols = n
        for row in lp.rows:
            if row.relation == "=":
                slack_of.append(None)
            else:
                slack_of.append(ncols)
                ncols += 1
                ups.append(None)
        self.n_slack_end = ncols

        # shift lower bounds to zero, make every rhs nonnegative
        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        initial: list[int | None] = []
        for r, row in enumerate(lp.rows):
            coeffs = list(row.coeffs) + [Fraction(0)] * (ncols - n)
            s = slack_of[r]
            if s is not None:
                coeffs[s] = Fraction(1 if row.relation == "<=" else -1)
            b = row.rhs - sum((a * l for a, l in zip(row.coeffs, self.lo) if a), Fraction(0))
            if b < 0:
                coeffs = [-a for a in coeffs]
                b = -b
            rows.append(coeffs)
            rhs.append(b)
            initial.append(s if s is not None and coeffs[s] == 1 else None)

        self.artificial_start = ncols
        for r in range(m):
            if initial[r] is None:
                initial[r] = ncols
                ncols += 1
                ups.append(None)
        for r in range(m):
            rows[r].extend([Fraction(0)] * (ncols - len(rows[r])))
            a = initial[r]
            if a >= self.artificial_start:
                rows[r][a] = Fraction(1)

        self.ncols = ncols
        self.up = ups
        self.T = rows
        self.basis: list[int] = list(initial)
        self.status = [_LOWER] * ncols
        self.x = [Fraction(0)] * ncols
        for r, j in enumerate(self.basis):
            self.status[j] = _BASIC
            self.x[j] = rhs[r]
        self.d: list[Fraction] = []

    def price(self, cost: Sequence[Fraction]) -> None:
        d = list(cost)
        for r, j in enumerate(self.basis):
            cb = cost[j]
            if cb:
                row = self.T[r]
                for k in range(self.ncols):
                    if row[k]:
                        d[k] -= cb * row[k]
        self.d = d

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        prow = T[r]
        piv = prow[j]
        if piv != 1:
            prow = [a / piv for a in prow]
            T[r] = prow
        nz = [k for k, a in enumerate(prow) if a]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
        f = self.d[j]
        if f:
            for k in nz:
                self.d[k] -= f * prow[k]
        leaving = self.basis[r]
        self.basis[r] = j
        self.status[j] = _BASIC
        return leaving

    def run(self) -> str:
        """Primal simplex from the current basic feasible point."""
        for _ in range(_MAX_PIVOTS):
            enter = None
            direction = 0
            for j in range(self.ncols):
                st = self.status[j]
                if st == _BASIC:
                    continue
                dj = self.d[j]
                if st == _LOWER and dj > 0 and (self.up[j] is None or self.up[j] > 0):
                    enter, direction = j, 1
                    break
                if st == _UPPER and dj < 0:
                    enter, direction = j, -1
                    break
            if enter is None:
                return OPTIMAL

            j = enter
            step = self.up[j]
            leave_row = None
            leave_var = j if step is not None else None
            leave_to = _UPPER if direction > 0 else _LOWER
            for r, b in enumerate(self.basis):
                alpha = -self.T[r][j] * direction
                if alpha < 0:
                    t = self.x[b] / -alpha
                    to = _LOWER
                elif alpha > 0 and self.up[b] is not None:
                    t = (self.up[b] - self.x[b]) / alpha
                    to = _UPPER
                else:
                    continue
                if step is None or t < step or (t == step and b < leave_var):
                    step, leave_row, leave_var, leave_to = t, r, b, to
            if step is None:
                return UNBOUNDED

            if step:
                self.x[j] += direction * step
                for r, b in enumerate(self.basis):
                    a = self.T[r][j]
                    if a:
                        self.x[b] -= a * direction * step
            if leave_row is None:
                self.status[j] = leave_to
                continue
            left = self.pivot(leave_row, j)
            self.status[left] = leave_to
            # exact snap so the leaving variable rests precisely on its bound
            self.x[left] = Fraction(0) if leave_to == _LOWER else self.up[left]
        raise InvariantError("simplex exceeded its pivot limit")


def solve(lp: LinearProgram) -> BasicLpSolution:
    """Return an optimal vertex of ``lp`` (or its infeasible/unbounded status)."""
    tab = _Tableau(lp)

    artificial = range(tab.artificial_start, tab.ncols)
    if len(artificial):
        phase1 = [Fraction(0)] * tab.ncols
        for a in artificial:
            phase1[a] = Fraction(-1)
        tab.price(phase1)
        tab.run()
        if any(tab.x[a] for a in artificial):
            return BasicLpSolution(INFEASIBLE)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.basis):
            b = tab.basis[r]
            if b < tab.artificial_start:
                r += 1
                continue
            cols = [k for k in range(tab.artificial_start) if tab.T[r][k] and tab.status[k] != _BASIC]
            if cols:
                left = tab.pivot(r, cols[0])
                tab.status[left] = _LOWER
                r += 1
            else:
                del tab.T[r]
                del tab.basis[r]
                tab.status[b] = _LOWER
        for a in artificial:
            tab.up[a] = Fraction(0)
            tab.x[a] = Fraction(0)

    cost = list(lp.objective) + [Fraction(0)] * (tab.ncols - lp.n)
    tab.price(cost)
    status = tab.run()
    if status == UNBOUNDED:
        return BasicLpSolution(UNBOUNDED)

    _certify(tab, lp)
    values = tuple(tab.x[j] + tab.lo[j] for j in range(lp.n))
    slacks = []
    for row in lp.rows:
        act = sum((a * v for a, v in zip(row.coeffs, values) if a), Fraction(0))
        slacks.append(abs(row.rhs - act))
    objective = sum((c * v for c, v in zip(lp.objective, values) if c), Fraction(0))
    basis = frozenset(
        j if j < lp.n else ("slack", _slack_row(lp, j))
        for j in tab.basis
    )
    return BasicLpSolution(OPTIMAL, values, objective, basis, tuple(slacks))


def _slack_row(lp: LinearProgram, col: int) -> int:
    k = lp.n
    for r, row in enumerate(lp.rows):
        if row.relation != "=":
            if k == col:
                return r
            k += 1
    raise InvariantError(f"column {col} is not a slack")


def _certify(tab: _Tableau, lp: LinearProgram) -> None:
    """Check primal feasibility and dual sign conditions exactly."""
    for j in range(tab.ncols):
        st = tab.status[j]
        dj = tab.d[j]
        if st == _BASIC:
            if dj:
                raise InvariantError(f"basic column {j} has reduced cost {dj}")
            continue
        fixed = tab.up[j] is not None and tab.up[j] == 0
        if fixed:
            continue
        if st == _LOWER and dj > 0 or st == _UPPER and dj < 0:
            raise InvariantError(f"column {j} violates dual feasibility ({dj})")
    for j in range(tab.ncols):
        v = tab.x[j]
        if v < 0 or tab.up[j] is not None and v > tab.up[j]:
            raise InvariantError(f"column {j} value {v} outside its bounds")
    values = [tab.x[j] + tab.lo[j] for j in range(lp.n)]
    for r, row in enumerate(lp.rows):
        act = sum((a * v for a, v in zip(row.coeffs, values) if a), Fraction(0))
        ok = (
            act <= row.rhs if row.relation == "<="
            else act >= row.rhs if row.relation == ">="
            else act == row.rhs
        )
        if not ok:
            raise InvariantError(f"row {r} violated: {act} {row.relation} {row.rhs}")
