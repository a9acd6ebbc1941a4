"""Exact rational arithmetic, matrix rank, and an exact-rational LP solver.

Rationals are gmpy2.mpq values (arbitrary precision, always reduced).  The
LP solver is a dense two-phase simplex with Bland's anti-cycling rule, so it
terminates on every input and decides boundary cases (value exactly 0 or 1)
without tolerances.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from gmpy2 import mpq

from .errors import InvalidArgumentError

Q = mpq

ZERO = Q(0)
ONE = Q(1)


def rational(value) -> Q:
    """Parse a rational from 'p/q' or integer text (or pass numbers through).

    Decimal strings are rejected; use parse_rate() where decimals are allowed.
    """
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, int):
        return Q(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise InvalidArgumentError(f"decimal input not accepted here: {value!r}")
        try:
            return Q(text)
        except ValueError as exc:
            raise InvalidArgumentError(f"not a rational: {value!r}") from exc
    raise InvalidArgumentError(f"not a rational: {value!r}")


def parse_rate(value) -> Q:
    """Parse a rational, additionally accepting exact decimals (0.001 -> 1/1000)."""
    if isinstance(value, str) and ("." in value or "e" in value.lower()):
        try:
            frac = Fraction(value.strip())
        except ValueError as exc:
            raise InvalidArgumentError(f"not a rate: {value!r}") from exc
        return Q(frac.numerator, frac.denominator)
    return rational(value)


def rational_str(q) -> str:
    """Serialize as 'p/q', or plain 'p' for integers."""
    return str(q)


@dataclass(frozen=True)
class RationalMatrix:
    """Dense row-major rational matrix."""

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples of Q

    @classmethod
    def from_rows(cls, rows):
        data = tuple(tuple(rational(x) for x in row) for row in rows)
        ncols = len(data[0]) if data else 0
        if any(len(row) != ncols for row in data):
            raise InvalidArgumentError("ragged matrix rows")
        return cls(len(data), ncols, data)

    def transpose(self):
        return RationalMatrix.from_rows(list(zip(*self.entries)) if self.entries else [])

    def row(self, i):
        return self.entries[i]


def rank(matrix: RationalMatrix) -> int:
    """Exact rank via fraction-free (Bareiss) elimination over the integers."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    # Scale each row to integers; row scaling does not change the rank.
    work = []
    for row in matrix.entries:
        denom_lcm = 1
        for x in row:
            d = int(x.denominator)
            denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
        work.append([int(x.numerator) * (denom_lcm // int(x.denominator)) for x in row])
    m, n = matrix.rows, matrix.cols
    r = 0
    prev = 1
    for col in range(n):
        pivot_row = next((i for i in range(r, m) if work[i][col] != 0), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        pivot = work[r][col]
        for i in range(r + 1, m):
            factor = work[i][col]
            for j in range(col, n):
                work[i][j] = (pivot * work[i][j] - factor * work[r][j]) // prev
        prev = pivot
        r += 1
        if r == m:
            break
    return r


LE = "<="
EQ = "="
GE = ">="

MIN = "min"
MAX = "max"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPProblem:
    """min/max c'x subject to A x (rel) b, with x_j >= 0 unless free[j]."""

    sense: str
    c: list
    A: list
    rel: list
    b: list
    free: Optional[list] = None

    def __post_init__(self):
        self.c = [rational(x) for x in self.c]
        self.b = [rational(x) for x in self.b]
        self.A = [[rational(x) for x in row] for row in self.A]
        n = len(self.c)
        m = len(self.b)
        if self.sense not in (MIN, MAX):
            raise InvalidArgumentError(f"bad sense {self.sense!r}")
        if len(self.A) != m or len(self.rel) != m:
            raise InvalidArgumentError("inconsistent row counts")
        if any(len(row) != n for row in self.A):
            raise InvalidArgumentError("inconsistent column counts")
        if any(r not in (LE, EQ, GE) for r in self.rel):
            raise InvalidArgumentError("bad relation symbol")
        if self.free is None:
            self.free = [False] * n
        elif len(self.free) != n:
            raise InvalidArgumentError("free-flag length mismatch")


@dataclass
class LPResult:
    status: str
    value: Optional[Q] = None
    x: Optional[list] = None


def check_feasible(problem: LPProblem, x) -> bool:
    """Exact feasibility check of a candidate solution."""
    if len(x) != len(problem.c):
        return False
    for j, xj in enumerate(x):
        if not problem.free[j] and xj < 0:
            return False
    for row, relation, rhs in zip(problem.A, problem.rel, problem.b):
        lhs = sum((a * xj for a, xj in zip(row, x)), ZERO)
        if relation == LE and lhs > rhs:
            return False
        if relation == GE and lhs < rhs:
            return False
        if relation == EQ and lhs != rhs:
            return False
    return True


def objective_value(problem: LPProblem, x) -> Q:
    return sum((cj * xj for cj, xj in zip(problem.c, x)), ZERO)


def solve_lp(problem: LPProblem) -> LPResult:
    """Two-phase simplex with Bland's rule over exact rationals.

    Deterministic for identical input; the reported solution is re-verified
    against every constraint before return.
    """
    n_orig = len(problem.c)
    minimize = problem.sense == MIN
    base_cost = list(problem.c) if minimize else [-cj for cj in problem.c]

    # Split free variables into positive and negative parts.
    col_map = []  # structural column -> (orig index, sign)
    for j in range(n_orig):
        col_map.append((j, 1))
        if problem.free[j]:
            col_map.append((j, -1))
    n_struct = len(col_map)

    rows = []
    rels = []
    rhs = []
    for arow, relation, bval in zip(problem.A, problem.rel, problem.b):
        row = [arow[j] * sign for j, sign in col_map]
        if bval < 0:
            row = [-x for x in row]
            bval = -bval
            relation = {LE: GE, GE: LE, EQ: EQ}[relation]
        rows.append(row)
        rels.append(relation)
        rhs.append(bval)
    m = len(rows)

    # Add slack / surplus / artificial columns.
    n_slack = sum(1 for r in rels if r in (LE, GE))
    n_art = sum(1 for r in rels if r in (GE, EQ))
    total = n_struct + n_slack + n_art
    art_start = n_struct + n_slack
    tableau = []
    basis = []
    slack_at = n_struct
    art_at = art_start
    for i in range(m):
        row = rows[i] + [ZERO] * (n_slack + n_art) + [rhs[i]]
        if rels[i] == LE:
            row[slack_at] = ONE
            basis.append(slack_at)
            slack_at += 1
        elif rels[i] == GE:
            row[slack_at] = -ONE
            slack_at += 1
            row[art_at] = ONE
            basis.append(art_at)
            art_at += 1
        else:
            row[art_at] = ONE
            basis.append(art_at)
            art_at += 1
        tableau.append(row)

    def run_simplex(cost, banned_from):
        """Optimize; returns 'optimal' or 'unbounded'.  cost has length total."""
        # Reduced-cost row: r_j = c_j - sum_i c_B[i] * T[i][j]
        obj = list(cost) + [ZERO]
        for i, bi in enumerate(basis):
            cb = cost[bi]
            if cb != 0:
                trow = tableau[i]
                for j in range(total + 1):
                    if trow[j] != 0:
                        obj[j] -= cb * trow[j]
        while True:
            enter = next(
                (j for j in range(total) if j < banned_from and obj[j] < 0), None
            )
            if enter is None:
                return OPTIMAL, -obj[total]
            leave = None
            best = None
            for i in range(m):
                coeff = tableau[i][enter]
                if coeff > 0:
                    ratio = tableau[i][total] / coeff
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave is None:
                return UNBOUNDED, None
            _pivot(tableau, obj, basis, leave, enter, total)

    def _pivot(tab, obj, basis_list, leave, enter, width):
        prow = tab[leave]
        pivot = prow[enter]
        if pivot != 1:
            inv = ONE / pivot
            tab[leave] = prow = [x * inv for x in prow]
        for target in tab + [obj]:
            if target is prow:
                continue
            factor = target[enter]
            if factor != 0:
                for j in range(width + 1):
                    if prow[j] != 0:
                        target[j] -= factor * prow[j]
        basis_list[leave] = enter

    # Phase 1: drive artificials to zero.
    if n_art:
        phase1_cost = [ZERO] * art_start + [ONE] * n_art
        status, p1val = run_simplex(phase1_cost, total)
        assert status == OPTIMAL  # phase-1 objective is bounded below by 0
        if p1val != 0:
            return LPResult(INFEASIBLE)
        # Pivot basic artificials out (their value is 0); drop redundant rows.
        for i in range(m):
            if basis[i] >= art_start:
                enter = next(
                    (j for j in range(art_start) if tableau[i][j] != 0), None
                )
                if enter is not None:
                    _pivot(tableau, [ZERO] * (total + 1), basis, i, enter, total)

    # Phase 2.
    phase2_cost = [ZERO] * total
    for col, (j, sign) in enumerate(col_map):
        phase2_cost[col] = base_cost[j] * sign
    status, _ = run_simplex(phase2_cost, art_start)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)

    x = [ZERO] * n_orig
    for i, bi in enumerate(basis):
        if bi < n_struct:
            j, sign = col_map[bi]
            x[j] += sign * tableau[i][total]
    if not check_feasible(problem, x):  # pragma: no cover - internal invariant
        raise AssertionError("simplex returned an infeasible solution")
    return LPResult(OPTIMAL, objective_value(problem, x), x)
