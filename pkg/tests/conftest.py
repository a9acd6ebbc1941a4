"""Shared fixtures and independent cross-check helpers.

The helpers here deliberately avoid the package's own linear algebra: ranks
are recomputed with Fraction-based Gaussian elimination and small LPs are
solved by brute-force enumeration of candidate vertices, so the exact
solvers are validated against independent arithmetic.
"""

import itertools
import random
from fractions import Fraction

import pytest

from lqflab import graph
from lqflab.exactla import Q
from lqflab.oracles import RateVector


@pytest.fixture
def c6():
    return graph.cycle_graph(6)


@pytest.fixture
def c5():
    return graph.cycle_graph(5)


@pytest.fixture
def k2():
    return graph.complete_graph(2)


@pytest.fixture
def k3():
    return graph.complete_graph(3)


@pytest.fixture
def path3():
    return graph.path_graph(3)


@pytest.fixture
def path5():
    return graph.path_graph(5)


def rand_q(rng, lo_num, hi_num, denom):
    """Uniform rational in [lo_num/denom, hi_num/denom]."""
    return Q(rng.randint(lo_num, hi_num), denom)


def random_rates(rng, g, hi_num=12, denom=8):
    """Random nonnegative rate vector with components in [0, hi_num/denom]."""
    return RateVector.for_graph(
        g, [rand_q(rng, 0, hi_num, denom) for _ in g.nodes()]
    )


def fraction_rank(rows):
    """Row-reduction rank over Fraction, independent of the Bareiss path."""
    work = [[Fraction(int(x.numerator), int(x.denominator)) for x in row]
            for row in rows]
    rank = 0
    ncols = len(work[0]) if work else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        prow = work[rank]
        inv = 1 / prow[col]
        work[rank] = prow = [x * inv for x in prow]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                factor = work[i][col]
                work[i] = [a - factor * b for a, b in zip(work[i], prow)]
        rank += 1
    return rank


def brute_force_min_lp(c, A, b):
    """Minimize c'x over {A x <= b, x >= 0} by enumerating basis vertices.

    Returns (value, x) with Fraction arithmetic, or None when infeasible.
    Only suitable for tiny instances; used as an oracle for solve_lp.
    """
    n = len(c)
    # Full constraint list: A x <= b rows plus x_j >= 0 as -x_j <= 0.
    rows = [list(row) for row in A] + [
        [-1 if j == i else 0 for j in range(n)] for i in range(n)
    ]
    rhs = list(b) + [0] * n
    rows = [[Fraction(x) for x in row] for row in rows]
    rhs = [Fraction(x) for x in rhs]
    cf = [Fraction(x) for x in c]

    def feasible(x):
        return all(
            sum(a * xi for a, xi in zip(row, x)) <= r
            for row, r in zip(rows, rhs)
        )

    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        # Solve the n x n equality system of the chosen active constraints.
        mat = [rows[i][:] + [rhs[i]] for i in combo]
        x = _solve_square(mat, n)
        if x is None or not feasible(x):
            continue
        val = sum(ci * xi for ci, xi in zip(cf, x))
        if best is None or val < best[0]:
            best = (val, x)
    return best


def _solve_square(mat, n):
    for col in range(n):
        pivot = next((i for i in range(col, n) if mat[i][col]), None)
        if pivot is None:
            return None
        mat[col], mat[pivot] = mat[pivot], mat[col]
        prow = mat[col]
        inv = 1 / prow[col]
        mat[col] = prow = [x * inv for x in prow]
        for i in range(n):
            if i != col and mat[i][col]:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], prow)]
    return [mat[i][n] for i in range(n)]


def brute_force_mis(g):
    """All maximal independent sets by subset enumeration (tiny graphs)."""
    nodes = list(g.nodes())
    independents = set()
    for size in range(len(nodes) + 1):
        for combo in itertools.combinations(nodes, size):
            if graph.is_independent(g, combo):
                independents.add(frozenset(combo))
    maximal = [
        s for s in independents
        if not any(s < t for t in independents)
    ]
    return sorted(tuple(sorted(s)) for s in maximal if s)


def seeded(seed):
    return random.Random(seed)
