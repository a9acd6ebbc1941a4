"""LP oracles over schedule matrices: weighted fractional coloring,
matching, and domination numbers, plus capacity-region membership.

tau_f reports value None for the infeasible case (the -infinity convention).
All comparisons against 0 and 1 are exact rational comparisons; the closed
regions (capacity region) and open ones (its interior) differ precisely at
those boundaries.
"""

from dataclasses import dataclass
from typing import Optional

from .errors import InvalidArgumentError
from .exactla import (
    EQ,
    GE,
    LE,
    MAX,
    MIN,
    ONE,
    OPTIMAL,
    ZERO,
    LPProblem,
    Q,
    rational,
    solve_lp,
)
from .graph import InterferenceGraph, is_independent, schedule_matrix

CHI_F = "chi_f"
PHI_F = "phi_f"
TAU_F = "tau_f"


@dataclass(frozen=True)
class RateVector:
    """Nonnegative rational rates indexed by an explicit node tuple."""

    nodes: tuple
    values: tuple

    def __post_init__(self):
        vals = tuple(rational(v) for v in self.values)
        if len(vals) != len(self.nodes):
            raise InvalidArgumentError("rate/node length mismatch")
        if any(v < 0 for v in vals):
            raise InvalidArgumentError("rates must be nonnegative")
        if list(self.nodes) != sorted(set(self.nodes)):
            raise InvalidArgumentError("nodes must be sorted and distinct")
        object.__setattr__(self, "values", vals)

    @classmethod
    def for_graph(cls, g: InterferenceGraph, values):
        return cls(tuple(g.nodes()), tuple(values))

    @classmethod
    def uniform(cls, g: InterferenceGraph, rate):
        return cls(tuple(g.nodes()), (rational(rate),) * g.node_count)

    @classmethod
    def zero(cls, g: InterferenceGraph):
        return cls.uniform(g, 0)

    def get(self, node) -> Q:
        try:
            return self.values[self.nodes.index(node)]
        except ValueError:
            raise InvalidArgumentError(f"node {node} not in rate vector") from None

    def scale(self, k) -> "RateVector":
        k = rational(k)
        return RateVector(self.nodes, tuple(k * v for v in self.values))

    def shift(self, eps) -> "RateVector":
        eps = rational(eps)
        return RateVector(self.nodes, tuple(v + eps for v in self.values))

    def le(self, other) -> bool:
        return self.nodes == other.nodes and all(
            a <= b for a, b in zip(self.values, other.values)
        )

    def lt(self, other) -> bool:
        return self.nodes == other.nodes and all(
            a < b for a, b in zip(self.values, other.values)
        )


def restrict(lam: RateVector, s) -> RateVector:
    """[lambda]_S, keeping original node indices."""
    members = sorted(set(s))
    if not members:
        raise InvalidArgumentError("restriction to empty set")
    return RateVector(tuple(members), tuple(lam.get(n) for n in members))


@dataclass(frozen=True)
class OracleValue:
    """Optimal value of one of the three LPs, with the certifying solution.

    value None means -infinity (tau_f infeasible)."""

    kind: str
    value: Optional[Q]
    witness: dict

    @property
    def is_neg_inf(self):
        return self.value is None


def _aligned_rates(g, lam, subset):
    """Schedule matrix plus the rate list aligned with its subject order."""
    mat = schedule_matrix(g, subset)
    if set(mat.subject) != set(lam.nodes):
        lam = restrict(lam, mat.subject)
    return mat, [lam.get(n) for n in mat.subject]


def chi_f(g: InterferenceGraph, lam: RateVector, subset=None) -> OracleValue:
    """Weighted fractional chromatic number: min e'a, M a >= lam, a >= 0."""
    mat, rates = _aligned_rates(g, lam, subset)
    ncols = len(mat.columns)
    problem = LPProblem(
        sense=MIN,
        c=[ONE] * ncols,
        A=[[Q(col[i]) for col in mat.columns] for i in range(mat.size)],
        rel=[GE] * mat.size,
        b=rates,
        free=None,
    )
    result = solve_lp(problem)
    assert result.status == OPTIMAL  # always feasible: scale one schedule
    return OracleValue(CHI_F, result.value, {"alpha": result.x})


def phi_f(g: InterferenceGraph, lam: RateVector, subset=None) -> OracleValue:
    """Weighted fractional matching number: max e'b, M b <= lam, b >= 0."""
    mat, rates = _aligned_rates(g, lam, subset)
    ncols = len(mat.columns)
    problem = LPProblem(
        sense=MAX,
        c=[ONE] * ncols,
        A=[[Q(col[i]) for col in mat.columns] for i in range(mat.size)],
        rel=[LE] * mat.size,
        b=rates,
        free=None,
    )
    result = solve_lp(problem)
    assert result.status == OPTIMAL  # bounded: row sums cap e'b
    return OracleValue(PHI_F, result.value, {"beta": result.x})


def tau_f(g: InterferenceGraph, lam: RateVector, subset=None) -> OracleValue:
    """Weighted fractional domination number: max d with d*e + M b = lam,
    e'b = 1, b >= 0, d sign-free; None (-infinity) when infeasible."""
    mat, rates = _aligned_rates(g, lam, subset)
    ncols = len(mat.columns)
    # Variables: b_0..b_{ncols-1}, then d (free).
    rows = []
    for i in range(mat.size):
        rows.append([Q(col[i]) for col in mat.columns] + [ONE])
    rows.append([ONE] * ncols + [ZERO])
    problem = LPProblem(
        sense=MAX,
        c=[ZERO] * ncols + [ONE],
        A=rows,
        rel=[EQ] * (mat.size + 1),
        b=rates + [ONE],
        free=[False] * ncols + [True],
    )
    result = solve_lp(problem)
    if result.status != OPTIMAL:
        return OracleValue(TAU_F, None, {})
    beta = result.x[:ncols]
    return OracleValue(TAU_F, result.value, {"beta": beta, "d": result.x[ncols]})


def in_capacity_region(g: InterferenceGraph, lam: RateVector) -> bool:
    """lambda in the capacity region iff chi_f(G, lambda) <= 1, exactly."""
    return chi_f(g, lam).value <= 1


def in_capacity_interior(g: InterferenceGraph, lam: RateVector) -> bool:
    """True iff some mu in Co(M_V) strictly dominates lambda in every
    coordinate: max t s.t. M a - t e >= lam, e'a <= 1, a >= 0, t free,
    has optimum t* > 0."""
    mat, rates = _aligned_rates(g, lam, None)
    ncols = len(mat.columns)
    rows = []
    for i in range(mat.size):
        rows.append([Q(col[i]) for col in mat.columns] + [-ONE])
    rows.append([ONE] * ncols + [ZERO])
    problem = LPProblem(
        sense=MAX,
        c=[ZERO] * ncols + [ONE],
        A=rows,
        rel=[GE] * mat.size + [LE],
        b=rates + [ONE],
        free=[False] * ncols + [True],
    )
    result = solve_lp(problem)
    assert result.status == OPTIMAL
    return result.value > 0


def clique_constraints_hold(g: InterferenceGraph, lam: RateVector) -> bool:
    """True iff sum of rates over every maximal clique is at most 1."""
    from .graph import enumerate_maximal_cliques

    for clique in enumerate_maximal_cliques(g):
        if sum((lam.get(n) for n in clique), ZERO) > 1:
            return False
    return True


def is_extreme_point(g: InterferenceGraph, lam: RateVector) -> bool:
    """True iff lambda is a 0/1 vector whose support is independent in g."""
    if any(v not in (ZERO, ONE) for v in lam.values):
        return False
    support = [n for n, v in zip(lam.nodes, lam.values) if v == ONE]
    return is_independent(g, support)
