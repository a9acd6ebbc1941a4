"""Set, link, and overall sigma-local pooling factors, and membership in the
diagonally scaled capacity region.

The bilinear program defining the set factor (min sigma with sigma*mu >= nu
over the schedule hull) is linearized by the substitution t = sigma * alpha,
giving: min e't  s.t.  M t - M b >= 0, e'b = 1, t >= 0, b >= 0.  The
reformulation is cross-validated in the test suite against the duality-ratio
characterization and against brute-force search over hull mixing weights.
"""

import threading
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
    solve_lp,
)
from .graph import InterferenceGraph, nonempty_subsets, schedule_matrix
from .oracles import RateVector, chi_f, in_capacity_region, phi_f

WHOLE_GRAPH = "graph"


@dataclass(frozen=True)
class PoolingFactor:
    """A sigma-local pooling factor in (0, 1] with its dominating-pair
    witness (present exactly when the factor is below 1)."""

    subject: object  # frozenset (set factor), int (link), or WHOLE_GRAPH
    value: Q
    witness_mu: Optional[tuple] = None
    witness_nu: Optional[tuple] = None
    minimizing_set: Optional[frozenset] = None


_sigma_cache = {}
_sigma_lock = threading.Lock()


def sigma_set(g: InterferenceGraph, s) -> PoolingFactor:
    """Set sigma-local pooling factor for s, with exact witness when < 1."""
    members = frozenset(s)
    if not members:
        raise InvalidArgumentError("sigma_set of empty set")
    key = (g, members)
    cached = _sigma_cache.get(key)
    if cached is not None:
        return cached
    mat = schedule_matrix(g, members)
    ncols = len(mat.columns)
    size = mat.size
    # Variables: t_0..t_{ncols-1}, b_0..b_{ncols-1}.
    rows = []
    for i in range(size):
        rows.append(
            [Q(col[i]) for col in mat.columns]
            + [-Q(col[i]) for col in mat.columns]
        )
    rows.append([ZERO] * ncols + [ONE] * ncols)
    problem = LPProblem(
        sense=MIN,
        c=[ONE] * ncols + [ZERO] * ncols,
        A=rows,
        rel=[GE] * size + [EQ],
        b=[ZERO] * size + [ONE],
    )
    result = solve_lp(problem)
    assert result.status == OPTIMAL
    sigma = result.value
    mu = nu = None
    if sigma < 1:
        t = result.x[:ncols]
        beta = result.x[ncols:]
        mu = tuple(
            sum((col[i] * tj for col, tj in zip(mat.columns, t)), ZERO) / sigma
            for i in range(size)
        )
        nu = tuple(
            sum((col[i] * bj for col, bj in zip(mat.columns, beta)), ZERO)
            for i in range(size)
        )
    factor = PoolingFactor(members, sigma, mu, nu)
    with _sigma_lock:
        _sigma_cache.setdefault(key, factor)
    return _sigma_cache[key]


def sigma_link(g: InterferenceGraph, link, limit=None) -> PoolingFactor:
    """Link factor: exhaustive minimum of sigma_set over all subsets
    containing the link, recording the lexicographically smallest minimizer."""
    if not (1 <= link <= g.node_count):
        raise InvalidArgumentError(f"link {link} out of range")
    best = None
    best_set = None
    for subset in nonempty_subsets(g, limit=limit):
        if link not in subset:
            continue
        factor = sigma_set(g, subset)
        if best is None or factor.value < best.value:
            best = factor
            best_set = subset
    return PoolingFactor(
        link, best.value, best.witness_mu, best.witness_nu, minimizing_set=best_set
    )


def sigma_graph(g: InterferenceGraph, limit=None) -> PoolingFactor:
    """Overall factor: minimum of the link factors."""
    best = None
    for link in g.nodes():
        factor = sigma_link(g, link, limit=limit)
        if best is None or factor.value < best.value:
            best = factor
    return PoolingFactor(
        WHOLE_GRAPH,
        best.value,
        best.witness_mu,
        best.witness_nu,
        minimizing_set=best.minimizing_set,
    )


def in_sigma_scaled_capacity(g: InterferenceGraph, lam: RateVector, limit=None) -> bool:
    """Membership in the diagonally scaled capacity region: true iff some
    mu in Co(M_V) satisfies lam_l <= sigma*_l * mu_l for every link.

    Division-free, so links with zero rate and factor 1 need no special case."""
    factors = [sigma_link(g, link, limit=limit).value for link in g.nodes()]
    mat = schedule_matrix(g)
    ncols = len(mat.columns)
    rates = [lam.get(n) for n in mat.subject]
    rows = []
    for i in range(mat.size):
        rows.append([factors[i] * col[i] for col in mat.columns])
    rows.append([ONE] * ncols)
    problem = LPProblem(
        sense=MAX,
        c=[ZERO] * ncols,
        A=rows,
        rel=[GE] * mat.size + [EQ],
        b=rates + [ONE],
    )
    return solve_lp(problem).status == OPTIMAL


def duality_ratio(g: InterferenceGraph, s, lam: RateVector) -> Optional[Q]:
    """chi_f(G_S, lam) / phi_f(G_S, lam); None means +infinity (phi_f = 0)."""
    members = frozenset(s)
    if not members:
        raise InvalidArgumentError("duality_ratio of empty set")
    chi = chi_f(g, lam, subset=members).value
    phi = phi_f(g, lam, subset=members).value
    if phi == 0:
        return None
    return chi / phi


def sigma_summary(g: InterferenceGraph, limit=None) -> dict:
    """Per-link factors, the overall factor, and the minimizing sets, with
    rationals rendered as strings (the `sigma` CLI payload)."""
    per_link = {}
    minimizing = {}
    for link in g.nodes():
        factor = sigma_link(g, link, limit=limit)
        per_link[str(link)] = str(factor.value)
        minimizing[str(link)] = sorted(factor.minimizing_set)
    overall = sigma_graph(g, limit=limit)
    return {
        "per_link": per_link,
        "overall": str(overall.value),
        "minimizing_sets": minimizing,
    }
