"""Membership deciders for the LQF stability regions and the rank condition.

Region tags: Lambda (capacity region), LambdaInterior, SigmaLambda (diagonal
scaling of Lambda), Omega (no strictly dominated subset), DeltaC (no
uniformly dominated subset), DeltaR (no uniformly dominated high-rank
subset).  Violating subsets are searched in size-then-lexicographic order,
so the reported witness is deterministic.
"""

import threading
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidArgumentError
from .exactla import (
    EQ,
    LE,
    MAX,
    ONE,
    OPTIMAL,
    ZERO,
    LPProblem,
    Q,
    RationalMatrix,
    rank,
    solve_lp,
)
from .graph import InterferenceGraph, nonempty_subsets, schedule_matrix
from .oracles import (
    RateVector,
    chi_f,
    in_capacity_interior,
    in_capacity_region,
    phi_f,
    restrict,
    tau_f,
)
from .pooling import in_sigma_scaled_capacity

LAMBDA = "Lambda"
LAMBDA_INTERIOR = "LambdaInterior"
SIGMA_LAMBDA = "SigmaLambda"
OMEGA = "Omega"
DELTA_C = "DeltaC"
DELTA_R = "DeltaR"

REGION_TAGS = (LAMBDA, LAMBDA_INTERIOR, SIGMA_LAMBDA, OMEGA, DELTA_C, DELTA_R)


@dataclass(frozen=True)
class RegionVerdict:
    region: str
    member: bool
    witness_set: Optional[frozenset] = None
    witness_vector: Optional[dict] = None


@dataclass(frozen=True)
class RankReport:
    subject: frozenset
    rank: int
    high_rank: bool


@dataclass(frozen=True)
class PiVerdict:
    member: bool
    margin: Optional[Q] = None  # optimal uniform slack t*
    nu: Optional[tuple] = None  # dominated hull point, aligned with sorted s


def in_pi(g: InterferenceGraph, s, lam: RateVector) -> PiVerdict:
    """Strict domination of s: true iff [lam]_S > nu for some nu in Co(M_S).

    The empty set is never strictly dominated (Pi of the empty set is empty),
    so s = {} returns a non-member verdict rather than an error."""
    members = frozenset(s)
    if not members:
        return PiVerdict(False)
    mat = schedule_matrix(g, members)
    rates = [restrict(lam, members).get(n) for n in mat.subject]
    ncols = len(mat.columns)
    # Variables: b_0..b_{ncols-1}, t (free).  max t, M b + t e <= [lam]_S,
    # e'b = 1; member iff t* > 0.
    rows = []
    for i in range(mat.size):
        rows.append([Q(col[i]) for col in mat.columns] + [ONE])
    rows.append([ONE] * ncols + [ZERO])
    problem = LPProblem(
        sense=MAX,
        c=[ZERO] * ncols + [ONE],
        A=rows,
        rel=[LE] * mat.size + [EQ],
        b=rates + [ONE],
        free=[False] * ncols + [True],
    )
    result = solve_lp(problem)
    assert result.status == OPTIMAL  # t can always go negative; bounded above
    beta = result.x[:ncols]
    nu = tuple(
        sum((col[i] * bj for col, bj in zip(mat.columns, beta)), ZERO)
        for i in range(mat.size)
    )
    return PiVerdict(result.value > 0, result.value, nu)


@dataclass(frozen=True)
class GammaVerdict:
    member: bool
    d: Optional[Q] = None
    nu: Optional[tuple] = None


def in_gamma(g: InterferenceGraph, s, lam: RateVector) -> GammaVerdict:
    """Uniform domination of s: true iff tau_f(G_S, [lam]_S) is finite and
    >= 0; the witness is (d, nu) with [lam]_S = nu + d e."""
    members = frozenset(s)
    if not members:
        return GammaVerdict(False)
    tau = tau_f(g, lam, subset=members)
    if tau.is_neg_inf or tau.value < 0:
        return GammaVerdict(False, tau.value)
    mat = schedule_matrix(g, members)
    beta = tau.witness["beta"]
    nu = tuple(
        sum((col[i] * bj for col, bj in zip(mat.columns, beta)), ZERO)
        for i in range(mat.size)
    )
    return GammaVerdict(True, tau.value, nu)


_rank_cache = {}
_rank_lock = threading.Lock()


def rank_report(g: InterferenceGraph, s) -> RankReport:
    """Rank of the extended schedule matrix (M_S, e); high rank iff = |S|."""
    members = frozenset(s)
    if not members:
        raise InvalidArgumentError("rank_report of empty set")
    key = (g, members)
    cached = _rank_cache.get(key)
    if cached is not None:
        return cached
    mat = schedule_matrix(g, members)
    rows = [list(col[i] for col in mat.columns) + [1] for i in range(mat.size)]
    value = rank(RationalMatrix.from_rows(rows))
    report = RankReport(members, value, value == mat.size)
    with _rank_lock:
        _rank_cache.setdefault(key, report)
    return _rank_cache[key]


def in_omega(g: InterferenceGraph, lam: RateVector, limit=None) -> RegionVerdict:
    """Omega membership: phi_f(G_S, [lam]_S) <= 1 for every non-empty S,
    cross-checked against the strict-domination sweep."""
    witness = None
    for subset in nonempty_subsets(g, limit=limit):
        phi = phi_f(g, lam, subset=subset)
        if phi.value > 1:
            witness = (subset, phi)
            break
    member_pi = True
    pi_witness = None
    for subset in nonempty_subsets(g, limit=limit):
        verdict = in_pi(g, subset, lam)
        if verdict.member:
            member_pi = False
            pi_witness = (subset, verdict)
            break
    if (witness is None) != member_pi:  # pragma: no cover - internal invariant
        raise AssertionError("phi_f and Pi_S deciders disagree on Omega")
    if witness is None:
        return RegionVerdict(OMEGA, True)
    subset, phi = witness
    return RegionVerdict(
        OMEGA,
        False,
        witness_set=subset,
        witness_vector={
            "phi_f": phi.value,
            "beta": tuple(phi.witness["beta"]),
            "pi_set": pi_witness[0],
            "pi_nu": pi_witness[1].nu,
        },
    )


def in_delta_c(g: InterferenceGraph, lam: RateVector, limit=None) -> RegionVerdict:
    """DeltaC membership: tau_f(G_S, [lam]_S) < 0 (or -infinity) for all S."""
    for subset in nonempty_subsets(g, limit=limit):
        verdict = in_gamma(g, subset, lam)
        if verdict.member:
            return RegionVerdict(
                DELTA_C,
                False,
                witness_set=subset,
                witness_vector={"d": verdict.d, "nu": verdict.nu},
            )
    return RegionVerdict(DELTA_C, True)


def in_delta_r(g: InterferenceGraph, lam: RateVector, limit=None) -> RegionVerdict:
    """DeltaR membership: no uniformly dominated high-rank subset.  Low-rank
    subsets are skipped: with non-degenerate arrivals their queues separate
    and cannot all stay longest."""
    for subset in nonempty_subsets(g, limit=limit):
        if not rank_report(g, subset).high_rank:
            continue
        verdict = in_gamma(g, subset, lam)
        if verdict.member:
            return RegionVerdict(
                DELTA_R,
                False,
                witness_set=subset,
                witness_vector={"d": verdict.d, "nu": verdict.nu},
            )
    return RegionVerdict(DELTA_R, True)


def in_lambda(g: InterferenceGraph, lam: RateVector) -> RegionVerdict:
    chi = chi_f(g, lam)
    if chi.value <= 1:
        return RegionVerdict(LAMBDA, True)
    return RegionVerdict(
        LAMBDA,
        False,
        witness_set=frozenset(g.nodes()),
        witness_vector={"chi_f": chi.value},
    )


def in_lambda_interior(g: InterferenceGraph, lam: RateVector) -> RegionVerdict:
    if in_capacity_interior(g, lam):
        return RegionVerdict(LAMBDA_INTERIOR, True)
    return RegionVerdict(LAMBDA_INTERIOR, False, witness_set=frozenset(g.nodes()))


def in_sigma_lambda(g: InterferenceGraph, lam: RateVector, limit=None) -> RegionVerdict:
    if in_sigma_scaled_capacity(g, lam, limit=limit):
        return RegionVerdict(SIGMA_LAMBDA, True)
    return RegionVerdict(SIGMA_LAMBDA, False, witness_set=frozenset(g.nodes()))


def region_report(g: InterferenceGraph, lam: RateVector, limit=None):
    """All six verdicts, in the fixed tag order."""
    return [
        in_lambda(g, lam),
        in_lambda_interior(g, lam),
        in_sigma_lambda(g, lam, limit=limit),
        in_omega(g, lam, limit=limit),
        in_delta_c(g, lam, limit=limit),
        in_delta_r(g, lam, limit=limit),
    ]


def decide(g: InterferenceGraph, region: str, lam: RateVector, limit=None):
    """Dispatch a single region decision by tag."""
    if region == LAMBDA:
        return in_lambda(g, lam)
    if region == LAMBDA_INTERIOR:
        return in_lambda_interior(g, lam)
    if region == SIGMA_LAMBDA:
        return in_sigma_lambda(g, lam, limit=limit)
    if region == OMEGA:
        return in_omega(g, lam, limit=limit)
    if region == DELTA_C:
        return in_delta_c(g, lam, limit=limit)
    if region == DELTA_R:
        return in_delta_r(g, lam, limit=limit)
    raise InvalidArgumentError(f"unknown region {region!r}")
