"""Acceptance suite: one test per shipped guarantee, one PASS/FAIL line each.

Every assertion here is exact rational arithmetic unless the criterion is
itself about floating-point drift heuristics (the simulation one).  The
lines are printed outside pytest's capture so a plain `pytest` run shows
them as they complete.
"""

import time

import pytest
from click.testing import CliRunner

from lqflab import graph, pooling, regions, sim
from lqflab.cli import main as cli_main
from lqflab.exactla import Q, RationalMatrix, rank
from lqflab.graph import schedule_matrix
from lqflab.oracles import (
    RateVector,
    chi_f,
    clique_constraints_hold,
    in_capacity_interior,
    in_capacity_region,
    is_extreme_point,
    phi_f,
)

from conftest import seeded

EPS = Q(1, 1000)
C6 = graph.cycle_graph(6)
LAM1 = RateVector.uniform(C6, Q(7, 10) * (Q(1, 2) - EPS))
LAM2 = RateVector.for_graph(C6, [Q(1, 2) - EPS] + [Q(1, 2) - 2 * EPS] * 5)


@pytest.fixture
def announce(capsys):
    def _announce(num, name, failures):
        status = "PASS" if not failures else "FAIL"
        with capsys.disabled():
            print(f"[criterion {num:02d}] {name}: {status}", flush=True)
        assert not failures, failures

    return _announce


def _rand_vector(rng, g, hi_num, denom):
    return RateVector.for_graph(
        g, [Q(rng.randint(0, hi_num), denom) for _ in g.nodes()]
    )


def test_criterion_01_schedule_catalog(announce, tmp_path):
    failures = []
    start = time.monotonic()
    path = tmp_path / "c6.graph"
    path.write_text(graph.format_graph(C6))
    result = CliRunner().invoke(cli_main, ["mis", "--graph", str(path)])
    expected = ["1 3 5", "1 4", "2 4 6", "2 5", "3 6"]
    if result.exit_code != 0:
        failures.append(f"exit code {result.exit_code}")
    if result.output.splitlines() != expected:
        failures.append(f"catalog {result.output.splitlines()!r}")
    elapsed = time.monotonic() - start
    if elapsed >= 1:
        failures.append(f"took {elapsed:.2f}s, bound is 1s")
    announce(1, "six-cycle schedule catalog", failures)


def test_criterion_02_sigma_local_pooling(announce):
    failures = []
    start = time.monotonic()
    if pooling.sigma_graph(C6).value != Q(2, 3):
        failures.append("sigma_graph(C6) != 2/3")
    for link in C6.nodes():
        if pooling.sigma_link(C6, link).value != Q(2, 3):
            failures.append(f"sigma_link(C6, {link}) != 2/3")
    if time.monotonic() - start >= 30:
        failures.append("C6 exceeded 30s")
    for n in (3, 4, 5):
        start = time.monotonic()
        bip = graph.pair_bipartite_graph(n)
        if pooling.sigma_graph(bip).value != Q(2, n):
            failures.append(f"sigma_graph(bipartite {n}) != 2/{n}")
        if time.monotonic() - start >= 30:
            failures.append(f"bipartite {n} exceeded 30s")
    announce(2, "sigma-local pooling factors", failures)


def test_criterion_03_omega_separation(announce):
    failures = []
    for values in ([1, 0, 1, 0, 1, 0],
                   ["7/10", "1/10", "7/10", "1/10", "7/10", "1/10"]):
        lam = RateVector.for_graph(C6, values)
        if not regions.in_omega(C6, lam).member:
            failures.append(f"{values} not in Omega")
        if regions.in_sigma_lambda(C6, lam).member:
            failures.append(f"{values} wrongly in SigmaLambda")
    example1 = RateVector.for_graph(C6, [Q(5, 12) + Q(1, 24)] + [Q(3, 8)] * 5)
    if not in_capacity_interior(C6, example1):
        failures.append("example-1 vector not in the capacity interior")
    if regions.in_omega(C6, example1).member:
        failures.append("example-1 vector wrongly in Omega")
    announce(3, "Omega separates from SigmaLambda and the interior", failures)


def test_criterion_04_conservative_counterexample_pair(announce):
    failures = []
    if not regions.in_delta_c(C6, LAM2).member:
        failures.append("lam2 not in DeltaC")
    if regions.in_delta_c(C6, LAM1).member:
        failures.append("lam1 wrongly in DeltaC")
    # The smaller vector is the one that fails: lam1 < lam2 componentwise.
    if not LAM1.lt(LAM2):
        failures.append("lam1 < lam2 does not hold componentwise")
    if not LAM1.le(LAM2):
        failures.append("lam1 <= lam2 does not hold componentwise")
    announce(4, "DeltaC counterexample pair", failures)


def test_criterion_05_rank_condition(announce):
    failures = []
    full = regions.rank_report(C6, frozenset(C6.nodes()))
    if full.rank != 4 or full.high_rank:
        failures.append(f"C6 extended rank {full.rank}")
    mat = schedule_matrix(C6)
    rows = [
        [col[i] for col in mat.columns] + [1] for i in range(mat.size)
    ]
    if rank(RationalMatrix.from_rows(rows)) != 4:
        failures.append("direct extended-matrix rank != 4")
    for g in (C6, graph.complete_graph(2), graph.path_graph(5)):
        for node in g.nodes():
            report = regions.rank_report(g, {node})
            if report.rank != 1 or not report.high_rank:
                failures.append(f"singleton {node} not high rank")
    k2 = graph.complete_graph(2)
    report = regions.rank_report(k2, {1, 2})
    if report.rank != 2 or not report.high_rank:
        failures.append("K2 not high rank")
    announce(5, "extended schedule-matrix ranks", failures)


def test_criterion_06_delta_r_equals_interior_on_c6(announce):
    failures = []
    start = time.monotonic()
    rng = seeded(600)
    for trial in range(1000):
        lam = _rand_vector(rng, C6, 10, 16)
        in_dr = regions.in_delta_r(C6, lam).member
        in_int = in_capacity_interior(C6, lam)
        if in_dr != in_int:
            failures.append(f"trial {trial}: delta_r {in_dr}, interior {in_int}")
            break
    elapsed = time.monotonic() - start
    if elapsed >= 300:
        failures.append(f"took {elapsed:.1f}s, bound is 300s")
    announce(6, "DeltaR equals the capacity interior on C6", failures)


def test_criterion_07_pentagon_clique_gap(announce):
    failures = []
    c5 = graph.cycle_graph(5)
    half = RateVector.uniform(c5, Q(1, 2))
    if not clique_constraints_hold(c5, half):
        failures.append("pentagon half-vector fails clique constraints")
    if chi_f(c5, half).value != Q(5, 4):
        failures.append("chi_f(C5, e/2) != 5/4")
    if in_capacity_region(c5, half):
        failures.append("pentagon half-vector wrongly inside the region")
    rng = seeded(700)
    checked = 0
    while checked < 500:
        g = graph.path_graph(rng.randint(2, 8))
        lam = _rand_vector(rng, g, 10, 8)
        if clique_constraints_hold(g, lam) != in_capacity_region(g, lam):
            failures.append(f"tree equivalence failed at {lam.values}")
            break
        checked += 1
    announce(7, "clique constraints: exact on trees, gap on C5", failures)


def test_criterion_08_duality_ratio_theorem(announce):
    failures = []
    rng = seeded(800)
    for g in (C6, graph.complete_graph(3), graph.path_graph(5)):
        for s in graph.nonempty_subsets(g):
            factor = pooling.sigma_set(g, s)
            members = tuple(sorted(s))
            for _ in range(100):
                lam = RateVector(
                    members, tuple(Q(rng.randint(0, 12), 8) for _ in members)
                )
                ratio = pooling.duality_ratio(g, s, lam)
                if ratio is not None and factor.value > ratio:
                    failures.append(f"bound violated on {members} at {lam.values}")
            if factor.witness_nu is not None:
                attained = pooling.duality_ratio(
                    g, s, RateVector(members, factor.witness_nu)
                )
            else:
                col = schedule_matrix(g, s).columns[0]
                attained = pooling.duality_ratio(
                    g, s, RateVector(members, tuple(Q(x) for x in col))
                )
            if attained != factor.value:
                failures.append(f"equality not attained on {members}")
            if failures:
                break
        if failures:
            break
    announce(8, "duality-ratio characterization of sigma factors", failures)


def test_criterion_09_scaling_lemma(announce):
    failures = []
    rng = seeded(900)
    pool = [
        graph.path_graph(4),
        graph.path_graph(8),
        graph.cycle_graph(5),
        graph.cycle_graph(6),
        graph.cycle_graph(7),
        graph.complete_graph(3),
        graph.pair_bipartite_graph(3),
    ]
    for trial in range(200):
        g = rng.choice(pool)
        lam = _rand_vector(rng, g, 12, 8)
        k = Q(rng.randint(0, 10), rng.randint(1, 6))
        if chi_f(g, lam.scale(k)).value != k * chi_f(g, lam).value:
            failures.append(f"chi scaling failed, trial {trial}")
            break
        if phi_f(g, lam.scale(k)).value != k * phi_f(g, lam).value:
            failures.append(f"phi scaling failed, trial {trial}")
            break
    announce(9, "scaling lemma for chi_f and phi_f", failures)


def test_criterion_10_simulation_corroboration(announce):
    """Constant arrivals, horizon 1e6, lexicographic plus 5 random-tie seeds.

    All runs start from the same staggered backlog configuration in which
    the six queues form a uniformly dominated longest set (an empty start
    falls straight into the efficient two-schedule alternation and neither
    vector ever leaves it, so the start state is part of the experiment).
    The conservative-region vector must recover from it in every run; the
    dominated vector must diverge in every run.  Bernoulli arrivals at the
    dominated vector must look stable in at least 4 of 5 seeds.
    """
    failures = []
    start = time.monotonic()
    horizon = 10**6
    a1 = LAM1.values[0]
    start_state = [10 + a1, 10 + 3 * a1, 10 + 2 * a1,
                   10 + a1, 10 + 3 * a1, 10 + 2 * a1]
    breakers = [sim.TieBreaker(sim.LEXICOGRAPHIC)] + [
        sim.TieBreaker(sim.UNIFORM_RANDOM, s) for s in range(5)
    ]
    for tb in breakers:
        trace = sim.run(C6, LAM1, sim.CONSTANT, tb, horizon,
                        initial_backlog=start_state)
        if trace.verdict != sim.UNSTABLE:
            failures.append(f"lam1 constant {tb.kind}/{tb.seed}: {trace.verdict}")
        trace = sim.run(C6, LAM2, sim.CONSTANT, tb, horizon,
                        initial_backlog=start_state)
        if trace.verdict != sim.STABLE:
            failures.append(f"lam2 constant {tb.kind}/{tb.seed}: {trace.verdict}")
    stable_count = 0
    for seed in range(5):
        trace = sim.run(C6, LAM1, sim.BERNOULLI,
                        sim.TieBreaker(sim.UNIFORM_RANDOM, seed), horizon,
                        seed=seed, initial_backlog=start_state)
        if trace.verdict == sim.STABLE:
            stable_count += 1
    if stable_count < 4:
        failures.append(f"bernoulli lam1 stable in only {stable_count}/5 seeds")
    elapsed = time.monotonic() - start
    if elapsed >= 600:
        failures.append(f"took {elapsed:.0f}s, bound is 600s")
    announce(10, "simulation corroboration of the stability split", failures)


def test_criterion_11_inclusion_lattice(announce):
    failures = []
    rng = seeded(1100)
    test_graphs = [
        graph.complete_graph(2),
        graph.complete_graph(3),
        graph.path_graph(5),
        graph.cycle_graph(5),
        C6,
        graph.pair_bipartite_graph(3),
    ]
    for g in test_graphs:
        for trial in range(1000):
            lam = _rand_vector(rng, g, 12, 8)
            in_lambda = regions.in_lambda(g, lam).member
            in_dc = regions.in_delta_c(g, lam).member
            in_sl = regions.in_sigma_lambda(g, lam).member
            extreme = is_extreme_point(g, lam)
            in_omega = None
            if in_sl or extreme or not in_lambda:
                in_omega = regions.in_omega(g, lam).member
            if in_sl and not in_omega:
                failures.append(f"{g.node_count}n trial {trial}: SigmaLambda outside Omega")
            if extreme and not in_omega:
                failures.append(f"{g.node_count}n trial {trial}: extreme point outside Omega")
            if in_omega and not in_lambda:
                failures.append(f"{g.node_count}n trial {trial}: Omega outside Lambda")
            if in_dc or not in_lambda:
                in_dr = regions.in_delta_r(g, lam).member
                if in_dc and not in_dr:
                    failures.append(f"{g.node_count}n trial {trial}: DeltaC outside DeltaR")
                if in_dr and not in_lambda:
                    failures.append(f"{g.node_count}n trial {trial}: DeltaR outside Lambda")
            if in_dc and not in_lambda:
                failures.append(f"{g.node_count}n trial {trial}: DeltaC outside Lambda")
            if failures:
                break
        if failures:
            break
    announce(11, "region inclusion lattice on sampled vectors", failures)
