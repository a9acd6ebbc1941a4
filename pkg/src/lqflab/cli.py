"""Command-line surface: graph analysis, region membership, and simulation.

All rational outputs are exact 'p/q' strings; --approx adds decimal
annotations next to (never instead of) the exact values.  Reports serialize
as canonical JSON (sorted keys), so identical inputs give byte-identical
output.  Exit codes: 0 success, 2 usage error, 3 input error, 4 resource
limit exceeded.
"""

import csv
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import click

from . import config, graph, oracles, pooling, regions, sim
from .errors import GraphParseError, InvalidArgumentError, ResourceLimitError
from .exactla import Q, parse_rate, rational

VERSION = "0.1.0"

EXIT_INPUT = 3
EXIT_LIMIT = 4

REGION_FLAGS = {
    "lambda": regions.LAMBDA,
    "lambda-o": regions.LAMBDA_INTERIOR,
    "sigma-lambda": regions.SIGMA_LAMBDA,
    "omega": regions.OMEGA,
    "delta-c": regions.DELTA_C,
    "delta-r": regions.DELTA_R,
}


def _canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(obj):
    click.echo(_canonical_json(obj), nl=False)


def _fail(code, message):
    click.echo(_canonical_json({"error": message}), nl=False, err=True)
    sys.exit(code)


def _load_graph(path):
    try:
        return graph.load_graph(path)
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot read graph file: {exc}")
    except GraphParseError as exc:
        _fail(EXIT_INPUT, f"graph parse error: {exc}")


def _parse_rate_vector(g, text):
    """Inline comma-separated rationals in node order."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != g.node_count:
        _fail(
            EXIT_INPUT,
            f"rate vector has {len(parts)} components, graph has"
            f" {g.node_count} nodes",
        )
    try:
        values = [parse_rate(p) for p in parts]
        return oracles.RateVector.for_graph(g, values)
    except InvalidArgumentError as exc:
        _fail(EXIT_INPUT, f"bad rate vector: {exc}")


def _load_rate_file(g, path):
    """Rate-vector file format: '<node_index> <rational>' lines; missing
    nodes default to 0."""
    values = {n: Q(0) for n in g.nodes()}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    _fail(EXIT_INPUT, f"rate file line {lineno}: bad line {raw!r}")
                node = int(parts[0])
                if node not in values:
                    _fail(EXIT_INPUT, f"rate file line {lineno}: node {node} out of range")
                values[node] = parse_rate(parts[1])
    except OSError as exc:
        _fail(EXIT_INPUT, f"cannot read rate file: {exc}")
    except (ValueError, InvalidArgumentError) as exc:
        _fail(EXIT_INPUT, f"bad rate file: {exc}")
    return oracles.RateVector.for_graph(g, [values[n] for n in g.nodes()])


def _rate_vector(g, rate, rate_file):
    if (rate is None) == (rate_file is None):
        _fail(EXIT_INPUT, "exactly one of --rate and --rate-file is required")
    if rate is not None:
        return _parse_rate_vector(g, rate)
    return _load_rate_file(g, rate_file)


def _graph_digest(g):
    return hashlib.sha256(graph.format_graph(g).encode()).hexdigest()


def _verdict_payload(verdict, approx=False):
    payload = {"region": verdict.region, "member": verdict.member}
    if verdict.witness_set is not None:
        payload["witness_set"] = sorted(verdict.witness_set)
    if verdict.witness_vector is not None:
        payload["witness"] = _jsonify(verdict.witness_vector, approx)
    return payload


def _jsonify(obj, approx=False):
    if isinstance(obj, Q):
        return str(obj)
    if isinstance(obj, dict):
        out = {}
        for key, val in obj.items():
            out[str(key)] = _jsonify(val, approx)
            if approx and isinstance(val, Q):
                out[f"{key}_approx"] = float(val)
        return out
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonify(v, approx) for v in items]
    return obj


def _handle_limits(fn):
    try:
        return fn()
    except ResourceLimitError as exc:
        _fail(EXIT_LIMIT, str(exc))
    except InvalidArgumentError as exc:
        _fail(EXIT_INPUT, str(exc))


@click.group()
def main():
    """Exact LQF stability-region toolkit."""


_graph_opt = click.option("--graph", "graph_file", required=True, type=click.Path())
_rate_opt = click.option("--rate", default=None, help="comma-separated rationals")
_rate_file_opt = click.option("--rate-file", default=None, type=click.Path())
_max_nodes_opt = click.option("--max-nodes", default=None, type=int)
_max_subset_opt = click.option("--max-subset-nodes", default=None, type=int)
_approx_opt = click.option("--approx", is_flag=True, default=False)
_jobs_opt = click.option("--jobs", default=None, type=int)


@main.command()
@_graph_opt
@_max_nodes_opt
def mis(graph_file, max_nodes):
    """List all maximal schedules (maximal independent sets)."""
    g = _load_graph(graph_file)
    mat = _handle_limits(
        lambda: graph.enumerate_maximal_schedules(g, limit=config.max_nodes(max_nodes))
    )
    for sup in mat.supports():
        click.echo(" ".join(str(n) for n in sup))


@main.command()
@_graph_opt
@_max_nodes_opt
def cliques(graph_file, max_nodes):
    """List all maximal cliques."""
    g = _load_graph(graph_file)
    result = _handle_limits(
        lambda: graph.enumerate_maximal_cliques(g, limit=config.max_nodes(max_nodes))
    )
    for clique in result:
        click.echo(" ".join(str(n) for n in clique))


def _oracle_command(name, fn):
    @main.command(name=name)
    @_graph_opt
    @_rate_opt
    @_rate_file_opt
    @_approx_opt
    def _cmd(graph_file, rate, rate_file, approx):
        g = _load_graph(graph_file)
        lam = _rate_vector(g, rate, rate_file)
        value = _handle_limits(lambda: fn(g, lam))
        payload = {name: str(value.value) if value.value is not None else "-inf"}
        if approx and value.value is not None:
            payload[f"{name}_approx"] = float(value.value)
        payload["witness"] = _jsonify(value.witness, approx)
        _emit(payload)

    _cmd.__doc__ = f"Compute {name} for the whole graph."
    return _cmd


chi = _oracle_command("chi", oracles.chi_f)
phi = _oracle_command("phi", oracles.phi_f)
tau = _oracle_command("tau", oracles.tau_f)


@main.command()
@_graph_opt
@_max_subset_opt
@_approx_opt
def sigma(graph_file, max_subset_nodes, approx):
    """Per-link and overall sigma-local pooling factors."""
    g = _load_graph(graph_file)
    summary = _handle_limits(
        lambda: pooling.sigma_summary(g, limit=config.max_subset_nodes(max_subset_nodes))
    )
    if approx:
        summary["per_link_approx"] = {
            k: float(Q(v)) for k, v in summary["per_link"].items()
        }
        summary["overall_approx"] = float(Q(summary["overall"]))
    _emit(summary)


@main.command()
@_graph_opt
@click.option("--set", "subset", default=None, help="comma-separated node indices")
def rank(graph_file, subset):
    """Rank of the extended schedule matrix for a node set (default: V)."""
    g = _load_graph(graph_file)
    members = (
        frozenset(g.nodes())
        if subset is None
        else frozenset(int(x) for x in subset.split(","))
    )
    report = _handle_limits(lambda: regions.rank_report(g, members))
    _emit(
        {
            "set": sorted(report.subject),
            "rank": report.rank,
            "high_rank": report.high_rank,
        }
    )


@main.command()
@_graph_opt
@click.option(
    "--region",
    "region_flag",
    required=True,
    type=click.Choice(sorted(REGION_FLAGS) + ["all"]),
)
@_rate_opt
@_rate_file_opt
@_max_subset_opt
@_approx_opt
def member(graph_file, region_flag, rate, rate_file, max_subset_nodes, approx):
    """Decide membership of a rate vector in one (or all) regions."""
    g = _load_graph(graph_file)
    lam = _rate_vector(g, rate, rate_file)
    limit = config.max_subset_nodes(max_subset_nodes)
    if region_flag == "all":
        verdicts = _handle_limits(lambda: regions.region_report(g, lam, limit=limit))
        _emit({"verdicts": [_verdict_payload(v, approx) for v in verdicts]})
    else:
        tag = REGION_FLAGS[region_flag]
        verdict = _handle_limits(lambda: regions.decide(g, tag, lam, limit=limit))
        _emit(_verdict_payload(verdict, approx))


@main.command()
@_graph_opt
@_rate_opt
@_rate_file_opt
@_max_subset_opt
@_approx_opt
@click.option("--simulate", "sim_spec", default=None,
              help="process:tie:horizon:seed, e.g. constant:lexicographic:100000:1")
def report(graph_file, rate, rate_file, max_subset_nodes, approx, sim_spec):
    """Full analysis report: schedules, sigma factors, all region verdicts."""
    g = _load_graph(graph_file)
    lam = _rate_vector(g, rate, rate_file)
    limit = config.max_subset_nodes(max_subset_nodes)

    def build():
        mat = graph.schedule_matrix(g)
        verdicts = regions.region_report(g, lam, limit=limit)
        payload = {
            "tool_version": VERSION,
            "graph_digest": _graph_digest(g),
            "schedule_count": len(mat.columns),
            "sigma": pooling.sigma_summary(g, limit=limit),
            "rate": [str(v) for v in lam.values],
            "verdicts": [_verdict_payload(v, approx) for v in verdicts],
            "config": {
                "max_nodes": config.max_nodes(),
                "max_subset_nodes": limit,
            },
        }
        if sim_spec is not None:
            payload["simulation"] = _run_sim_spec(g, lam, sim_spec)
        return payload

    _emit(_handle_limits(build))


def _run_sim_spec(g, lam, spec):
    try:
        process, tie, horizon, seed = spec.split(":")
        trace = sim.run(
            g,
            lam,
            process,
            sim.TieBreaker(tie, int(seed)),
            int(horizon),
            seed=int(seed),
        )
    except (ValueError, InvalidArgumentError) as exc:
        _fail(EXIT_INPUT, f"bad --simulate spec: {exc}")
    return _trace_summary(trace)


def _trace_summary(trace):
    return {
        "horizon": trace.horizon,
        "verdict": trace.verdict,
        "drift_slope": trace.drift_slope,
        "final_max_backlog": str(Q(max(trace.max_backlog[-1:] or [0]), trace.denominator)),
        "peak_backlog": str(Q(max(trace.max_backlog), trace.denominator)),
        "schedule_catalog": {
            str(i): list(nodes) for i, nodes in trace.catalog.items()
        },
    }


def _sim_one(args):
    graph_text, rate_strs, process, tie_kind, horizon, seed = args
    g = graph.parse_graph(graph_text)
    lam = oracles.RateVector.for_graph(g, [rational(s) for s in rate_strs])
    trace = sim.run(g, lam, process, sim.TieBreaker(tie_kind, seed), horizon, seed=seed)
    return seed, _trace_summary(trace)


@main.command()
@_graph_opt
@_rate_opt
@_rate_file_opt
@click.option("--process", default=sim.CONSTANT,
              type=click.Choice([sim.CONSTANT, sim.BERNOULLI]))
@click.option("--tie", default=sim.LEXICOGRAPHIC,
              type=click.Choice([sim.LEXICOGRAPHIC, sim.UNIFORM_RANDOM]))
@click.option("--horizon", default=100000, type=int)
@click.option("--seeds", default="0", help="comma-separated seeds, one run each")
@click.option("--trace-csv", default=None, type=click.Path(),
              help="write the per-slot trace of the first run as CSV")
@_jobs_opt
def simulate(graph_file, rate, rate_file, process, tie, horizon, seeds, trace_csv, jobs):
    """Run the LQF simulator and print a JSON summary per seed."""
    g = _load_graph(graph_file)
    lam = _rate_vector(g, rate, rate_file)
    try:
        seed_list = [int(s) for s in seeds.split(",")]
    except ValueError:
        _fail(EXIT_INPUT, f"bad --seeds value {seeds!r}")
    njobs = config.jobs(jobs)

    if horizon < 1:
        _fail(EXIT_INPUT, "horizon must be at least 1")

    summaries = {}
    first_trace = None
    if njobs > 1 and len(seed_list) > 1:
        args = [
            (graph.format_graph(g), [str(v) for v in lam.values], process, tie,
             horizon, seed)
            for seed in seed_list
        ]
        with ProcessPoolExecutor(max_workers=njobs) as pool:
            for seed, summary in pool.map(_sim_one, args):
                summaries[str(seed)] = summary
        if trace_csv is not None:
            first_trace = sim.run(
                g, lam, process, sim.TieBreaker(tie, seed_list[0]), horizon,
                seed=seed_list[0],
            )
    else:
        for seed in seed_list:
            trace = sim.run(
                g, lam, process, sim.TieBreaker(tie, seed), horizon, seed=seed
            )
            summaries[str(seed)] = _trace_summary(trace)
            if first_trace is None:
                first_trace = trace

    if trace_csv is not None and first_trace is not None:
        _write_trace_csv(trace_csv, first_trace)
    _emit({"runs": summaries, "horizon": horizon, "process": process, "tie": tie})


def _write_trace_csv(path, trace):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot", "max_backlog", "total_backlog", "schedule_id"])
        for slot in range(trace.horizon):
            writer.writerow(
                [
                    slot,
                    str(Q(trace.max_backlog[slot], trace.denominator)),
                    str(Q(trace.total_backlog[slot], trace.denominator)),
                    trace.schedule_ids[slot],
                ]
            )


@main.command(name="verify-witness", hidden=True)
@_graph_opt
@_rate_opt
@_rate_file_opt
@click.option("--verdict-json", "verdict_file", required=True, type=click.Path())
@_max_subset_opt
def verify_witness(graph_file, rate, rate_file, verdict_file, max_subset_nodes):
    """Re-verify a previously emitted membership verdict and its witness."""
    g = _load_graph(graph_file)
    lam = _rate_vector(g, rate, rate_file)
    limit = config.max_subset_nodes(max_subset_nodes)
    try:
        with open(verdict_file, "r", encoding="utf-8") as fh:
            claimed = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(EXIT_INPUT, f"cannot read verdict JSON: {exc}")

    tag = claimed.get("region")
    if tag not in regions.REGION_TAGS:
        _fail(EXIT_INPUT, f"unknown region tag {tag!r}")
    fresh = _handle_limits(lambda: regions.decide(g, tag, lam, limit=limit))
    ok = fresh.member == claimed.get("member")
    if ok and not fresh.member and "witness_set" in claimed:
        witness_set = frozenset(claimed["witness_set"])
        if tag == regions.OMEGA:
            ok = regions.in_pi(
                g, frozenset(claimed["witness"]["pi_set"]), lam
            ).member
        elif tag in (regions.DELTA_C, regions.DELTA_R):
            ok = regions.in_gamma(g, witness_set, lam).member
    _emit({"verified": bool(ok), "region": tag, "member": fresh.member})
    if not ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
