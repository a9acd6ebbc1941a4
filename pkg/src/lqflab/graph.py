"""Interference graphs, induced subgraphs, and maximal-schedule enumeration.

Nodes are 1-based externally (indices 1..|V|); internally they map to bit
positions 0..|V|-1 in adjacency masks.  All functions are pure; the
schedule-matrix cache is the only shared state and inserts are idempotent.
"""

import functools
import itertools
import threading
from dataclasses import dataclass
from typing import Iterator

from . import config
from .errors import GraphParseError, InvalidArgumentError, ResourceLimitError


@dataclass(frozen=True)
class InterferenceGraph:
    """Undirected conflict graph on nodes 1..node_count."""

    node_count: int
    edges: frozenset  # frozenset of (u, v) pairs with u < v

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidArgumentError("node_count must be positive")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise InvalidArgumentError(f"self-loop at node {u}")
            if not (1 <= u <= self.node_count and 1 <= v <= self.node_count):
                raise InvalidArgumentError(f"edge ({u},{v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, node_count, edges):
        return cls(node_count, frozenset(tuple(e) for e in edges))

    def nodes(self):
        return range(1, self.node_count + 1)

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edges


def cycle_graph(n):
    return InterferenceGraph.from_edges(
        n, [(i, i + 1) for i in range(1, n)] + ([(1, n)] if n > 2 else [])
    )


def path_graph(n):
    return InterferenceGraph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n):
    return InterferenceGraph.from_edges(
        n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    )


def pair_bipartite_graph(n_pairs):
    """Complete bipartite graph on n left / n right nodes minus the perfect
    matching between corresponding pairs.  Left nodes are 1..n, right nodes
    n+1..2n; node i pairs with node n+i."""
    edges = [
        (i, n_pairs + j)
        for i in range(1, n_pairs + 1)
        for j in range(1, n_pairs + 1)
        if i != j
    ]
    return InterferenceGraph.from_edges(2 * n_pairs, edges)


@functools.lru_cache(maxsize=None)
def adjacency_masks(g: InterferenceGraph):
    """Per-node neighbor bitmasks (bit i-1 represents node i)."""
    masks = [0] * g.node_count
    for u, v in g.edges:
        masks[u - 1] |= 1 << (v - 1)
        masks[v - 1] |= 1 << (u - 1)
    return tuple(masks)


def complement(g: InterferenceGraph) -> InterferenceGraph:
    n = g.node_count
    edges = [
        (u, v)
        for u in range(1, n + 1)
        for v in range(u + 1, n + 1)
        if not g.has_edge(u, v)
    ]
    return InterferenceGraph.from_edges(n, edges)


def _check_nodes(g, s):
    for node in s:
        if not (1 <= node <= g.node_count):
            raise InvalidArgumentError(f"node {node} out of range 1..{g.node_count}")


def induced_subgraph(g: InterferenceGraph, s):
    """Subgraph induced by s, plus the sorted node tuple mapping new index
    i+1 back to original node node_map[i]."""
    members = sorted(set(s))
    if not members:
        raise InvalidArgumentError("induced subgraph of empty set")
    _check_nodes(g, members)
    index = {node: i + 1 for i, node in enumerate(members)}
    edges = [
        (index[u], index[v]) for u, v in g.edges if u in index and v in index
    ]
    return InterferenceGraph.from_edges(len(members), edges), tuple(members)


def is_independent(g: InterferenceGraph, s) -> bool:
    members = set(s)
    _check_nodes(g, members)
    return not any(u in members and v in members for u, v in g.edges)


@dataclass(frozen=True)
class ScheduleMatrix:
    """All maximal schedules of the subgraph induced by `subject`.

    Each column is a 0/1 tuple aligned with the sorted `subject` tuple.
    Columns are in lexicographic order of their active-node index lists.
    """

    subject: tuple
    columns: tuple

    def supports(self):
        """Active original-node index tuples, one per column."""
        return tuple(
            tuple(n for n, bit in zip(self.subject, col) if bit)
            for col in self.columns
        )

    @property
    def size(self):
        return len(self.subject)


def _bron_kerbosch_pivot(adj, all_mask):
    """Yield bitmasks of all maximal cliques (pivoting Bron-Kerbosch)."""
    out = []

    def recurse(r, p, x):
        if p == 0 and x == 0:
            out.append(r)
            return
        # Pivot: vertex of p|x with most neighbors in p.
        px = p | x
        best, best_count = -1, -1
        probe = px
        while probe:
            v = (probe & -probe).bit_length() - 1
            probe &= probe - 1
            count = bin(p & adj[v]).count("1")
            if count > best_count:
                best, best_count = v, count
        candidates = p & ~adj[best]
        while candidates:
            v_bit = candidates & -candidates
            v = v_bit.bit_length() - 1
            candidates &= candidates - 1
            recurse(r | v_bit, p & adj[v], x & adj[v])
            p &= ~v_bit
            x |= v_bit

    recurse(0, all_mask, 0)
    return out


def _mask_to_nodes(mask):
    nodes = []
    while mask:
        bit = mask & -mask
        nodes.append(bit.bit_length())
        mask &= mask - 1
    return tuple(nodes)


def enumerate_maximal_cliques(g: InterferenceGraph, limit=None):
    """All maximal cliques as sorted node tuples, lexicographically ordered."""
    cap = config.max_nodes(limit)
    if g.node_count > cap:
        raise ResourceLimitError(
            f"graph has {g.node_count} nodes, above the enumeration limit {cap}"
            " (LQFLAB_MAX_NODES)",
            "max_nodes",
            cap,
        )
    masks = adjacency_masks(g)
    all_mask = (1 << g.node_count) - 1
    cliques = [_mask_to_nodes(m) for m in _bron_kerbosch_pivot(masks, all_mask)]
    return sorted(cliques)


def enumerate_maximal_schedules(g: InterferenceGraph, limit=None) -> ScheduleMatrix:
    """All maximal independent sets of g (maximal cliques of the complement)."""
    supports = enumerate_maximal_cliques(complement(g), limit=limit)
    subject = tuple(g.nodes())
    columns = tuple(
        tuple(1 if n in set(sup) else 0 for n in subject) for sup in supports
    )
    return ScheduleMatrix(subject, columns)


_matrix_cache = {}
_matrix_lock = threading.Lock()


def schedule_matrix(g: InterferenceGraph, subset=None, limit=None) -> ScheduleMatrix:
    """Maximal schedules of the subgraph induced by subset (default: all of V),
    with columns indexed by original node numbers.  Results are cached."""
    if subset is None:
        members = tuple(g.nodes())
    else:
        members = tuple(sorted(set(subset)))
        if not members:
            raise InvalidArgumentError("schedule matrix of empty subset")
        _check_nodes(g, members)
    key = (g, members)
    cached = _matrix_cache.get(key)
    if cached is not None:
        return cached
    if len(members) == g.node_count:
        mat = enumerate_maximal_schedules(g, limit=limit)
    else:
        sub, node_map = induced_subgraph(g, members)
        local = enumerate_maximal_schedules(sub, limit=limit)
        # Map supports back to original node numbers; recanonicalize order.
        supports = sorted(
            tuple(node_map[n - 1] for n in sup) for sup in local.supports()
        )
        columns = tuple(
            tuple(1 if n in set(sup) else 0 for n in members) for sup in supports
        )
        mat = ScheduleMatrix(members, columns)
    with _matrix_lock:
        _matrix_cache.setdefault(key, mat)
    return _matrix_cache[key]


def nonempty_subsets(g: InterferenceGraph, limit=None) -> Iterator:
    """Every non-empty subset of V, in size-then-lexicographic order."""
    cap = config.max_subset_nodes(limit)
    if g.node_count > cap:
        raise ResourceLimitError(
            f"graph has {g.node_count} nodes, above the subset-sweep limit {cap}"
            " (LQFLAB_MAX_SUBSET_NODES)",
            "max_subset_nodes",
            cap,
        )
    nodes = list(g.nodes())
    for size in range(1, len(nodes) + 1):
        for combo in itertools.combinations(nodes, size):
            yield frozenset(combo)


def parse_graph(text: str) -> InterferenceGraph:
    """Parse the graph text format: 'n <count>' then 'e <u> <v>' lines.

    '#' starts a comment; blank lines are ignored."""
    node_count = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if node_count is not None:
                raise GraphParseError("duplicate 'n' line", lineno)
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphParseError(f"bad node-count line {raw!r}", lineno)
            node_count = int(parts[1])
        elif parts[0] == "e":
            if node_count is None:
                raise GraphParseError("'e' line before 'n' line", lineno)
            if len(parts) != 3:
                raise GraphParseError(f"bad edge line {raw!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphParseError(f"bad edge line {raw!r}", lineno) from None
            edges.append((u, v))
        else:
            raise GraphParseError(f"unknown directive {parts[0]!r}", lineno)
    if node_count is None:
        raise GraphParseError("missing 'n' line")
    try:
        return InterferenceGraph.from_edges(node_count, edges)
    except InvalidArgumentError as exc:
        raise GraphParseError(str(exc)) from exc


def format_graph(g: InterferenceGraph) -> str:
    lines = [f"n {g.node_count}"]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def load_graph(path) -> InterferenceGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())
