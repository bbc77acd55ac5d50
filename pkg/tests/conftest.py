"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the package's own algorithms: Steiner
optima come from edge-subset enumeration, flow values from a plain BFS
augmenting-path solver, and packing numbers from exhaustive tree-set
search. They stay dumb so the production code has something honest to be
checked against.
"""

import itertools
from pathlib import Path

import pytest

from ghznetsim.topology import Edge, GraphView, Topology

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "ghznetsim" / "data"


def make_view(n, edge_pairs, active=None):
    """GraphView from a plain (u, v) list; edges sorted canonically."""
    pairs = sorted(tuple(sorted(e)) for e in edge_pairs)
    adj = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(pairs):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    for lst in adj:
        lst.sort()
    return GraphView(n, pairs, adj, list(active) if active is not None else None)


def make_topology(n, edge_pairs, p=1.0, name="fixture"):
    pairs = sorted(tuple(sorted(e)) for e in edge_pairs)
    edges = [Edge.make(u, v, 1.0, p, p_e=p) for u, v in pairs]
    return Topology(name, n, edges, default_p_op=p)


def active_pairs(view):
    return [view.edges[e] for e in view.active_edge_ids()]


def _components(n, pairs):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        parent[find(u)] = find(v)
    return [find(v) for v in range(n)]


def terminals_connected(n, pairs, terminals):
    comp = _components(n, pairs)
    return len({comp[t] for t in terminals}) == 1


def spanning_tree_subsets(view, terminals):
    """All edge subsets of the active graph that form a tree spanning the
    terminals (acyclic, connected, touching every terminal)."""
    act = view.active_edge_ids()
    n = view.n_nodes
    found = []
    for r in range(1, len(act) + 1):
        for combo in itertools.combinations(act, r):
            nodes = set()
            for e in combo:
                nodes.update(view.edges[e])
            if not all(t in nodes for t in terminals):
                continue
            if len(nodes) != r + 1:  # not a tree
                continue
            pairs = [view.edges[e] for e in combo]
            sub = {x: i for i, x in enumerate(sorted(nodes))}
            if terminals_connected(len(nodes), [(sub[u], sub[v]) for u, v in pairs],
                                   [sub[t] for t in terminals]):
                found.append(frozenset(combo))
    return found


def brute_force_steiner_cost(view, terminals):
    """Minimum tree size by exhaustive subset search, None if disconnected."""
    best = None
    for tree in spanning_tree_subsets(view, terminals):
        if best is None or len(tree) < best:
            best = len(tree)
    return best


def brute_force_packing_count(view, terminals, cap=8):
    """Maximum number of edge-disjoint terminal-spanning trees."""
    act = frozenset(view.active_edge_ids())
    pairs = [view.edges[e] for e in act]
    if not terminals_connected(view.n_nodes, pairs, terminals):
        return 0
    trees = spanning_tree_subsets(view, terminals)
    best = 1

    def rec(avail, depth):
        nonlocal best
        for tr in trees:
            if tr <= avail:
                if depth + 1 > best:
                    best = depth + 1
                if depth + 1 < cap:
                    rec(avail - tr, depth + 1)

    rec(act, 0)
    return best


def edmonds_karp_value(view, source, sinks, sink_cap=1):
    """Independent max-flow: BFS augmenting paths over a dict residual
    graph, one unit capacity per undirected edge, sinks via a supernode.

    ``sink_cap=1`` counts servable users; a large value measures the cut.
    """
    cap = {}

    def add(u, v, c):
        cap.setdefault(u, {}).setdefault(v, 0)
        cap.setdefault(v, {}).setdefault(u, 0)
        cap[u][v] += c

    for eid in view.active_edge_ids():
        u, v = view.edges[eid]
        add(u, v, 1)
        add(v, u, 1)
    sink = "T"
    for s in sinks:
        add(s, sink, sink_cap)
    total = 0
    while True:
        prev = {source: None}
        queue = [source]
        while queue and sink not in prev:
            x = queue.pop(0)
            for y, c in cap.get(x, {}).items():
                if c > 0 and y not in prev:
                    prev[y] = x
                    queue.append(y)
        if sink not in prev:
            return total
        y = sink
        while prev[y] is not None:
            x = prev[y]
            cap[x][y] -= 1
            cap[y][x] += 1
            y = x
        total += 1


def connected_graphs(n_nodes, max_edges):
    """All connected labeled graphs on exactly n_nodes with <= max_edges."""
    all_pairs = list(itertools.combinations(range(n_nodes), 2))
    for r in range(n_nodes - 1, max_edges + 1):
        if r > len(all_pairs):
            break
        for combo in itertools.combinations(all_pairs, r):
            nodes = set()
            for u, v in combo:
                nodes.add(u)
                nodes.add(v)
            if len(nodes) != n_nodes:
                continue
            if terminals_connected(n_nodes, combo, range(n_nodes)):
                yield combo


@pytest.fixture(scope="session")
def grid6():
    from ghznetsim.topology import build_grid
    return build_grid(6, 0.75)
