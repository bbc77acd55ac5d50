"""Deterministic graph algorithms over a topology or link subgraph.

Everything here is a pure function of its inputs with pinned tie-breaking,
so trial trajectories replay exactly and the compiled engine can mirror
the results step for step:

* shortest paths break ties toward the lexicographically smallest
  node-index sequence;
* Dijkstra orders its heap by ``(key, node)`` and updates parents only on
  strict improvement, with neighbours scanned in sorted order;
* flow augmentation relaxes arcs in index order (Bellman-Ford) and
  decomposes flow by walking minimum-index arcs.

Steiner trees minimise the pair ``(edge count, sum of terminal degrees)``
lexicographically. The secondary objective keeps users out of the interior
of the tree whenever that is free, which matters when trees are packed:
a user left with unused incident edges can join another edge-disjoint
tree. Instances with at most ``EXACT_TERMINAL_LIMIT`` terminals are solved
exactly by dynamic programming over terminal subsets; larger instances use
the classical metric-closure heuristic (terminal-pair shortest paths,
spanning tree, re-span, prune), which stays within twice the optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .errors import InfeasibleScenarioError, ValidationError
from .topology import GraphView, Topology

EXACT_TERMINAL_LIMIT = 5

_INF = float("inf")
_INT_INF = 1 << 60


@dataclass(frozen=True)
class RoutingSolution:
    """Edge-disjoint centre-to-user paths; each path is ordered from the
    centre and a user equal to the centre is served by an empty path."""

    paths: dict
    users_served: int
    total_edges: int


@dataclass(frozen=True)
class SteinerTree:
    edges: tuple
    terminals: frozenset


def shortest_path(g: GraphView, a: int, b: int):
    """Minimum-hop path from ``a`` to ``b`` as a list of edge ids.

    Among equal-hop paths, returns the lexicographically smallest node
    sequence. ``None`` if disconnected.
    """
    if a == b:
        raise ValidationError("shortest_path endpoints must differ")
    dist = _bfs_distances(g, b)
    if dist[a] == _INT_INF:
        return None
    path = []
    node = a
    while node != b:
        for v, eid in g.adj[node]:
            if g.edge_active(eid) and dist[v] == dist[node] - 1:
                path.append(eid)
                node = v
                break
    return path


def _bfs_distances(g: GraphView, source: int):
    dist = [_INT_INF] * g.n_nodes
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            du = dist[u] + 1
            for v, eid in g.adj[u]:
                if g.edge_active(eid) and dist[v] == _INT_INF:
                    dist[v] = du
                    nxt.append(v)
        frontier = nxt
    return dist


def has_connecting_tree(g: GraphView, terminals) -> bool:
    """True iff all terminals lie in one connected component."""
    terminals = sorted(set(terminals))
    if len(terminals) < 2:
        raise ValidationError("need at least two terminals")
    parent = list(range(g.n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid, (u, v) in enumerate(g.edges):
        if g.edge_active(eid):
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    root = find(terminals[0])
    return all(find(t) == root for t in terminals[1:])


# ---------------------------------------------------------------------------
# Steiner trees
# ---------------------------------------------------------------------------

def _encoded_weight(g: GraphView, tset, big: int):
    """Per-edge weight big + (#terminal endpoints); lexicographic objective."""
    return [big + (u in tset) + (v in tset) for u, v in g.edges]


def _dijkstra(g: GraphView, weights, seeds):
    """Multi-source Dijkstra; returns (dist, parent_edge, parent_node).

    ``seeds`` maps node -> initial key. Heap is ordered by (key, node) and
    parents update on strict improvement only, so results are independent
    of heap internals.
    """
    dist = [_INT_INF] * g.n_nodes
    par_edge = [-1] * g.n_nodes
    par_node = [-1] * g.n_nodes
    heap = []
    for v in sorted(seeds):
        dist[v] = seeds[v]
        heappush(heap, (seeds[v], v))
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for v, eid in g.adj[u]:
            if not g.edge_active(eid):
                continue
            nd = d + weights[eid]
            if nd < dist[v]:
                dist[v] = nd
                par_edge[v] = eid
                par_node[v] = u
                heappush(heap, (nd, v))
    return dist, par_edge, par_node


def steiner_tree(g: GraphView, terminals):
    """A low-cost tree spanning the terminals, or ``None`` if disconnected.

    Cost never exceeds 2 * (1 - 1/leaves) times the optimum; with at most
    EXACT_TERMINAL_LIMIT terminals the result is exactly optimal for the
    (edge count, terminal degree sum) objective. Every leaf is a terminal.
    """
    terminals = sorted(set(terminals))
    if len(terminals) < 2:
        raise ValidationError("need at least two terminals")
    if len(terminals) <= EXACT_TERMINAL_LIMIT:
        edge_ids = _steiner_exact(g, terminals)
    else:
        edge_ids = _steiner_kmb(g, terminals)
    if edge_ids is None:
        return None
    return SteinerTree(tuple(sorted(edge_ids)), frozenset(terminals))


def _steiner_exact(g: GraphView, terms):
    """Dreyfus-Wagner subset DP over encoded weights."""
    n = g.n_nodes
    big = 2 * n + 5
    tset = set(terms)
    weights = _encoded_weight(g, tset, big)
    k = len(terms)
    nmask = 1 << (k - 1)
    root = terms[0]
    dp = [[_INT_INF] * n for _ in range(nmask)]
    choice = [[None] * n for _ in range(nmask)]  # ("e", node, eid) | ("m", sub)

    for mask in range(1, nmask):
        row = dp[mask]
        ch = choice[mask]
        if mask & (mask - 1) == 0:
            row[terms[mask.bit_length()]] = 0
        else:
            sub = (mask - 1) & mask
            while sub:
                rest = mask ^ sub
                if sub < rest:
                    a, b = dp[sub], dp[rest]
                    for v in range(n):
                        cand = a[v] + b[v]
                        if cand < row[v]:
                            row[v] = cand
                            ch[v] = ("m", sub)
                sub = (sub - 1) & mask
        # close under growth along edges
        heap = [(row[v], v) for v in range(n) if row[v] < _INT_INF]
        heap.sort()
        while heap:
            d, u = heappop(heap)
            if d > row[u]:
                continue
            for v, eid in g.adj[u]:
                if not g.edge_active(eid):
                    continue
                nd = d + weights[eid]
                if nd < row[v]:
                    row[v] = nd
                    ch[v] = ("e", u, eid)
                    heappush(heap, (nd, v))

    full = nmask - 1
    if dp[full][root] >= _INT_INF:
        return None
    edge_ids = set()
    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        step = choice[mask][v]
        if step is None:
            continue
        if step[0] == "e":
            edge_ids.add(step[2])
            stack.append((mask, step[1]))
        else:
            sub = step[1]
            stack.append((sub, v))
            stack.append((mask ^ sub, v))
    return edge_ids


def _steiner_kmb(g: GraphView, terms):
    """Metric-closure heuristic with the same encoded weights."""
    n = g.n_nodes
    big = 2 * n + 5
    tset = set(terms)
    weights = _encoded_weight(g, tset, big)
    k = len(terms)
    dists = {}
    parents = {}
    for t in terms:
        dist, par_edge, par_node = _dijkstra(g, weights, {t: 0})
        dists[t] = dist
        parents[t] = (par_edge, par_node)

    # spanning tree over the terminal metric closure (Kruskal)
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            d = dists[terms[i]][terms[j]]
            if d >= _INT_INF:
                return None
            pairs.append((d, terms[i], terms[j]))
    pairs.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    union_edges = set()
    nodes = set(terms)
    taken = 0
    for d, a, b in pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[ra] = rb
        taken += 1
        par_edge, par_node = parents[a]
        node = b
        while node != a:
            union_edges.add(par_edge[node])
            nodes.add(node)
            node = par_node[node]
        nodes.add(a)
        if taken == k - 1:
            break

    # re-span the induced subgraph, cheapest edges first
    parent = list(range(n))
    tree = set()
    for inc in (0, 1, 2):
        for eid, (u, v) in enumerate(g.edges):
            if not g.edge_active(eid) or u not in nodes or v not in nodes:
                continue
            if weights[eid] != big + inc:
                continue
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                tree.add(eid)

    # prune non-terminal leaves
    degree = {}
    incident = {}
    for eid in sorted(tree):
        for x in g.edges[eid]:
            degree[x] = degree.get(x, 0) + 1
            incident.setdefault(x, []).append(eid)
    removed = set()
    changed = True
    while changed:
        changed = False
        for x in sorted(degree):
            if degree[x] == 1 and x not in tset:
                leaf_edge = next(e for e in incident[x] if e not in removed)
                removed.add(leaf_edge)
                for y in g.edges[leaf_edge]:
                    degree[y] -= 1
                changed = True
    return tree - removed


def greedy_tree_packing(g: GraphView, terminals):
    """Edge-disjoint trees spanning the terminals, extracted greedily.

    Repeatedly takes :func:`steiner_tree` and removes its edges until the
    terminals are no longer connected. Possibly empty.
    """
    terminals = sorted(set(terminals))
    if len(terminals) < 2:
        raise ValidationError("need at least two terminals")
    active = list(g.active) if g.active is not None else [True] * len(g.edges)
    work = GraphView(g.n_nodes, g.edges, g.adj, active)
    trees = []
    while has_connecting_tree(work, terminals):
        tree = steiner_tree(work, terminals)
        trees.append(tree)
        for eid in tree.edges:
            active[eid] = False
    return trees


# ---------------------------------------------------------------------------
# Flow: edge-disjoint paths and cuts
# ---------------------------------------------------------------------------

class _FlowNet:
    """Residual network over an undirected unit-capacity graph.

    Each edge becomes two forward arcs (one per direction) with their own
    residual reverses; arc ``a ^ 1`` is the reverse of ``a``. Successive
    shortest augmenting paths (Bellman-Ford over arcs in index order) give
    a minimum-cost maximum flow for non-negative arc costs.
    """

    def __init__(self, g: GraphView, sink_nodes, sink_cap: int, costs=None):
        self.n = g.n_nodes + 1
        self.sink = g.n_nodes
        src = []
        dst = []
        cap = []
        cost = []

        def add(s, d, c, w):
            src.append(s)
            dst.append(d)
            cap.append(c)
            cost.append(w)
            src.append(d)
            dst.append(s)
            cap.append(0)
            cost.append(-w)

        for eid, (u, v) in enumerate(g.edges):
            usable = 1 if g.edge_active(eid) else 0
            w = 1 if costs is None else costs[eid]
            add(u, v, usable, w)
            add(v, u, usable, w)
        self.first_sink_arc = len(src)
        for node in sink_nodes:
            add(node, self.sink, sink_cap, 0)
        self.src = src
        self.dst = dst
        self.cap = cap
        self.cost = cost
        self.flow = [0] * len(src)
        # arcs that can ever carry flow, in index order (arcs of inactive
        # edges stay at capacity 0 on both sides, so skipping them leaves
        # the relaxation sequence unchanged)
        self.live = [a for a in range(len(src))
                     if cap[a] > 0 or cap[a ^ 1] > 0]

    def augment_once(self, source: int) -> bool:
        """Push one unit along the cheapest residual source-to-sink path.

        Bellman-Ford over arcs in index order; the compiled engine mirrors
        this loop exactly for its per-slot routing.
        """
        src, dst = self.src, self.dst
        cap, cost, flow = self.cap, self.cost, self.flow
        live = self.live
        dist = [_INF] * self.n
        pred = [-1] * self.n
        dist[source] = 0
        for _ in range(self.n + 1):
            improved = False
            for a in live:
                if cap[a] - flow[a] <= 0:
                    continue
                ds = dist[src[a]]
                if ds == _INF:
                    continue
                nd = ds + cost[a]
                if nd < dist[dst[a]]:
                    dist[dst[a]] = nd
                    pred[dst[a]] = a
                    improved = True
            if not improved:
                break
        if dist[self.sink] == _INF:
            return False
        node = self.sink
        while node != source:
            a = pred[node]
            flow[a] += 1
            flow[a ^ 1] -= 1
            node = src[a]
        return True

    def max_flow(self, source: int, limit: int) -> int:
        sent = 0
        while sent < limit and self.augment_once(source):
            sent += 1
        return sent

    def edge_of_arc(self, a: int) -> int:
        return a // 4

    def walk_paths(self, source: int, sink_nodes):
        """Decompose the flow into per-sink paths of edge ids.

        Walks backwards from each served sink over arcs carrying flow,
        choosing the lowest-index arc at every step.
        """
        n_phys = self.first_sink_arc
        inflow = [[] for _ in range(self.n)]
        for a in range(0, n_phys, 2):  # forward arcs only
            if self.flow[a] > 0:
                inflow[self.dst[a]].append(a)
        paths = {}
        for i, node in enumerate(sink_nodes):
            sink_arc = self.first_sink_arc + 2 * i
            if self.flow[sink_arc] <= 0:
                continue
            rev_path = []
            cur = node
            while cur != source:
                a = min(x for x in inflow[cur] if self.flow[x] > 0)
                self.flow[a] -= 1
                rev_path.append(self.edge_of_arc(a))
                cur = self.src[a]
            paths[node] = tuple(reversed(rev_path))
        return paths


def disjoint_paths_to_centre(g: GraphView, centre: int, users) -> RoutingSolution:
    """Serve as many users as possible with edge-disjoint centre paths,
    secondarily minimising the total number of edges used."""
    users = sorted(set(users))
    paths = {}
    flow_users = [u for u in users if u != centre]
    if centre in users:
        paths[centre] = ()
    if flow_users:
        net = _FlowNet(g, flow_users, sink_cap=1)
        net.max_flow(centre, limit=len(flow_users))
        paths.update(net.walk_paths(centre, flow_users))
    total = sum(len(p) for p in paths.values())
    return RoutingSolution(paths=paths, users_served=len(paths), total_edges=total)


def _best_paths_log_cost(g: GraphView, centre: int, users, log_costs):
    """Min -log(probability) edge-disjoint paths; (solution, cost) or None."""
    users = sorted(set(users))
    paths = {}
    flow_users = [u for u in users if u != centre]
    if centre in users:
        paths[centre] = ()
    cost = 0
    if flow_users:
        net = _FlowNet(g, flow_users, sink_cap=1, costs=log_costs)
        sent = net.max_flow(centre, limit=len(flow_users))
        if sent < len(flow_users):
            return None
        paths.update(net.walk_paths(centre, flow_users))
        for p in paths.values():
            for eid in p:
                cost += log_costs[eid]
    total = sum(len(p) for p in paths.values())
    return RoutingSolution(paths, len(paths), total), cost


def min_user_cut_bound(t, users) -> int:
    """Smallest edge cut separating any one user from the rest."""
    users = sorted(set(users))
    if len(users) < 2:
        raise ValidationError("need at least two users")
    g = t.view() if isinstance(t, Topology) else t
    best = _INT_INF
    cap = len(g.edges) + 1
    for u in users:
        others = [x for x in users if x != u]
        net = _FlowNet(g, others, sink_cap=cap)
        value = net.max_flow(u, limit=cap)
        best = min(best, value)
    return best


# ---------------------------------------------------------------------------
# Centre selection
# ---------------------------------------------------------------------------

# Probability products are compared through quantized -log costs. Integer
# arithmetic keeps Bellman-Ford exact: float rounding can fabricate tiny
# negative cycles whose predecessor pointers never reach the source.
_LOG_SCALE = 1 << 24
# Stand-in cost for a zero-probability edge: dominates any realistic route
# but keeps such edges routable (a protocol over them simply never
# succeeds, which is the honest outcome).
_ZERO_P_COST = 10**12


def _log_costs(t: Topology):
    costs = []
    for e in t.edges:
        if e.p_e > 0:
            costs.append(round(-math.log(e.p_e) * _LOG_SCALE))
        else:
            costs.append(_ZERO_P_COST)
    return costs


def centre_candidates(t: Topology, users) -> list:
    """Nodes with enough edges to hold one Bell-pair qubit per user."""
    users = set(users)
    need = len(users)
    out = []
    for v in range(t.n_nodes):
        if t.degree(v) >= (need - 1 if v in users else need):
            out.append(v)
    return out


def select_centre_with_paths(t: Topology, users):
    """(centre, RoutingSolution) maximising the product of link
    probabilities over the solution's edges; ties go to the lowest index.

    Candidates are scanned in order of an optimistic bound (the product of
    per-user best single paths), so usually only a few flows run.
    """
    users = sorted(set(users))
    candidates = centre_candidates(t, users)
    if not candidates:
        raise InfeasibleScenarioError(
            f"no node has the {len(users)} edges (or {len(users) - 1} for a user node) "
            f"required to serve {len(users)} users")
    g = t.view()
    log_costs = _log_costs(t)
    per_user = {u: _dijkstra(g, log_costs, {u: 0})[0] for u in users}
    scored = []
    for v in candidates:
        bound = 0
        for u in users:
            if u == v:
                continue
            d = per_user[u][v]
            if d >= _INT_INF:
                bound = _INT_INF
                break
            bound += d
        if bound < _INT_INF:
            scored.append((bound, v))
    scored.sort()
    best = None  # (cost, centre, solution)
    for bound, v in scored:
        if best is not None and bound > best[0]:
            break
        result = _best_paths_log_cost(g, v, users, log_costs)
        if result is None:
            continue
        solution, cost = result
        if best is None or cost < best[0] or (cost == best[0] and v < best[1]):
            best = (cost, v, solution)
        # candidates are sorted by (bound, index); once the incumbent
        # achieves its own lower bound, later candidates can at most tie
        # on cost and always lose the index tie-break
        if cost == bound and best[1] == v:
            break
    if best is None:
        raise InfeasibleScenarioError(
            f"no centre node can reach all {len(users)} users over edge-disjoint paths")
    return best[1], best[2]


def select_centre_node(t: Topology, users) -> int:
    return select_centre_with_paths(t, users)[0]
