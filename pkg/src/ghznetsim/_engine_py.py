"""Pure-Python trial engine: the reference implementation.

Runs one protocol trial by driving :class:`~ghznetsim.netstate.NetworkState`
and the routing module directly. The compiled kernel reproduces these
trajectories bit for bit (same uniform stream, same tie-breaking); the
parity suite holds the two engines together.
"""

from __future__ import annotations

import numpy as np

from . import routing
from .netstate import NetworkState

NAME = "python"

SP, SP_TREE, MP_GPLUS, MP_C, MP_P = range(5)


def run_trial(topology, proto, users, q_c, max_slots, rng,
              centre=-1, paths=None, tree=None, p_e=None):
    """One protocol trial; returns (succeeded, timeslots_used, ghz_count)."""
    users = sorted(users)
    state = NetworkState(topology, rng, q_c, p_e=p_e)
    if proto == SP:
        return _run_sp(state, users, centre, paths, max_slots)
    if proto == SP_TREE:
        return _run_sp_tree(state, tree, max_slots)
    if proto == MP_GPLUS:
        return _run_mp_gplus(state, users, centre, max_slots)
    if proto == MP_C:
        return _run_mp_c(state, users, max_slots)
    if proto == MP_P:
        return _run_mp_p(state, users, max_slots)
    raise ValueError(f"unknown protocol code {proto}")


def _run_sp(state, users, centre, paths, max_slots):
    pending = [u for u in users if u != centre]
    while state.timeslot < max_slots:
        state.advance_timeslot()
        for u in list(pending):
            path = paths[u]
            if all(state.is_present(e) for e in path):
                state.consume_path(path, u, centre)
                pending.remove(u)
        if not pending:
            state.release_bell_pairs()
            return True, state.timeslot, 1
        state.fuse_centre_qubits()
    return False, max_slots, 0


def _run_sp_tree(state, tree, max_slots):
    while state.timeslot < max_slots:
        state.advance_timeslot()
        if all(state.is_present(e) for e in tree):
            state.consume_tree(tree)
            return True, state.timeslot, 1
    return False, max_slots, 0


def _run_mp_gplus(state, users, centre, max_slots):
    served = {centre} if centre in users else set()
    while state.timeslot < max_slots:
        state.advance_timeslot()
        unserved = [u for u in users if u not in served]
        view = state.link_subgraph().view()
        solution = routing.disjoint_paths_to_centre(view, centre, unserved)
        for u in sorted(solution.paths):
            state.consume_path(solution.paths[u], u, centre)
            served.add(u)
        if len(served) == len(users):
            state.release_bell_pairs()
            return True, state.timeslot, 1
        state.fuse_centre_qubits()
    return False, max_slots, 0


def _run_mp_c(state, users, max_slots):
    while state.timeslot < max_slots:
        state.advance_timeslot()
        view = state.link_subgraph().view()
        if routing.has_connecting_tree(view, users):
            tree = routing.steiner_tree(view, users)
            state.consume_tree(tree.edges)
            return True, state.timeslot, 1
    return False, max_slots, 0


def _run_mp_p(state, users, max_slots):
    while state.timeslot < max_slots:
        state.advance_timeslot()
        count = 0
        view = state.link_subgraph().view()
        while routing.has_connecting_tree(view, users):
            tree = routing.steiner_tree(view, users)
            state.consume_tree(tree.edges)
            count += 1
            view = state.link_subgraph().view()
        if count:
            return True, state.timeslot, count
    return False, max_slots, 0


def sample_largest_components(topology, p_e, q_c, warmup, samples, rng):
    """Largest-connected-component size of the link subgraph, per sample.

    Each sample runs an independent warmed-up chain off the shared stream.
    """
    n = topology.n_nodes
    sizes = np.empty(samples, dtype=np.int32)
    for i in range(samples):
        state = NetworkState(topology, rng, q_c, p_e=p_e)
        for _ in range(warmup + 1):
            state.advance_timeslot()
        sizes[i] = _largest_component(topology, state)
    return sizes


def _largest_component(topology, state):
    parent = list(range(topology.n_nodes))
    size = [1] * topology.n_nodes

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in state.link_subgraph().edge_ids:
        e = topology.edges[eid]
        ru, rv = find(e.u), find(e.v)
        if ru != rv:
            parent[ru] = rv
            size[rv] += size[ru]
    return max(size[find(v)] for v in range(topology.n_nodes))
