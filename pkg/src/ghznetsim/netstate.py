"""Per-timeslot stochastic link state: generation, cut-off, and consumption.

Each edge's entanglement link cycles through four states:

* ``ABSENT``      - no link; a Bernoulli(p_e) generation attempt runs every
                    timeslot while the edge memories are free.
* ``PRESENT``     - a link exists, usable for ``q_c`` consecutive timeslots
                    (counted from the slot it was generated in) before the
                    cut-off discards it. An expired link frees the edge in
                    the same advance, so generation is re-attempted at once.
* ``CONSUMED``    - swapped or fused during the current slot; the edge
                    returns to ABSENT at the next advance and may regenerate
                    from the following slot.
* ``MEMORY_HELD`` - a terminal edge of a delivered user-centre Bell pair.
                    The pair itself is exempt from the cut-off; it parks in
                    the end-node memories and blocks regeneration over that
                    edge until the pair is fused and released.

One advance consumes exactly one uniform draw per edge, in edge-index
order, regardless of how many edges are eligible. This keeps trajectories
reproducible and lets the compiled engine batch draws without changing the
stream. A state is confined to a single trial; trials run concurrently on
independent streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ProtocolLogicError
from .topology import GraphView, Topology

UNBOUNDED = 0  # q_c sentinel: links never expire


class LinkStatus(IntEnum):
    ABSENT = 0
    PRESENT = 1
    CONSUMED = 2
    MEMORY_HELD = 3


@dataclass(frozen=True)
class BellPairRecord:
    """A delivered user-centre Bell pair and the edge memories it occupies."""

    user: int
    centre: int
    edge_at_user: int
    edge_at_centre: int


@dataclass
class LinkSubgraph:
    """The instantaneous graph of currently present links."""

    topology: Topology
    edge_ids: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.edge_ids)

    def view(self) -> GraphView:
        active = [False] * self.topology.n_edges
        for eid in self.edge_ids:
            active[eid] = True
        return GraphView(self.topology.n_nodes,
                         [(e.u, e.v) for e in self.topology.edges],
                         self.topology.adjacency(),
                         active)


class NetworkState:
    """Mutable per-trial link state driven by a deterministic stream."""

    def __init__(self, topology: Topology, rng: np.random.Generator,
                 q_c: int | None = 1, p_e: np.ndarray | None = None):
        if q_c is not None and q_c != UNBOUNDED and q_c < 1:
            raise ValueError(f"q_c must be >= 1 or unbounded, got {q_c}")
        self.topology = topology
        self.rng = rng
        self.q_c = UNBOUNDED if q_c is None else int(q_c)
        self.p_e = topology.arrays()[2] if p_e is None else np.asarray(p_e, dtype=np.float64)
        self.status = np.zeros(topology.n_edges, dtype=np.int8)
        self.age = np.zeros(topology.n_edges, dtype=np.int32)
        self.timeslot = 0
        self.bell_pairs: list[BellPairRecord] = []
        # centre-side qubits not yet fused into the growing state, as
        # (edge_at_centre, edge_at_user) in arrival order
        self._centre_qubits: list[tuple[int, int]] = []

    def advance_timeslot(self) -> "NetworkState":
        """Age and expire links, clear consumed edges, then draw new links.

        Consumes one uniform per edge in index order. Each edge evolves
        independently; tiny topologies take a scalar path (cheaper than
        array algebra for long single-edge occupancy runs).
        """
        status, age, qc = self.status, self.age, self.q_c
        m = len(status)
        draws = self.rng.random(m)
        if m <= 8:
            p_e = self.p_e
            for e in range(m):
                st = status[e]
                if st == 1:  # present
                    age[e] += 1
                    if qc > 0 and age[e] >= qc:
                        st = 0
                elif st == 2:  # consumed this slot
                    st = 0
                if st == 0 and draws[e] < p_e[e]:
                    st = 1
                    age[e] = 0
                status[e] = st
        else:
            present = status == LinkStatus.PRESENT
            age[present] += 1
            if qc != UNBOUNDED:
                status[present & (age >= qc)] = LinkStatus.ABSENT
            status[status == LinkStatus.CONSUMED] = LinkStatus.ABSENT
            generated = (status == LinkStatus.ABSENT) & (draws < self.p_e)
            status[generated] = LinkStatus.PRESENT
            age[generated] = 0
            if __debug__ and qc != UNBOUNDED:
                assert not np.any((status == LinkStatus.PRESENT) & (age >= qc))
        self.timeslot += 1
        return self

    def link_subgraph(self) -> LinkSubgraph:
        return LinkSubgraph(self.topology,
                            np.flatnonzero(self.status == LinkStatus.PRESENT))

    def is_present(self, edge_id: int) -> bool:
        return self.status[edge_id] == LinkStatus.PRESENT

    def status_of(self, edge_id: int):
        """(LinkStatus, age) of one edge, for inspection and debug dumps."""
        st = LinkStatus(self.status[edge_id])
        return st, int(self.age[edge_id]) if st == LinkStatus.PRESENT else 0

    def consume_path(self, path, user: int, centre: int) -> "NetworkState":
        """Swap a present path (ordered centre -> user) into a Bell pair.

        Interior edges are consumed; the two terminal edges hold the pair's
        qubits and stay blocked until :meth:`release_bell_pairs`.
        """
        path = list(path)
        if not path:
            raise ProtocolLogicError("cannot consume an empty path")
        self._require_present(path)
        self._require_chain(path, centre, user)
        for eid in path:
            self.status[eid] = LinkStatus.CONSUMED
        self.status[path[0]] = LinkStatus.MEMORY_HELD
        self.status[path[-1]] = LinkStatus.MEMORY_HELD
        self.bell_pairs.append(BellPairRecord(user, centre, path[-1], path[0]))
        self._centre_qubits.append((path[0], path[-1]))
        return self

    def fuse_centre_qubits(self) -> "NetworkState":
        """Fuse held centre-side qubits into the growing multi-user state.

        Fusion is a deterministic local operation, so a centre holding two
        or more qubits merges them at once. One qubit survives to anchor
        the grown state (so later pairs can still be absorbed); the other
        centre-side memories are freed, which keeps a busy centre from
        strangling its own neighbourhood. The surviving qubit may live in
        any participating memory: preferring an edge whose far end is a
        served user's share (held anyway) makes the anchor free of charge.
        The memory at a served user always stays held until delivery.
        """
        if len(self._centre_qubits) < 2:
            return self
        anchor = 0
        for i, (edge_at_centre, edge_at_user) in enumerate(self._centre_qubits):
            if edge_at_centre == edge_at_user:
                anchor = i
                break
        for i, (edge_at_centre, edge_at_user) in enumerate(self._centre_qubits):
            if i != anchor and edge_at_centre != edge_at_user:
                self.status[edge_at_centre] = LinkStatus.ABSENT
        self._centre_qubits = [self._centre_qubits[anchor]]
        return self

    def consume_tree(self, edge_ids) -> "NetworkState":
        """Swap and fuse a present tree into a GHZ state, delivered in-slot."""
        edge_ids = list(edge_ids)
        if not edge_ids:
            raise ProtocolLogicError("cannot consume an empty tree")
        self._require_present(edge_ids)
        self._require_tree(edge_ids)
        for eid in edge_ids:
            self.status[eid] = LinkStatus.CONSUMED
        return self

    def release_bell_pairs(self) -> "NetworkState":
        """Final fusion and delivery: every held memory becomes free."""
        for rec in self.bell_pairs:
            self.status[rec.edge_at_user] = LinkStatus.ABSENT
        for edge_at_centre, _ in self._centre_qubits:
            self.status[edge_at_centre] = LinkStatus.ABSENT
        self.bell_pairs = []
        self._centre_qubits = []
        return self

    def debug_dump(self) -> str:
        names = {0: "absent", 1: "present", 2: "consumed", 3: "memory-held"}
        lines = [f"timeslot {self.timeslot}"]
        for eid, edge in enumerate(self.topology.edges):
            st = int(self.status[eid])
            extra = f" age={self.age[eid]}" if st == LinkStatus.PRESENT else ""
            lines.append(f"edge {eid} ({edge.u},{edge.v}): {names[st]}{extra}")
        return "\n".join(lines) + "\n"

    def _require_present(self, edge_ids) -> None:
        for eid in edge_ids:
            if self.status[eid] != LinkStatus.PRESENT:
                raise ProtocolLogicError(
                    f"edge {eid} is {LinkStatus(self.status[eid]).name}, not PRESENT")

    def _require_chain(self, path, centre: int, user: int) -> None:
        node = centre
        for eid in path:
            e = self.topology.edges[eid]
            if e.u == node:
                node = e.v
            elif e.v == node:
                node = e.u
            else:
                raise ProtocolLogicError(
                    f"path edge {eid} ({e.u},{e.v}) does not continue from node {node}")
        if node != user:
            raise ProtocolLogicError(f"path ends at node {node}, expected user {user}")

    def _require_tree(self, edge_ids) -> None:
        parent: dict[int, int] = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in edge_ids:
            e = self.topology.edges[eid]
            ru, rv = find(e.u), find(e.v)
            if ru == rv:
                raise ProtocolLogicError(f"edge set contains a cycle through ({e.u},{e.v})")
            parent[ru] = rv
        roots = {find(x) for x in parent}
        if len(roots) != 1:
            raise ProtocolLogicError("edge set is not connected")
