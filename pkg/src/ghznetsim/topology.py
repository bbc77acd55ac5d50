"""Static network topology: graph structure and per-edge link probabilities.

A topology is a simple connected undirected graph over nodes ``0..n-1``.
Each edge models a fibre quantum channel with a physical length and an
operational probability ``p_op``. The probability that an entanglement
link is generated over the edge in one timeslot is

    p_e = p_op * 10 ** (-attenuation_db_per_km * length_km / 10)

i.e. ``p_op`` scaled by the fibre transmittance, so a zero-length edge
succeeds with exactly ``p_op``. The default attenuation is 0.2 dB/km.

Uniform-probability grids used in lattice experiments set ``p_e`` directly
(the edges still carry a nominal 1 km length so catalog statistics stay
meaningful); such edges keep their ``p_e`` when lengths are rescaled.

Topologies are immutable after construction and safe to share between
concurrent trial workers.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

ATTENUATION_DB_PER_KM = 0.2

NodeId = int


def edge_success_probability(
    length_km: float, p_op: float, attenuation_db_per_km: float = ATTENUATION_DB_PER_KM
) -> float:
    """Per-timeslot link generation probability for a fibre edge."""
    if length_km < 0:
        raise ValueError(f"length_km must be >= 0, got {length_km}")
    if not 0.0 <= p_op <= 1.0:
        raise ValueError(f"p_op must be in [0, 1], got {p_op}")
    return p_op * 10.0 ** (-attenuation_db_per_km * length_km / 10.0)


@dataclass(frozen=True)
class Edge:
    """Undirected edge with endpoints ``u < v``.

    ``p_e`` is derived from ``p_op`` and the length unless the edge was
    built with an explicit override (uniform grid models).
    """

    u: int
    v: int
    length_km: float
    p_op: float
    p_e: float
    p_e_overridden: bool = False

    @classmethod
    def make(
        cls,
        u: int,
        v: int,
        length_km: float,
        p_op: float,
        p_e: float | None = None,
        attenuation_db_per_km: float = ATTENUATION_DB_PER_KM,
    ) -> "Edge":
        if u == v:
            raise ValidationError(f"self-loop edge at node {u}")
        if u > v:
            u, v = v, u
        if length_km < 0:
            raise ValidationError(f"edge ({u},{v}): negative length {length_km}")
        if not 0.0 <= p_op <= 1.0:
            raise ValidationError(f"edge ({u},{v}): p_op {p_op} outside [0, 1]")
        if p_e is None:
            return cls(u, v, length_km, p_op,
                       edge_success_probability(length_km, p_op, attenuation_db_per_km))
        if not 0.0 <= p_e <= p_op + 1e-12:
            raise ValidationError(f"edge ({u},{v}): p_e {p_e} outside [0, p_op]")
        return cls(u, v, length_km, p_op, p_e, p_e_overridden=True)


@dataclass(frozen=True)
class CatalogStats:
    node_count: int
    edge_count: int
    mean_edge_length_km: float
    mean_nodal_degree: float


@dataclass
class GraphView:
    """Lightweight read-only graph used by the routing algorithms.

    ``adj[u]`` lists ``(neighbour, edge_id)`` pairs sorted by neighbour;
    ``active`` optionally masks edges (the instantaneous link subgraph).
    """

    n_nodes: int
    edges: list  # list[(u, v)]
    adj: list  # list[list[(nbr, edge_id)]]
    active: list | None = None

    def edge_active(self, edge_id: int) -> bool:
        return self.active is None or self.active[edge_id]

    def active_edge_ids(self) -> list:
        if self.active is None:
            return list(range(len(self.edges)))
        return [e for e, a in enumerate(self.active) if a]


class Topology:
    """Immutable network graph with cached adjacency and kernel arrays."""

    def __init__(self, name: str, n_nodes: int, edges, default_p_op: float = 1.0,
                 grid_m: int | None = None):
        edges = tuple(edges)
        _validate_graph(n_nodes, edges)
        self.name = name
        self.n_nodes = n_nodes
        self.edges = edges
        self.default_p_op = default_p_op
        self.grid_m = grid_m
        self._adj = None
        self._arrays = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list:
        if self._adj is None:
            adj = [[] for _ in range(self.n_nodes)]
            for eid, e in enumerate(self.edges):
                adj[e.u].append((e.v, eid))
                adj[e.v].append((e.u, eid))
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def degree(self, node: int) -> int:
        return len(self.adjacency()[node])

    def view(self) -> GraphView:
        return GraphView(self.n_nodes,
                         [(e.u, e.v) for e in self.edges],
                         self.adjacency())

    def p_e(self) -> np.ndarray:
        return self.arrays()[2].copy()

    def arrays(self):
        """(edge_u, edge_v, p_e, adj_indptr, adj_nbr, adj_eid) as numpy arrays.

        The adjacency is in CSR layout with neighbour lists sorted, matching
        :meth:`adjacency`. Shared read-only with the compiled kernel.
        """
        if self._arrays is None:
            m = len(self.edges)
            eu = np.fromiter((e.u for e in self.edges), dtype=np.int32, count=m)
            ev = np.fromiter((e.v for e in self.edges), dtype=np.int32, count=m)
            pe = np.fromiter((e.p_e for e in self.edges), dtype=np.float64, count=m)
            adj = self.adjacency()
            indptr = np.zeros(self.n_nodes + 1, dtype=np.int32)
            for u, lst in enumerate(adj):
                indptr[u + 1] = indptr[u] + len(lst)
            nbr = np.empty(2 * m, dtype=np.int32)
            eids = np.empty(2 * m, dtype=np.int32)
            k = 0
            for lst in adj:
                for v, eid in lst:
                    nbr[k] = v
                    eids[k] = eid
                    k += 1
            for a in (eu, ev, pe, indptr, nbr, eids):
                a.setflags(write=False)
            self._arrays = (eu, ev, pe, indptr, nbr, eids)
        return self._arrays

    def corner_users(self) -> tuple:
        """The four lattice corners; only defined for generated grids."""
        if self.grid_m is None:
            raise ValidationError(f"topology {self.name!r} is not a generated grid")
        m = self.grid_m
        return (0, m - 1, m * (m - 1), m * m - 1)

    def __repr__(self):
        return f"Topology({self.name!r}, nodes={self.n_nodes}, edges={self.n_edges})"


def _validate_graph(n_nodes: int, edges) -> None:
    if n_nodes < 1:
        raise ValidationError("topology must have at least one node")
    seen = set()
    touched = np.zeros(n_nodes, dtype=bool)
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if not (0 <= e.u < n_nodes and 0 <= e.v < n_nodes):
            raise ValidationError(f"edge ({e.u},{e.v}) outside node range 0..{n_nodes - 1}")
        key = (e.u, e.v)
        if key in seen:
            raise ValidationError(f"duplicate edge ({e.u},{e.v})")
        seen.add(key)
        touched[e.u] = touched[e.v] = True
        parent[find(e.u)] = find(e.v)
    if n_nodes > 1:
        if not touched.all():
            missing = int(np.flatnonzero(~touched)[0])
            raise ValidationError(f"node {missing} has no edges (graph disconnected)")
        root = find(0)
        for v in range(1, n_nodes):
            if find(v) != root:
                raise ValidationError(f"graph disconnected: node {v} unreachable from 0")


def build_grid(width: int, p: float) -> Topology:
    """M x M lattice with uniform per-edge link probability ``p``.

    Nodes are indexed row-major (``row * M + column``); every edge carries a
    nominal 1 km length with ``p_e`` set directly to ``p``.
    """
    m = width
    if m < 2:
        raise ValidationError(f"grid width must be >= 2, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"grid p must be in [0, 1], got {p}")
    edges = []
    for u in range(m * m):
        r, c = divmod(u, m)
        if c < m - 1:
            edges.append(Edge.make(u, u + 1, 1.0, p, p_e=p))
        if r < m - 1:
            edges.append(Edge.make(u, u + m, 1.0, p, p_e=p))
    edges.sort(key=lambda e: (e.u, e.v))
    return Topology(f"grid{m}x{m}", m * m, edges, default_p_op=p, grid_m=m)


def scale_lengths(t: Topology, factor: float) -> Topology:
    """Rescale all edge lengths; derived ``p_e`` values are recomputed.

    Edges with an explicit ``p_e`` override (uniform grids) keep it.
    """
    if factor <= 0:
        raise ValidationError(f"length scale factor must be > 0, got {factor}")
    edges = [
        Edge.make(e.u, e.v, e.length_km * factor, e.p_op,
                  p_e=e.p_e if e.p_e_overridden else None)
        for e in t.edges
    ]
    return Topology(t.name, t.n_nodes, edges, t.default_p_op, t.grid_m)


def with_p_op(t: Topology, p_op: float) -> Topology:
    """Replace the operational probability on every edge, recomputing p_e."""
    if not 0.0 <= p_op <= 1.0:
        raise ValidationError(f"p_op must be in [0, 1], got {p_op}")
    edges = [Edge.make(e.u, e.v, e.length_km, p_op) for e in t.edges]
    return Topology(t.name, t.n_nodes, edges, p_op, t.grid_m)


def with_uniform_p(t: Topology, p: float) -> Topology:
    """Override every edge to succeed with exactly ``p`` (lattice-style model)."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must be in [0, 1], got {p}")
    edges = [Edge.make(e.u, e.v, e.length_km, p, p_e=p) for e in t.edges]
    return Topology(t.name, t.n_nodes, edges, p, t.grid_m)


def catalog_stats(t: Topology) -> CatalogStats:
    lengths = [e.length_km for e in t.edges]
    return CatalogStats(
        node_count=t.n_nodes,
        edge_count=t.n_edges,
        mean_edge_length_km=float(np.mean(lengths)) if lengths else 0.0,
        mean_nodal_degree=2.0 * t.n_edges / t.n_nodes,
    )


_HEADER_KEYS = {
    "name": str,
    "p_op": float,
    "uniform_p": float,
    "expected_nodes": int,
    "expected_edges": int,
    "expected_mean_length_km": float,
    "expected_mean_degree": float,
}


def load_topology(document) -> Topology:
    """Parse a topology document (text format or equivalent JSON).

    ``document`` may be a filesystem path or the document content itself.
    The text format is line oriented: ``key value`` header lines followed by
    ``u v length_km [p_op_override]`` edge records; ``#`` starts a comment.
    Declared ``expected_*`` header values are validated after parsing.
    """
    text, origin = _read_document(document)
    if text.lstrip().startswith("{"):
        return _parse_json(text, origin)
    return _parse_text(text, origin)


def _read_document(document):
    if isinstance(document, Path):
        return document.read_text(encoding="utf-8"), str(document)
    if isinstance(document, os.PathLike):
        return Path(document).read_text(encoding="utf-8"), str(document)
    if isinstance(document, str) and "\n" not in document and os.path.exists(document):
        return Path(document).read_text(encoding="utf-8"), document
    if isinstance(document, str):
        return document, "<document>"
    raise ValidationError(f"unsupported document source: {type(document).__name__}")


def _parse_text(text: str, origin: str) -> Topology:
    header: dict = {}
    records = []  # (line_no, u, v, length, p_op or None)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if not fields[0].lstrip("+-").isdigit():
            key = fields[0]
            if key not in _HEADER_KEYS:
                raise ValidationError(f"{origin}:{line_no}: unknown header {key!r}")
            if len(fields) != 2:
                raise ValidationError(f"{origin}:{line_no}: header {key!r} needs one value")
            try:
                header[key] = _HEADER_KEYS[key](fields[1])
            except ValueError:
                raise ValidationError(
                    f"{origin}:{line_no}: bad value {fields[1]!r} for {key!r}") from None
            continue
        if len(fields) not in (3, 4):
            raise ValidationError(
                f"{origin}:{line_no}: edge record needs 'u v length_km [p_op]'")
        try:
            u, v = int(fields[0]), int(fields[1])
            length = float(fields[2])
            p_override = float(fields[3]) if len(fields) == 4 else None
        except ValueError:
            raise ValidationError(f"{origin}:{line_no}: malformed edge record {line!r}") from None
        records.append((line_no, u, v, length, p_override))
    return _assemble(header, records, origin)


def _parse_json(text: str, origin: str) -> Topology:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{origin}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "edges" not in doc:
        raise ValidationError(f"{origin}: JSON topology needs an 'edges' array")
    header = {k: _HEADER_KEYS[k](doc[k]) for k in _HEADER_KEYS if k in doc}
    records = []
    for i, rec in enumerate(doc["edges"]):
        if not isinstance(rec, (list, tuple)) or len(rec) not in (3, 4):
            raise ValidationError(f"{origin}: edge #{i}: expected [u, v, length_km, (p_op)]")
        u, v, length = int(rec[0]), int(rec[1]), float(rec[2])
        p_override = float(rec[3]) if len(rec) == 4 else None
        records.append((i, u, v, length, p_override))
    return _assemble(header, records, origin)


def _assemble(header: dict, records, origin: str) -> Topology:
    if not records:
        raise ValidationError(f"{origin}: no edge records")
    name = header.get("name", "unnamed")
    default_p_op = header.get("p_op", 1.0)
    if not 0.0 <= default_p_op <= 1.0:
        raise ValidationError(f"{origin}: p_op {default_p_op} outside [0, 1]")
    uniform_p = header.get("uniform_p")
    if uniform_p is not None and not 0.0 <= uniform_p <= 1.0:
        raise ValidationError(f"{origin}: uniform_p {uniform_p} outside [0, 1]")
    max_node = max(max(u, v) for _, u, v, _, _ in records)
    n_nodes = max_node + 1
    edges = []
    for line_no, u, v, length, p_override in records:
        try:
            edges.append(Edge.make(u, v, length, p_override if p_override is not None
                                   else default_p_op, p_e=uniform_p))
        except ValidationError as exc:
            raise ValidationError(f"{origin}:{line_no}: {exc}") from None
    edges.sort(key=lambda e: (e.u, e.v))
    try:
        topo = Topology(name, n_nodes, edges, default_p_op)
    except ValidationError as exc:
        raise ValidationError(f"{origin}: {exc}") from None
    _check_declared(topo, header, origin)
    return topo


def _check_declared(topo: Topology, header: dict, origin: str) -> None:
    stats = catalog_stats(topo)
    if "expected_nodes" in header and stats.node_count != header["expected_nodes"]:
        raise ValidationError(
            f"{origin}: declared {header['expected_nodes']} nodes, found {stats.node_count}")
    if "expected_edges" in header and stats.edge_count != header["expected_edges"]:
        raise ValidationError(
            f"{origin}: declared {header['expected_edges']} edges, found {stats.edge_count}")
    if "expected_mean_length_km" in header:
        want = header["expected_mean_length_km"]
        if abs(stats.mean_edge_length_km - want) > max(0.01 * want, 1e-9):
            raise ValidationError(
                f"{origin}: mean edge length {stats.mean_edge_length_km:.4f} km differs "
                f"from declared {want} km by more than 1%")
    if "expected_mean_degree" in header:
        want = header["expected_mean_degree"]
        if abs(stats.mean_nodal_degree - want) > 0.01:
            raise ValidationError(
                f"{origin}: mean degree {stats.mean_nodal_degree:.4f} differs from "
                f"declared {want} by more than 0.01")


def serialize_topology(t: Topology, fmt: str = "text") -> str:
    """Serialize to the text or JSON document format (semantic round-trip)."""
    uniform = None
    if t.edges and all(e.p_e_overridden for e in t.edges):
        values = {e.p_e for e in t.edges}
        if len(values) == 1:
            uniform = values.pop()
    if fmt == "json":
        edges = []
        for e in t.edges:
            rec = [e.u, e.v, e.length_km]
            if e.p_op != t.default_p_op:
                rec.append(e.p_op)
            edges.append(rec)
        doc = {"name": t.name, "p_op": t.default_p_op, "edges": edges}
        if uniform is not None:
            doc["uniform_p"] = uniform
        return json.dumps(doc, indent=2)
    if fmt != "text":
        raise ValidationError(f"unknown topology format {fmt!r}")
    lines = [f"name {t.name}", f"p_op {t.default_p_op!r}"]
    if uniform is not None:
        lines.append(f"uniform_p {uniform!r}")
    for e in t.edges:
        rec = f"{e.u} {e.v} {e.length_km!r}"
        if e.p_op != t.default_p_op:
            rec += f" {e.p_op!r}"
        lines.append(rec)
    return "\n".join(lines) + "\n"
