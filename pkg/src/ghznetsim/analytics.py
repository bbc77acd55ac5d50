"""Closed-form and semi-analytical entanglement-rate estimators.

These complement the Monte Carlo harness: a product form for the
precomputed-path protocol, the steady-state link occupancy under the
cut-off model, a cut-based upper bound, and a component-size
approximation for the cooperative protocol with randomly placed users.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine, routing
from .errors import ValidationError
from .topology import Topology


def sp_analytic_er(route) -> float:
    """Entanglement rate of a fixed route with single-slot storage:
    the product of per-edge link probabilities."""
    probs = [e.p_e if hasattr(e, "p_e") else float(e) for e in route]
    if not probs:
        raise ValidationError("route must contain at least one edge")
    out = 1.0
    for p in probs:
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"edge probability {p} outside [0, 1]")
        out *= p
    return out


def expected_link_presence(p: float, q_c: int | None) -> float:
    """Steady-state probability that an uncontended edge holds a link.

    Generation attempts run only while the edge is free, and a generated
    link occupies the edge for ``q_c`` slots, so the occupied fraction is
    p*q_c / (1 + p*(q_c - 1)). ``q_c=None`` gives the unbounded limit.
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must be in [0, 1], got {p}")
    if q_c is None:
        return 1.0 if p > 0 else 0.0
    if q_c < 1:
        raise ValidationError(f"q_c must be >= 1, got {q_c}")
    return p * q_c / (1.0 + p * (q_c - 1))


def users_in_component_probability(v: int, s: int, c: int) -> float:
    """Probability that ``s`` uniformly placed users all land inside a
    fixed connected component of size ``c`` in a ``v``-node graph.

    Hypergeometric form: of the binom(v, c) equally likely node sets of
    size c, those containing all users number binom(v-s, c-s).
    """
    if not 1 <= s <= v:
        raise ValidationError(f"need 1 <= s <= v, got s={s}, v={v}")
    if not 0 <= c <= v:
        raise ValidationError(f"need 0 <= c <= v, got c={c}")
    if c < s:
        return 0.0
    return math.comb(v - s, c - s) / math.comb(v, c)


@dataclass(frozen=True)
class ComponentDistribution:
    """Empirical distribution of the largest-component size (1..n_nodes)."""

    probabilities: np.ndarray  # index c-1 -> P(C = c)
    sample_count: int

    def probability(self, c: int) -> float:
        if not 1 <= c <= len(self.probabilities):
            return 0.0
        return float(self.probabilities[c - 1])

    def mean(self) -> float:
        sizes = np.arange(1, len(self.probabilities) + 1)
        return float(np.dot(sizes, self.probabilities))


def estimate_component_distribution(t: Topology, p: float | None, q_c: int,
                                    samples: int, rng,
                                    engine: str = "auto") -> ComponentDistribution:
    """Sample the largest-component size of the link subgraph.

    ``p`` overrides every edge probability uniformly; ``None`` keeps the
    topology's own per-edge values. For ``q_c > 1`` each sample is warmed
    for ``10 * q_c`` slots so the per-edge renewal process mixes.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if q_c < 1:
        raise ValidationError(f"q_c must be >= 1, got {q_c}")
    pe = None
    if p is not None:
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"p must be in [0, 1], got {p}")
        pe = np.full(t.n_edges, p, dtype=np.float64)
    warmup = 0 if q_c == 1 else 10 * q_c
    eng = _engine.get_engine(engine)
    sizes = eng.sample_largest_components(t, pe, q_c, warmup, samples, rng)
    counts = np.bincount(sizes, minlength=t.n_nodes + 1)[1:]
    return ComponentDistribution(counts / samples, samples)


def analytic_er_estimate(t: Topology, s: int, dist: ComponentDistribution) -> float:
    """Estimated per-slot GHZ rate for the cooperative protocol with ``s``
    randomly placed users: the chance they all fall in the largest
    component, weighted over its size distribution."""
    if s < 2:
        raise ValidationError(f"need at least two users, got {s}")
    total = 0.0
    for c in range(1, t.n_nodes + 1):
        pc = dist.probability(c)
        if pc > 0.0:
            total += users_in_component_probability(t.n_nodes, s, c) * pc
    return total


def er_upper_bound(t: Topology, users, p: float, q_c: int | None) -> float:
    """Cut bound: no protocol can deliver more GHZ states per slot than the
    weakest user's expected cut capacity."""
    return routing.min_user_cut_bound(t, users) * expected_link_presence(p, q_c)
