"""Trial-level distribution protocols.

Four ways to turn per-slot entanglement links into one shared GHZ state
among a user set S:

* ``SP``    - a centre node and edge-disjoint shortest paths are fixed up
  front on the full topology; each slot, any user whose whole path is
  present swaps it into a user-centre Bell pair. Delivered pairs park in
  end-node memories (exempt from the cut-off, but blocking their terminal
  edges) until every user holds one and fusion emits the GHZ state.
  A variant (``sp_tree=True``) fixes the minimum spanning Steiner tree
  instead and requires all of its links in one slot, with no centre.
* ``MP-G+`` - same centre, but paths are recomputed every slot on the
  current link subgraph for the users still unserved, serving as many as
  possible with the fewest links (unit-capacity min-cost max-flow).
* ``MP-C``  - no centre: succeed in the first slot whose link subgraph
  connects all users, consuming a low-cost Steiner tree.
* ``MP-P``  - like MP-C, but keeps extracting edge-disjoint trees within
  the success slot; each tree is one GHZ state.

Entanglement rate over many trials is total GHZ states over total
timeslots; failed trials contribute zero states and the full timeslot
budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _engine, routing
from .errors import InfeasibleScenarioError, ValidationError
from .topology import Topology

PROTOCOL_NAMES = ("SP", "SP-tree", "MP-G+", "MP-C", "MP-P")

DEFAULT_MAX_TIMESLOTS = 5000


@dataclass(frozen=True)
class ProtocolConfig:
    """Per-trial protocol parameters.

    ``q_c`` is the cut-off in timeslots (``None`` for unbounded storage);
    ``sp_tree`` switches the SP runner to its Steiner-tree variant.
    """

    users: tuple
    q_c: int | None = 1
    max_timeslots: int = DEFAULT_MAX_TIMESLOTS
    sp_tree: bool = False

    def __post_init__(self):
        users = tuple(sorted(set(self.users)))
        object.__setattr__(self, "users", users)
        if len(users) < 2:
            raise ValidationError("need at least two distinct users")
        if self.q_c is not None and self.q_c < 1:
            raise ValidationError(f"q_c must be >= 1 or None, got {self.q_c}")
        if self.max_timeslots < 1:
            raise ValidationError("max_timeslots must be >= 1")


@dataclass(frozen=True)
class ProtocolOutcome:
    succeeded: bool
    timeslots_used: int
    ghz_count: int
    ghz_sizes: tuple = field(default_factory=tuple)


def _check_users(t: Topology, cfg: ProtocolConfig) -> None:
    for u in cfg.users:
        if not 0 <= u < t.n_nodes:
            raise ValidationError(f"user {u} outside node range 0..{t.n_nodes - 1}")


def _qc_code(q_c) -> int:
    return 0 if q_c is None else int(q_c)


def _outcome(cfg: ProtocolConfig, raw) -> ProtocolOutcome:
    succeeded, slots, ghz = raw
    sizes = (len(cfg.users),) * ghz
    return ProtocolOutcome(bool(succeeded), int(slots), int(ghz), sizes)


def run_sp(t: Topology, cfg: ProtocolConfig, rng, engine: str = "auto") -> ProtocolOutcome:
    """Precomputed-route protocol (centre paths, or fixed tree with sp_tree)."""
    _check_users(t, cfg)
    eng = _engine.get_engine(engine)
    if cfg.sp_tree:
        tree = routing.steiner_tree(t.view(), cfg.users)
        if tree is None:
            raise InfeasibleScenarioError("users are not connected in the topology")
        raw = eng.run_trial(t, _engine.PROTO_CODES["SP-tree"], cfg.users,
                            _qc_code(cfg.q_c), cfg.max_timeslots, rng,
                            tree=tree.edges)
        return _outcome(cfg, raw)
    centre, solution = routing.select_centre_with_paths(t, cfg.users)
    paths = {u: p for u, p in solution.paths.items() if u != centre}
    raw = eng.run_trial(t, _engine.PROTO_CODES["SP"], cfg.users,
                        _qc_code(cfg.q_c), cfg.max_timeslots, rng,
                        centre=centre, paths=paths)
    return _outcome(cfg, raw)


def run_mp_gplus(t: Topology, cfg: ProtocolConfig, rng, engine: str = "auto") -> ProtocolOutcome:
    """Centre-based multipath protocol with per-slot rerouting."""
    _check_users(t, cfg)
    centre = routing.select_centre_with_paths(t, cfg.users)[0]
    eng = _engine.get_engine(engine)
    raw = eng.run_trial(t, _engine.PROTO_CODES["MP-G+"], cfg.users,
                        _qc_code(cfg.q_c), cfg.max_timeslots, rng, centre=centre)
    return _outcome(cfg, raw)


def run_mp_c(t: Topology, cfg: ProtocolConfig, rng, engine: str = "auto") -> ProtocolOutcome:
    """Cooperative multipath protocol (single Steiner tree per success)."""
    _check_users(t, cfg)
    eng = _engine.get_engine(engine)
    raw = eng.run_trial(t, _engine.PROTO_CODES["MP-C"], cfg.users,
                        _qc_code(cfg.q_c), cfg.max_timeslots, rng)
    return _outcome(cfg, raw)


def run_mp_p(t: Topology, cfg: ProtocolConfig, rng, engine: str = "auto") -> ProtocolOutcome:
    """Packing multipath protocol (all edge-disjoint trees in the slot)."""
    _check_users(t, cfg)
    eng = _engine.get_engine(engine)
    raw = eng.run_trial(t, _engine.PROTO_CODES["MP-P"], cfg.users,
                        _qc_code(cfg.q_c), cfg.max_timeslots, rng)
    return _outcome(cfg, raw)


def run_protocol(name: str, t: Topology, cfg: ProtocolConfig, rng,
                 engine: str = "auto") -> ProtocolOutcome:
    if name == "SP":
        return run_sp(t, cfg, rng, engine)
    if name == "SP-tree":
        if not cfg.sp_tree:
            cfg = ProtocolConfig(cfg.users, cfg.q_c, cfg.max_timeslots, sp_tree=True)
        return run_sp(t, cfg, rng, engine)
    if name == "MP-G+":
        return run_mp_gplus(t, cfg, rng, engine)
    if name == "MP-C":
        return run_mp_c(t, cfg, rng, engine)
    if name == "MP-P":
        return run_mp_p(t, cfg, rng, engine)
    raise ValidationError(f"unknown protocol {name!r} (expected one of {PROTOCOL_NAMES})")
