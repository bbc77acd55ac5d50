"""Discrete-timeslot Monte Carlo simulator and analytics for multipath
GHZ-state distribution over quantum networks.

Hot trial loops run in a compiled kernel when the extension is built,
with a pure-Python fallback selected at import; see
:func:`active_engine`.
"""

__version__ = "0.1.0"

from ._engine import available_engines, default_engine as active_engine
from .analytics import (
    ComponentDistribution,
    analytic_er_estimate,
    er_upper_bound,
    estimate_component_distribution,
    expected_link_presence,
    sp_analytic_er,
    users_in_component_probability,
)
from .errors import GhzNetError, InfeasibleScenarioError, ProtocolLogicError, ValidationError
from .harness import (
    ErStats,
    Scenario,
    Table,
    analyze,
    compute_er_stats,
    export,
    read_table,
    run_scenario,
    run_trials,
    speedup_report,
    sweep,
    trial_rng,
)
from .netstate import BellPairRecord, LinkStatus, LinkSubgraph, NetworkState
from .protocols import (
    ProtocolConfig,
    ProtocolOutcome,
    run_mp_c,
    run_mp_gplus,
    run_mp_p,
    run_protocol,
    run_sp,
)
from .routing import (
    RoutingSolution,
    SteinerTree,
    disjoint_paths_to_centre,
    greedy_tree_packing,
    has_connecting_tree,
    min_user_cut_bound,
    select_centre_node,
    shortest_path,
    steiner_tree,
)
from .topology import (
    CatalogStats,
    Edge,
    GraphView,
    Topology,
    build_grid,
    catalog_stats,
    edge_success_probability,
    load_topology,
    scale_lengths,
    serialize_topology,
    with_p_op,
    with_uniform_p,
)
