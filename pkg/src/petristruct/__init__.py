"""Structural and behavioural analysis of place/transition nets.

Semiflow generating sets, invariant-derived bounds, home spaces and home
states on reachability graphs, and liveness through Karp-Miller trees
rooted at a home state.
"""

from petristruct.net import (
    FiringError,
    Net,
    NetDocument,
    NetError,
    ParseError,
    apply_state_equation,
    classify,
    enabled,
    fire,
    fire_sequence,
    incidence,
    is_siphon,
    is_trap,
    parse_net,
    serialize_net,
)
from petristruct.semiflows import (
    GeneratingSet,
    Ring,
    decompose_over_N,
    decompose_over_Qplus,
    is_semiflow,
    minimal_support_semiflows,
    minimal_supports,
    nonneg_generating_set,
    support_split,
    z_flow_basis,
)
from petristruct.bounds import (
    LinearLevelSet,
    OmegaSystem,
    RationalBound,
    fq_invariant_holds,
    implicit_places,
    is_structurally_bounded,
    lambda_bound,
    level_set,
    marking_bound,
    omega,
    prune_dead_by_threshold,
    structurally_bounded_places,
    theta,
)
from petristruct.graph import (
    Condensation,
    ReachGraph,
    brute_force_home_space,
    build_rg,
    condense,
    home_states,
    initial_is_home_state,
    is_home_space,
    is_strongly_connected,
    live_transitions_exact,
)
from petristruct.coverability import (
    OMEGA,
    CoverTree,
    LivenessVerdict,
    build_lct,
    lct_labels,
    live_via_home_state,
    liveness_report,
)

__version__ = "0.1.0"

__all__ = [
    "FiringError", "Net", "NetDocument", "NetError", "ParseError",
    "apply_state_equation", "classify", "enabled", "fire", "fire_sequence",
    "incidence", "is_siphon", "is_trap", "parse_net", "serialize_net",
    "GeneratingSet", "Ring", "decompose_over_N", "decompose_over_Qplus",
    "is_semiflow", "minimal_support_semiflows", "minimal_supports",
    "nonneg_generating_set", "support_split", "z_flow_basis",
    "LinearLevelSet", "OmegaSystem", "RationalBound", "fq_invariant_holds",
    "implicit_places", "is_structurally_bounded", "lambda_bound", "level_set",
    "marking_bound", "omega", "prune_dead_by_threshold",
    "structurally_bounded_places", "theta",
    "Condensation", "ReachGraph", "brute_force_home_space", "build_rg",
    "condense", "home_states", "initial_is_home_state", "is_home_space",
    "is_strongly_connected", "live_transitions_exact",
    "OMEGA", "CoverTree", "LivenessVerdict", "build_lct", "lct_labels",
    "live_via_home_state", "liveness_report",
]
