"""Fuzzy-logic cluster-head election for wireless sensor networks.

DCHFC pipeline (trust filtering, fuzzy Potential, spatially spread heads,
nearest-head clustering) plus the CHUFL baseline and a round-based
energy simulator.
"""
from .config import EnergyModel, FuzzyConfig, SimConfig, load_config
from .election import (
    ElectionConfig,
    ElectionResult,
    assign_clusters,
    select_heads_chufl,
    select_heads_dchfc,
)
from .fuzzy import (
    AggregatedFuzzySet,
    LinguisticVariable,
    MembershipFunction,
    Rule,
    RuleBase,
    default_rulebase,
    defuzzify_centroid,
    infer,
    membership,
)
from .potential import NodeInputs, PotentialScore, reachability, reception_power, score_all
from .simulation import (
    ComparisonReport,
    LifetimeReport,
    Mode,
    RoundMetrics,
    compare,
    run_round,
    run_simulation,
    tx_cost,
)
from .topology import ConfigError, Node, NodeStatus, Position, Topology, distance, generate_topology, neighbors
from .trust import TrustConfig, detect_malicious, trust_factor

__version__ = "0.1.0"
