"""Maximum-lifetime broadcast planning for wireless sensor networks.

Find transmission plans that deliver a broadcast from one node to every
other node while minimizing the largest per-node energy drain -- the
quantity that decides how many broadcast rounds the network survives.
Three solver families are provided and cross-validated: exact closed
forms on regular line networks, a brute-force spanning-tree oracle for
small instances, and a composite-subgraph heuristic for any dimension.
"""
from .model import (
    BroadcastPlan,
    CostModel,
    EnergyReport,
    Network,
    PlanPart,
    RootedTree,
    check_superadditive,
    flow_matrix,
    grid_network,
    lifetime_cycles,
    load_network,
    load_plan,
    node_energy,
    random_network,
    regular_line_network,
    save_network,
    save_plan,
    verify_broadcast,
)
from .analytic1d import (
    LineSolution,
    asymptotic_energy,
    border_solution,
    internal_solution,
    solve_line,
)
from .oracle import enumerate_trees, lp_minmax, solve_exact
from .heuristic import build_graphs, equal_energy_solve, optimize_weights
from .wma import (
    Antenna,
    wma_bidirectional_solution,
    wma_directional_solution,
    wma_edge_costs,
    wma_node_energy,
)

__version__ = "0.1.0"

__all__ = [
    "Antenna",
    "BroadcastPlan",
    "CostModel",
    "EnergyReport",
    "LineSolution",
    "Network",
    "PlanPart",
    "RootedTree",
    "asymptotic_energy",
    "border_solution",
    "build_graphs",
    "check_superadditive",
    "enumerate_trees",
    "equal_energy_solve",
    "flow_matrix",
    "grid_network",
    "internal_solution",
    "lifetime_cycles",
    "load_network",
    "load_plan",
    "lp_minmax",
    "node_energy",
    "optimize_weights",
    "random_network",
    "regular_line_network",
    "save_network",
    "save_plan",
    "solve_exact",
    "solve_line",
    "verify_broadcast",
    "wma_bidirectional_solution",
    "wma_directional_solution",
    "wma_edge_costs",
    "wma_node_energy",
]
