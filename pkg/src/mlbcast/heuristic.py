"""General-dimension broadcast planner.

Builds one candidate transmission subgraph per node: the cheapest path
from the source to that node, joined with a degree-capped spanning tree of
the remaining nodes rooted there. The demand is then split across the
subgraphs either by the min-max LP or -- when the instance admits one --
by solving the equal-energy linear system directly. On the regular line
this reproduces the closed-form optimum exactly; in higher dimensions it
is a heuristic.
"""
from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass

import numpy as np

from .model import (
    ALG_TOL,
    BroadcastPlan,
    EnergyReport,
    Network,
    PlanPart,
    node_energy,
)
from .oracle import LpSolution, lp_minmax

MAX_OUT_DEGREE = 2


@dataclass(frozen=True)
class CompositeGraph:
    """Path from the source to ``target`` plus a spanning tree of the rest.

    The tree is rooted at ``target`` and spans every node not interior to
    the path, so the union delivers data from the source to all nodes. The
    target's own composite degenerates to the source-rooted tree alone.
    """

    source: int
    target: int
    path: tuple[int, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        path_edges = tuple(zip(self.path[:-1], self.path[1:]))
        return path_edges + self.tree_edges


def shortest_path(net: Network, k: int, r: int) -> tuple[int, ...]:
    """Cheapest node sequence from k to r by summed edge cost.

    Ties are broken by fewer hops, then by the lexicographically smallest
    node sequence (Dijkstra over the tuple order (cost, hops, path)).
    """
    if k == r:
        raise ValueError("source and target must differ")
    costs = net.cost_matrix
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {}
    heap = [(0.0, 0, (k,))]
    while heap:
        label = heapq.heappop(heap)
        cost, hops, path = label
        u = path[-1]
        if u in best and best[u] < label:
            continue
        if u == r:
            return path
        for v in range(1, net.n + 1):
            if v in path:
                continue
            candidate = (cost + costs[u - 1, v - 1], hops + 1, path + (v,))
            if v not in best or candidate < best[v]:
                best[v] = candidate
                heapq.heappush(heap, candidate)
    raise AssertionError("complete graph left a node unreachable")


def path_cost(net: Network, path) -> float:
    return sum(net.cost(i, j) for i, j in zip(path[:-1], path[1:]))


def constrained_mst(net: Network, restrict_to, root: int,
                    max_out: int = MAX_OUT_DEGREE) -> tuple[tuple[int, int], ...]:
    """Greedy rooted spanning tree over ``restrict_to`` with capped out-degree.

    Repeatedly attaches the globally cheapest edge from an attached node
    with spare out-degree to an unattached node; ties break on (cost,
    sender, receiver). The attachment order is the transmission schedule.
    Degree-capped minimum spanning trees are hard in general, so this is a
    deterministic heuristic, not an exact minimizer.
    """
    nodes = sorted(set(int(v) for v in restrict_to))
    if root not in nodes:
        raise ValueError(f"root {root} not in the restricted node set")
    costs = net.cost_matrix
    attached = [root]
    out_degree = {root: 0}
    remaining = [v for v in nodes if v != root]
    edges = []
    while remaining:
        best = None
        for i in attached:
            if out_degree[i] >= max_out:
                continue
            for j in remaining:
                candidate = (costs[i - 1, j - 1], i, j)
                if best is None or candidate < best:
                    best = candidate
        _, i, j = best
        edges.append((i, j))
        out_degree[i] += 1
        out_degree[j] = 0
        attached.append(j)
        remaining.remove(j)
    return tuple(edges)


def _is_path(edges) -> bool:
    out_degree: dict[int, int] = {}
    for i, _ in edges:
        out_degree[i] = out_degree.get(i, 0) + 1
        if out_degree[i] > 1:
            return False
    return True


def build_graphs(net: Network, k: int) -> list[CompositeGraph]:
    """Candidate subgraphs for source ``k``, one per node.

    When the source-rooted degree-capped tree is already a path it is the
    whole plan, and the list degenerates to that single entry.
    """
    all_nodes = range(1, net.n + 1)
    root_tree = constrained_mst(net, all_nodes, k)
    source_graph = CompositeGraph(k, k, (k,), root_tree)
    if _is_path(root_tree):
        return [source_graph]
    graphs = []
    for r in all_nodes:
        if r == k:
            graphs.append(source_graph)
            continue
        path = shortest_path(net, k, r)
        interior = set(path) - {r}
        residual = [v for v in all_nodes if v not in interior]
        tree = constrained_mst(net, residual, r)
        graphs.append(CompositeGraph(k, r, path, tree))
    return graphs


def energy_columns(net: Network, graphs) -> np.ndarray:
    """Per-node energy of one unit of data on each composite subgraph."""
    c = np.zeros((net.n, len(graphs)))
    for r, graph in enumerate(graphs):
        for i, j in graph.edges:
            c[i - 1, r] += net.cost_matrix[i - 1, j - 1]
    return c


def optimize_weights(net: Network, graphs, demand: float):
    """Min-max weight assignment over the composite subgraphs via the LP.

    Returns ``(plan, report, lp)``; the plan keeps all subgraphs, including
    any the optimizer weighted zero.
    """
    if not graphs:
        raise ValueError("need at least one candidate subgraph")
    columns = energy_columns(net, graphs)
    lp = lp_minmax(columns, demand)
    weights = np.clip(lp.weights, 0.0, None)
    parts = tuple(PlanPart(w, g.edges) for w, g in zip(weights, graphs))
    plan = BroadcastPlan(graphs[0].source, demand, parts)
    report = node_energy(net, plan)
    return plan, report, lp


@dataclass(frozen=True)
class EqualEnergyOutcome:
    """Result of the direct equal-energy attempt; ``weights`` is None when
    the instance admits no such solution and the LP should be used."""

    weights: np.ndarray | None
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.weights is not None


def equal_energy_solve(net: Network, graphs, demand: float) -> EqualEnergyOutcome:
    """Solve for weights that equalize every node's energy exactly.

    The system pairs the demand constraint with N-1 energy-difference
    equations. Fails (without raising) when the system is singular, badly
    conditioned, or yields negative weights.
    """
    n = net.n
    if len(graphs) != n:
        raise ValueError(f"need exactly {n} subgraphs, got {len(graphs)}")
    columns = energy_columns(net, graphs)
    system = np.vstack([np.ones(n), columns[:-1] - columns[1:]])
    rhs = np.zeros(n)
    rhs[0] = demand
    try:
        weights = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return EqualEnergyOutcome(None, "singular equalization system")
    residual = np.abs(system @ weights - rhs).max()
    scale = max(abs(demand), float(np.abs(columns).max()), 1.0)
    if not np.isfinite(weights).all() or residual > 1e-9 * scale:
        return EqualEnergyOutcome(None, "ill-conditioned equalization system")
    if weights.min() < -ALG_TOL:
        return EqualEnergyOutcome(
            None, f"equalization needs a negative weight ({weights.min():.3e})"
        )
    weights = np.clip(weights, 0.0, None)
    weights *= demand / weights.sum()
    return EqualEnergyOutcome(weights, None)


@dataclass
class HeuristicSolution:
    plan: BroadcastPlan
    report: EnergyReport
    stats: dict


def solve(net: Network, k: int, demand: float = 1.0, weights: str = "lp",
          battery: float | None = None) -> HeuristicSolution:
    """Plan a broadcast from node ``k`` with the composite-subgraph heuristic.

    ``weights`` selects how the demand is split: ``"lp"`` for the min-max
    program, ``"equal-energy"`` to try the direct linear system first and
    fall back to the LP when it fails.
    """
    if weights not in ("lp", "equal-energy"):
        raise ValueError(f"unknown weight method {weights!r}")
    if net.dim >= 2 and any(a < 2 for lam, a in net.cost_model.terms if lam > 0):
        warnings.warn(
            "cost exponents below 2 are not superadditive in dimension >= 2; "
            "multi-hop relaying may be mispriced",
            stacklevel=2,
        )
    graphs = build_graphs(net, k)
    stats: dict = {
        "early_exit": len(graphs) == 1,
        "weights_method": weights,
        "targets": [
            {
                "target": g.target,
                "path": list(g.path),
                "path_cost": path_cost(net, g.path),
                "tree_cost": sum(net.cost(i, j) for i, j in g.tree_edges),
            }
            for g in graphs
        ],
    }
    if len(graphs) == 1:
        plan = BroadcastPlan(k, demand, (PlanPart(demand, graphs[0].edges),))
        report = node_energy(net, plan, battery)
        stats["weights_method"] = "path"
        stats["lp_iterations"] = 0
        return HeuristicSolution(plan, report, stats)

    lp: LpSolution | None = None
    if weights == "equal-energy":
        outcome = equal_energy_solve(net, graphs, demand)
        if outcome.ok:
            parts = tuple(
                PlanPart(w, g.edges) for w, g in zip(outcome.weights, graphs)
            )
            plan = BroadcastPlan(k, demand, parts)
            report = node_energy(net, plan, battery)
            _, lp_report, lp = optimize_weights(net, graphs, demand)
            stats["lp_iterations"] = lp.iterations
            gap = report.objective - lp_report.objective
            if gap > 1e-9 * max(1.0, lp_report.objective):
                warnings.warn(
                    f"equal-energy solution is {gap:.3e} above the min-max "
                    f"optimum for this instance",
                    stacklevel=2,
                )
            return HeuristicSolution(plan, report, stats)
        stats["equal_energy_fallback"] = outcome.reason
    plan, report, lp = optimize_weights(net, graphs, demand)
    if battery is not None:
        report = node_energy(net, plan, battery)
    stats["lp_iterations"] = lp.iterations
    return HeuristicSolution(plan, report, stats)
