"""Point-to-multipoint transmission semantics.

When a node transmits, every node inside the transmission's geometric
footprint receives the data for free: a bidirectional antenna covers the
closed ball of the transmission radius, a directional antenna (defined in
one dimension only) the segment toward the receiver. The effective cost of
an edge therefore depends on the transmission schedule -- the order of the
edges in the tree -- and earlier, paid transmissions can make later ones
free. Zero-cost transmissions grant no coverage.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .analytic1d import LineSolution, border_solution, internal_solution
from .model import (
    DEFAULT_COST_MODEL,
    BroadcastPlan,
    EnergyReport,
    Network,
    PlanPart,
    RootedTree,
    regular_line_network,
)

# A rooted tree's edge sequence already is its transmission schedule.
OrderedTree = RootedTree


class Antenna(enum.Enum):
    BIDIRECTIONAL = "bidirectional"
    DIRECTIONAL = "directional"


@dataclass(frozen=True)
class EffectiveCosts:
    """Schedule-aware edge costs plus the coverage each edge contributed."""

    costs: tuple[float, ...]
    coverage: tuple[frozenset[int], ...]


def coverage_set(net: Network, i: int, j: int, antenna: Antenna) -> frozenset[int]:
    """Nodes that receive a transmission from i to j at no extra cost."""
    radius = net.distance(i, j)
    if antenna is Antenna.BIDIRECTIONAL:
        deltas = net.nodes - net.nodes[i - 1]
        dist = np.sqrt((deltas * deltas).sum(axis=1))
        return frozenset(int(m) + 1 for m in np.nonzero(dist <= radius)[0])
    if antenna is Antenna.DIRECTIONAL:
        if net.dim != 1:
            raise ValueError(
                "directional coverage is only defined for 1-D networks"
            )
        xi = net.nodes[i - 1, 0]
        xj = net.nodes[j - 1, 0]
        side = xj - xi
        covered = []
        for m in range(1, net.n + 1):
            delta = net.nodes[m - 1, 0] - xi
            if delta * side > 0 and abs(delta) <= radius:
                covered.append(m)
        return frozenset(covered)
    raise ValueError(f"unknown antenna {antenna!r}")


def wma_edge_costs(net: Network, schedule, antenna: Antenna | None) -> EffectiveCosts:
    """Effective per-edge costs of a scheduled transmission sequence.

    An edge is free when its receiver already sits in the union of the
    coverage sets of earlier paid edges; free (and raw-zero-cost) edges
    contribute no coverage themselves. ``antenna=None`` disables coverage
    entirely, reproducing plain point-to-point costs.
    """
    edges = schedule.edges if isinstance(schedule, RootedTree) else tuple(schedule)
    costs = []
    coverages = []
    covered: set[int] = set()
    for i, j in edges:
        raw = net.cost(i, j)
        if antenna is None:
            costs.append(raw)
            coverages.append(frozenset())
            continue
        if j in covered or raw <= 0.0:
            costs.append(0.0)
            coverages.append(frozenset())
            continue
        costs.append(raw)
        contribution = coverage_set(net, i, j, antenna)
        coverages.append(contribution)
        covered |= contribution
    return EffectiveCosts(tuple(costs), tuple(coverages))


def wma_node_energy(net: Network, plan: BroadcastPlan,
                    antenna: Antenna | None,
                    battery: float | None = None) -> EnergyReport:
    """Per-node energies under schedule-aware costs.

    Each part is an independent transmission: coverage does not carry over
    between parts. Part edges must form a feasible schedule from the
    source (senders transmit only after receiving).
    """
    plan.validate(net.n)
    energies = np.zeros(net.n)
    for idx, part in enumerate(plan.parts):
        have = {plan.source}
        for i, j in part.edges:
            if i not in have:
                raise ValueError(
                    f"part {idx}: node {i} transmits before receiving"
                )
            have.add(j)
        effective = wma_edge_costs(net, part.edges, antenna)
        for (i, _j), cost in zip(part.edges, effective.costs):
            energies[i - 1] += part.weight * cost
    return EnergyReport.from_energies(energies, battery)


def equivalent_schedules(net: Network, first, second,
                         antenna: Antenna | None, tol: float = 1e-12) -> bool:
    """Whether two schedules of the same tree cost every node the same."""
    edges_a = first.edges if isinstance(first, RootedTree) else tuple(first)
    edges_b = second.edges if isinstance(second, RootedTree) else tuple(second)
    if set(edges_a) != set(edges_b):
        raise ValueError("schedules must order the same edge set")
    costs_a = wma_edge_costs(net, edges_a, antenna)
    costs_b = wma_edge_costs(net, edges_b, antenna)
    per_node_a = np.zeros(net.n)
    per_node_b = np.zeros(net.n)
    for (i, _), c in zip(edges_a, costs_a.costs):
        per_node_a[i - 1] += c
    for (i, _), c in zip(edges_b, costs_b.costs):
        per_node_b[i - 1] += c
    return bool(np.all(np.abs(per_node_a - per_node_b) <= tol))


# ---------------------------------------------------------------------------
# Closed-form solutions on the regular line
# ---------------------------------------------------------------------------

def wma_bidirectional_solution(n: int, k: int, demand: float = 1.0,
                               model=None) -> LineSolution:
    """Optimal broadcast under bidirectional coverage on the line.

    An internal source pays for one unit-hop transmission and reaches both
    neighbors at once (the second outgoing edge is free), after which two
    next-hop chains fan out; the whole plan is a single tree of weight
    ``demand`` with objective ``cost(1) * demand``. Border sources fall
    back to the path plan, which no antenna can improve.
    """
    model = model or DEFAULT_COST_MODEL
    if k in (1, n):
        sol = border_solution(n, k, demand, model)
        net = regular_line_network(n, model)
        report = wma_node_energy(net, sol.plan, Antenna.BIDIRECTIONAL)
        return LineSolution(n, k, demand, sol.trees, sol.weights, report)
    edges = tuple((i, i - 1) for i in range(k, 1, -1))
    edges += tuple((i, i + 1) for i in range(k, n))
    tree = RootedTree(k, edges)
    tree.validate(n)
    net = regular_line_network(n, model)
    plan = BroadcastPlan(k, demand, (PlanPart(demand, edges),))
    report = wma_node_energy(net, plan, Antenna.BIDIRECTIONAL)
    return LineSolution(n, k, demand, (tree,), (float(demand),), report)


def wma_directional_solution(n: int, k: int, demand: float = 1.0,
                             model=None) -> LineSolution:
    """Optimal broadcast under directional coverage on the line.

    Coincides with the point-to-point internal solution: none of its long
    edges aim at a receiver an earlier, shorter same-side transmission
    already covered, so the directional energies equal the point-to-point
    ones. Raises for border sources, like the internal closed form.
    """
    model = model or DEFAULT_COST_MODEL
    sol = internal_solution(n, k, demand, model)
    net = regular_line_network(n, model)
    report = wma_node_energy(net, sol.plan, Antenna.DIRECTIONAL)
    return LineSolution(n, k, demand, sol.trees, sol.weights, report)
