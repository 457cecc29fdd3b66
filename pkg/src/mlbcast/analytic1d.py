"""Closed-form broadcast plans on the regular line network.

For a line of N nodes at unit spacing the optimal plan is known exactly:
a border source sends everything down the next-hop path, while an internal
source splits the demand across N trees -- one per node -- with weights
chosen so that every node spends the same energy. The large-N limit of
that per-node energy is available in two variants (see
:func:`asymptotic_energy`).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .model import (
    DEFAULT_COST_MODEL,
    BroadcastPlan,
    CostModel,
    EnergyReport,
    PlanPart,
    RootedTree,
    node_energy,
    regular_line_network,
)


@dataclass(frozen=True)
class LineSolution:
    """Optimal line-network plan: one tree per part plus its data weight."""

    n: int
    k: int
    demand: float
    trees: tuple[RootedTree, ...]
    weights: tuple[float, ...]
    report: EnergyReport

    @property
    def plan(self) -> BroadcastPlan:
        parts = tuple(
            PlanPart(w, t.edges) for w, t in zip(self.weights, self.trees)
        )
        return BroadcastPlan(self.k, self.demand, parts)

    @property
    def objective(self) -> float:
        return self.report.objective


def line_costs(model: CostModel, n: int) -> np.ndarray:
    """Hop costs on the line: entry r is the cost of a distance-r transmission."""
    return model.cost_array(np.arange(n + 1, dtype=float))


def _check_line_args(n: int, k: int, demand: float) -> None:
    if n < 2:
        raise ValueError(f"line network needs at least 2 nodes, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"source {k} out of range 1..{n}")
    if demand < 0:
        raise ValueError(f"demand must be nonnegative, got {demand}")


def _left_chain(k: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, i - 1) for i in range(k, 1, -1))


def _right_chain(k: int, n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, i + 1) for i in range(k, n))


def internal_trees(n: int, k: int) -> tuple[RootedTree, ...]:
    """The N transmission trees of the internal-source solution.

    Tree r < k: next-hop chain to the left end, then the long edge
    (r, k+1), then the chain on to the right end. Tree r = k: both
    next-hop chains. Tree r > k mirrors tree r < k.
    """
    trees = []
    for r in range(1, n + 1):
        if r < k:
            edges = _left_chain(k) + ((r, k + 1),) + _right_chain(k + 1, n)
        elif r == k:
            edges = _left_chain(k) + _right_chain(k, n)
        else:
            edges = _right_chain(k, n) + ((r, k - 1),) + _left_chain(k - 1)
        tree = RootedTree(k, edges)
        tree.validate(n)
        trees.append(tree)
    return tuple(trees)


def source_part_weight(n: int, k: int, demand: float, model: CostModel) -> float:
    """Weight of the source's own two-chain tree in the internal solution."""
    costs = line_costs(model, n)
    e1 = costs[1]
    left = sum(e1 / costs[i] for i in range(1, k + 1))
    right = sum(e1 / costs[i] for i in range(1, n - k + 2))
    numerator = 1.0 - e1 / costs[k] - e1 / costs[n - k + 1]
    denominator = -1.0 + left + right
    return demand * numerator / denominator


def internal_weights(n: int, k: int, demand: float, model: CostModel) -> np.ndarray:
    """Data weights for the N internal-source trees (index r-1 is tree r)."""
    costs = line_costs(model, n)
    e1 = costs[1]
    qkk = source_part_weight(n, k, demand, model)
    weights = np.zeros(n)
    weights[k - 1] = qkk
    weights[0] = e1 / costs[k] * (qkk + demand)
    for r in range(2, k):
        weights[r - 1] = e1 / costs[k + 1 - r] * qkk
    for r in range(k + 1, n):
        weights[r - 1] = e1 / costs[r - k + 1] * qkk
    weights[n - 1] = e1 / costs[n - k + 1] * (qkk + demand)
    return weights


def internal_objective(n: int, k: int, demand: float, model: CostModel) -> float:
    """Equal per-node energy of the internal solution, without building it."""
    e1 = float(model.cost(1.0))
    return e1 * (source_part_weight(n, k, demand, model) + demand)


def border_solution(n: int, k: int, demand: float = 1.0,
                    model: CostModel | None = None) -> LineSolution:
    """Optimal plan for a border source: the single next-hop path."""
    model = model or DEFAULT_COST_MODEL
    _check_line_args(n, k, demand)
    if k not in (1, n):
        raise ValueError(f"source {k} is not a border node of a {n}-node line")
    if k == 1:
        edges = tuple((i, i + 1) for i in range(1, n))
    else:
        edges = tuple((i, i - 1) for i in range(n, 1, -1))
    tree = RootedTree(k, edges)
    net = regular_line_network(n, model)
    plan = BroadcastPlan(k, demand, (PlanPart(demand, edges),))
    report = node_energy(net, plan)
    return LineSolution(n, k, demand, (tree,), (float(demand),), report)


def internal_solution(n: int, k: int, demand: float = 1.0,
                      model: CostModel | None = None) -> LineSolution:
    """Optimal equal-energy plan for an internal source on the line."""
    model = model or DEFAULT_COST_MODEL
    _check_line_args(n, k, demand)
    if k in (1, n):
        raise ValueError(
            f"source {k} is a border node; use border_solution instead"
        )
    trees = internal_trees(n, k)
    weights = internal_weights(n, k, demand, model)
    net = regular_line_network(n, model)
    parts = tuple(PlanPart(w, t.edges) for w, t in zip(weights, trees))
    plan = BroadcastPlan(k, demand, parts)
    report = node_energy(net, plan)
    return LineSolution(n, k, demand, trees, tuple(float(w) for w in weights), report)


def solve_line(n: int, k: int, demand: float = 1.0,
               model: CostModel | None = None) -> LineSolution:
    """Dispatch to the border or internal closed form based on the source."""
    if k in (1, n):
        return border_solution(n, k, demand, model)
    return internal_solution(n, k, demand, model)


# ---------------------------------------------------------------------------
# Large-N limit
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _hop_cost_series(terms: tuple[tuple[float, float], ...]) -> float:
    """Sum over r >= 1 of cost(1)/cost(r), Euler-Maclaurin accelerated."""
    with mp.workdps(30):
        e1 = sum(mp.mpf(lam) for lam, _ in terms)

        def f(i):
            return e1 / sum(mp.mpf(lam) * i**mp.mpf(a) for lam, a in terms)

        return float(mp.nsum(f, [1, mp.inf], method="e"))


def series_diverges(model: CostModel) -> bool:
    """True when the reciprocal hop-cost series has no finite sum, which
    happens exactly when every contributing exponent equals one."""
    effective = [a for lam, a in model.terms if lam > 0]
    return max(effective) <= 1.0 + 1e-12


def asymptotic_energy(k: int, model: CostModel,
                      variant: str = "consistent") -> float:
    """Per-unit-demand node energy of the internal solution as N grows.

    ``consistent`` takes the genuine limit of the finite-N formulas, whose
    denominator carries a leading -1. ``as_printed`` evaluates the published
    closed form, which drops that -1 and therefore disagrees with the
    finite-N sequence; it is kept for reference. When the reciprocal
    hop-cost series diverges (purely linear cost) both variants collapse to
    the unit-hop energy.
    """
    if k < 2:
        raise ValueError(f"internal source index must be >= 2, got {k}")
    if variant not in ("consistent", "as_printed"):
        raise ValueError(f"unknown variant {variant!r}")
    e1 = float(model.cost(1.0))
    if series_diverges(model):
        return e1
    series = _hop_cost_series(model.terms)
    head = sum(e1 / model.cost(float(i)) for i in range(1, k + 1))
    numerator = 1.0 - e1 / model.cost(float(k))
    if variant == "consistent":
        denominator = -1.0 + head + series
    else:
        denominator = head + series
    return e1 * (1.0 + numerator / denominator)
