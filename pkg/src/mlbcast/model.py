"""Core data model for broadcast lifetime planning.

A sensor network is a complete weighted digraph over node coordinates in
R^d; the weight of edge (i, j) is the energy needed to push one unit of
data over the distance between the two nodes. A broadcast plan splits the
source's demand across weighted transmission subgraphs. This module holds
the network/plan types, energy accounting, flow aggregation, feasibility
checks, lifetime computation, and the JSON file formats.

Node indices are 1-based everywhere in the public API and in all files.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Tolerance for comparisons against constraints (relative).
REL_TOL = 1e-9
# Tolerance for internal algebra (relative).
ALG_TOL = 1e-12


@dataclass(frozen=True)
class CostModel:
    """Polynomial transmission-cost family: cost(r) = sum_n lam_n * r**a_n.

    Every term weight must be nonnegative and every exponent at least one,
    which makes the cost superadditive on the line. With ``normalized`` set,
    the weights must sum to 1 so the unit-distance cost is exactly 1.
    """

    terms: tuple[tuple[float, float], ...]
    normalized: bool = False

    def __post_init__(self):
        terms = tuple((float(lam), float(a)) for lam, a in self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValueError("cost model needs at least one term")
        for lam, a in terms:
            if lam < 0:
                raise ValueError(f"term weight must be nonnegative, got {lam}")
            if a < 1:
                raise ValueError(f"cost exponent must be >= 1, got {a}")
        if self.normalized:
            total = sum(lam for lam, _ in terms)
            if abs(total - 1.0) > ALG_TOL:
                raise ValueError(
                    f"normalized model requires term weights summing to 1, got {total}"
                )

    def cost(self, r: float) -> float:
        """Per-unit-data transmission cost at distance ``r`` (0 at r = 0)."""
        if r < 0:
            raise ValueError(f"distance must be nonnegative, got {r}")
        return sum(lam * r**a for lam, a in self.terms)

    def cost_array(self, r: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`cost` over an array of distances."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for lam, a in self.terms:
            out += lam * r**a
        return out


def check_superadditive(model: CostModel, distances, tol: float = ALG_TOL):
    """Check cost(r) + cost(r') <= cost(r + r') over all pairs from ``distances``.

    Returns ``(ok, violations)`` where each violation is a ``(r, r', excess)``
    triple with ``excess = cost(r) + cost(r') - cost(r + r') > tol``. For a
    regular line network pass ``range(1, n)`` to cover every node triple.
    """
    ds = sorted({float(d) for d in distances})
    if not ds:
        raise ValueError("distances must be nonempty")
    if ds[0] <= 0:
        raise ValueError("distances must be positive")
    violations = []
    for idx, r in enumerate(ds):
        for rp in ds[idx:]:
            excess = model.cost(r) + model.cost(rp) - model.cost(r + rp)
            if excess > tol:
                violations.append((r, rp, excess))
    return (not violations, violations)


@dataclass(eq=False)
class Network:
    """Complete weighted graph over node coordinates in R^d.

    ``cost_matrix[i-1, j-1]`` is the per-unit cost of a transmission from
    node i to node j; it is symmetric with a zero diagonal, and every
    ordered pair of distinct nodes is a usable edge.
    """

    nodes: np.ndarray
    cost_model: CostModel
    cost_matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.nodes, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("nodes must be a nonempty sequence of coordinate vectors")
        self.nodes = pts
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=-1))
        matrix = self.cost_model.cost_array(dist)
        np.fill_diagonal(matrix, 0.0)
        self.cost_matrix = matrix

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def is_regular_line(self) -> bool:
        """True when the nodes sit at 1, 2, ..., N on a line, in index order."""
        if self.dim != 1:
            return False
        expected = np.arange(1, self.n + 1, dtype=float)
        return bool(np.allclose(self.nodes[:, 0], expected, rtol=0, atol=1e-9))

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.nodes[i - 1] - self.nodes[j - 1]))

    def cost(self, i: int, j: int) -> float:
        return float(self.cost_matrix[i - 1, j - 1])


@dataclass(frozen=True)
class RootedTree:
    """Directed spanning tree with edges listed in transmission order.

    Every edge's sender must be the root or a node that already appeared as
    a receiver, so the edge sequence doubles as a feasible schedule.
    """

    root: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(i), int(j)) for i, j in self.edges)
        )

    def validate(self, n: int) -> None:
        if not 1 <= self.root <= n:
            raise ValueError(f"root {self.root} out of range 1..{n}")
        if len(self.edges) != n - 1:
            raise ValueError(f"tree needs {n - 1} edges, got {len(self.edges)}")
        reached = {self.root}
        for i, j in self.edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i}, {j}) out of range 1..{n}")
            if i not in reached:
                raise ValueError(f"node {i} transmits before receiving")
            if j in reached:
                raise ValueError(f"node {j} receives more than once")
            reached.add(j)


@dataclass(frozen=True)
class PlanPart:
    """One transmission subgraph with the data weight it carries."""

    weight: float
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(
            self, "edges", tuple((int(i), int(j)) for i, j in self.edges)
        )


@dataclass(frozen=True)
class BroadcastPlan:
    """Broadcast transmission plan: weighted spanning subgraphs from one source.

    The part weights must sum to the demand, and every part must deliver
    data from the source to all other nodes.
    """

    source: int
    demand: float
    parts: tuple[PlanPart, ...]

    def __post_init__(self):
        object.__setattr__(self, "demand", float(self.demand))
        object.__setattr__(self, "parts", tuple(self.parts))

    def validate(self, n: int) -> None:
        if not 1 <= self.source <= n:
            raise ValueError(f"source {self.source} out of range 1..{n}")
        total = 0.0
        for part in self.parts:
            if part.weight < -ALG_TOL:
                raise ValueError(f"negative part weight {part.weight}")
            total += part.weight
        if abs(total - self.demand) > ALG_TOL * max(abs(self.demand), 1.0):
            raise ValueError(
                f"part weights sum to {total}, demand is {self.demand}"
            )
        for idx, part in enumerate(self.parts):
            for i, j in part.edges:
                if not (1 <= i <= n and 1 <= j <= n):
                    raise ValueError(f"part {idx}: edge ({i}, {j}) out of range")
            reached = {self.source}
            grew = True
            while grew:
                grew = False
                for i, j in part.edges:
                    if i in reached and j not in reached:
                        reached.add(j)
                        grew = True
            if len(reached) != n:
                missing = sorted(set(range(1, n + 1)) - reached)
                raise ValueError(f"part {idx} does not reach nodes {missing}")


@dataclass(frozen=True)
class EnergyReport:
    """Per-node transmission energies for one broadcast plan.

    ``objective`` is the maximum energy, ``bottleneck`` its (lowest) node
    index, and ``cycles`` the number of broadcast rounds a battery budget
    survives, when one was given.
    """

    per_node: tuple[float, ...]
    objective: float
    bottleneck: int
    cycles: int | None = None

    @staticmethod
    def from_energies(energies, battery: float | None = None) -> "EnergyReport":
        per_node = tuple(float(e) for e in energies)
        objective = max(per_node)
        bottleneck = per_node.index(objective) + 1
        cycles = None
        if battery is not None:
            cycles = lifetime_cycles(battery, objective)
        return EnergyReport(per_node, objective, bottleneck, cycles)


def node_energy(net: Network, plan: BroadcastPlan,
                battery: float | None = None) -> EnergyReport:
    """Energy spent by each node under ``plan``: E_i = sum_r q_r * sum_j E_ij.

    The source's own transmissions count toward its energy. Summation order
    is fixed (parts in sequence, then edges in sequence) so results are
    bit-deterministic.
    """
    plan.validate(net.n)
    energies = np.zeros(net.n)
    for part in plan.parts:
        for i, j in part.edges:
            energies[i - 1] += part.weight * net.cost_matrix[i - 1, j - 1]
    return EnergyReport.from_energies(energies, battery)


def flow_matrix(plan: BroadcastPlan, n: int | None = None) -> np.ndarray:
    """Aggregate per-edge data amounts q_ij = sum_r q_r over parts using (i, j)."""
    if n is None:
        n = plan.source
        for part in plan.parts:
            for i, j in part.edges:
                n = max(n, i, j)
    flow = np.zeros((n, n))
    for part in plan.parts:
        for i, j in part.edges:
            flow[i - 1, j - 1] += part.weight
    return flow


def verify_broadcast(flow, source: int, demand: float, rel_tol: float = REL_TOL):
    """Check that every node except the source receives exactly the demand.

    Returns ``(ok, deficits)``; ``deficits[j-1]`` is the amount node j is
    short of (negative when oversupplied), zero at the source.
    """
    flow = np.asarray(flow, dtype=float)
    n = flow.shape[0]
    received = flow.sum(axis=0) - np.diag(flow)
    deficits = demand - received
    deficits[source - 1] = 0.0
    tol = rel_tol * abs(demand) + 1e-15
    ok = bool(np.all(np.abs(deficits) <= tol))
    return ok, deficits


def lifetime_cycles(battery: float, report) -> int:
    """Broadcast rounds until the bottleneck node's battery is exhausted."""
    if battery <= 0:
        raise ValueError(f"battery budget must be positive, got {battery}")
    objective = report.objective if isinstance(report, EnergyReport) else float(report)
    if objective <= 0:
        raise ValueError("zero-energy plan: lifetime is unbounded")
    return int(math.floor(battery / objective))


# ---------------------------------------------------------------------------
# Network generators
# ---------------------------------------------------------------------------

DEFAULT_COST_MODEL = CostModel(((1.0, 2.0),), normalized=True)


def regular_line_network(n: int, cost_model: CostModel | None = None) -> Network:
    """Regular line network: n nodes at positions 1, 2, ..., n."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    nodes = np.arange(1, n + 1, dtype=float)[:, None]
    return Network(nodes, cost_model or DEFAULT_COST_MODEL)


def grid_network(rows: int, cols: int, cost_model: CostModel | None = None) -> Network:
    """Regular grid: rows x cols nodes at integer lattice points, row-major."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError(f"grid needs at least 2 nodes, got {rows}x{cols}")
    nodes = [(float(c), float(r)) for r in range(rows) for c in range(cols)]
    return Network(np.array(nodes), cost_model or DEFAULT_COST_MODEL)


def random_network(n: int, seed: int, box: float = 10.0, dim: int = 2,
                   cost_model: CostModel | None = None) -> Network:
    """Nodes drawn uniformly from [0, box]^dim with NumPy's PCG64 generator.

    The same seed always yields the same network.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    nodes = rng.uniform(0.0, float(box), size=(n, dim))
    return Network(nodes, cost_model or DEFAULT_COST_MODEL)


# ---------------------------------------------------------------------------
# JSON file formats
# ---------------------------------------------------------------------------

def network_to_json(net: Network) -> dict:
    return {
        "dim": net.dim,
        "nodes": [[float(x) for x in row] for row in net.nodes],
        "cost": {
            "terms": [{"lambda": lam, "a": a} for lam, a in net.cost_model.terms],
            "normalized": net.cost_model.normalized,
        },
    }


def network_from_json(data: dict) -> Network:
    cost = data["cost"]
    model = CostModel(
        tuple((term["lambda"], term["a"]) for term in cost["terms"]),
        normalized=bool(cost.get("normalized", False)),
    )
    nodes = np.asarray(data["nodes"], dtype=float)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    if "dim" in data and nodes.shape[1] != int(data["dim"]):
        raise ValueError(
            f"declared dim {data['dim']} does not match node vectors of length {nodes.shape[1]}"
        )
    return Network(nodes, model)


def plan_to_json(plan: BroadcastPlan, antenna: str | None = None) -> dict:
    data = {
        "source": plan.source,
        "Q": plan.demand,
        "parts": [
            {"weight": part.weight, "edges": [[i, j] for i, j in part.edges]}
            for part in plan.parts
        ],
    }
    if antenna is not None:
        data["antenna"] = antenna
        for part_data, part in zip(data["parts"], plan.parts):
            part_data["schedule"] = [[i, j] for i, j in part.edges]
    return data


def plan_from_json(data: dict) -> BroadcastPlan:
    parts = []
    for part in data["parts"]:
        edges = part.get("schedule", part["edges"])
        parts.append(PlanPart(part["weight"], tuple((i, j) for i, j in edges)))
    return BroadcastPlan(int(data["source"]), float(data["Q"]), tuple(parts))


def save_json(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def load_network(path) -> Network:
    return network_from_json(load_json(path))


def save_network(net: Network, path) -> None:
    save_json(network_to_json(net), path)


def load_plan(path) -> BroadcastPlan:
    return plan_from_json(load_json(path))


def save_plan(plan: BroadcastPlan, path, antenna: str | None = None) -> None:
    save_json(plan_to_json(plan, antenna=antenna), path)
