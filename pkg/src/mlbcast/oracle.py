"""Exact solver for small instances.

Enumerates every labeled spanning tree of the complete graph via Prüfer
sequences, then assigns data weights to the trees by solving the min-max
energy problem as a linear program. This is the ground truth the other
solvers are validated against, so it stays deliberately simple: dense
tableau simplex with Bland's anti-cycling rule, no column generation.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import BroadcastPlan, EnergyReport, Network, PlanPart, RootedTree, node_energy

DEFAULT_TREE_CAP = 8

# Simplex tolerances: entries below PIVOT_TOL are treated as zero when
# selecting pivots; FEAS_TOL groups ratio-test ties.
PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9


# ---------------------------------------------------------------------------
# Prüfer coding
# ---------------------------------------------------------------------------

def prufer_decode(seq, n: int) -> tuple[tuple[int, int], ...]:
    """Decode a Prüfer sequence over labels 1..n into undirected tree edges."""
    seq = tuple(int(s) for s in seq)
    if len(seq) != max(n - 2, 0):
        raise ValueError(f"sequence for n={n} must have length {n - 2}")
    if any(not 1 <= s <= n for s in seq):
        raise ValueError("sequence labels out of range")
    if n == 2:
        return ((1, 2),)
    degree = [1] * (n + 1)
    for s in seq:
        degree[s] += 1
    edges = []
    leaves = sorted((v for v in range(1, n + 1) if degree[v] == 1), reverse=True)
    for s in seq:
        leaf = leaves.pop()
        edges.append((leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            # Keep the pending-leaf list sorted so the smallest leaf goes next.
            leaves.append(s)
            leaves.sort(reverse=True)
    u, v = leaves[-1], leaves[-2]
    edges.append((min(u, v), max(u, v)))
    return tuple(edges)


def prufer_encode(edges, n: int) -> tuple[int, ...]:
    """Inverse of :func:`prufer_decode` for an undirected edge set."""
    if n == 2:
        return ()
    adjacency = {v: set() for v in range(1, n + 1)}
    for i, j in edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
    seq = []
    for _ in range(n - 2):
        leaf = min(v for v, nbrs in adjacency.items() if len(nbrs) == 1)
        neighbor = next(iter(adjacency[leaf]))
        seq.append(neighbor)
        adjacency[neighbor].discard(leaf)
        del adjacency[leaf]
    return tuple(seq)


def orient_tree(edges, root: int, n: int) -> RootedTree:
    """Orient undirected edges away from ``root``, scheduling breadth-first
    with the lower child index first."""
    adjacency = {v: [] for v in range(1, n + 1)}
    for i, j in edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    ordered = []
    visited = {root}
    frontier = [root]
    while frontier:
        next_frontier = []
        for u in frontier:
            for v in sorted(adjacency[u]):
                if v not in visited:
                    visited.add(v)
                    ordered.append((u, v))
                    next_frontier.append(v)
        frontier = next_frontier
    if len(ordered) != n - 1:
        raise ValueError("edges do not form a spanning tree")
    return RootedTree(root, tuple(ordered))


@lru_cache(maxsize=32)
def _all_parent_vectors(n: int, root: int) -> np.ndarray:
    """Parent vector for every labeled spanning tree, batch-decoded.

    Returns an (n**(n-2), n) int array; entry [t, j-1] is the 1-based parent
    of node j in tree t, with 0 at the root. Row t corresponds to the t-th
    Prüfer sequence in lexicographic order.
    """
    if n == 2:
        parents = np.zeros((1, 2), dtype=np.int32)
        parents[0, (2 if root == 1 else 1) - 1] = root
        return parents

    m = n - 2
    count = n**m
    seqs = (np.indices((n,) * m).reshape(m, -1).T + 1).astype(np.int32)

    # Vectorized Prüfer decode: track degrees, peel the smallest leaf per row.
    degree = np.ones((count, n), dtype=np.int32)
    rows = np.arange(count)
    for pos in range(m):
        np.add.at(degree, (rows, seqs[:, pos] - 1), 1)
    edges_u = np.empty((count, n - 1), dtype=np.int32)
    edges_v = np.empty((count, n - 1), dtype=np.int32)
    for pos in range(m):
        leaf = np.argmax(degree == 1, axis=1)  # first (smallest) leaf per row
        s = seqs[:, pos]
        edges_u[:, pos] = leaf + 1
        edges_v[:, pos] = s
        degree[rows, leaf] = 0
        degree[rows, s - 1] -= 1
    # Two leaves remain in every row; join them.
    first = np.argmax(degree == 1, axis=1)
    last = n - 1 - np.argmax(degree[:, ::-1] == 1, axis=1)
    edges_u[:, m] = first + 1
    edges_v[:, m] = last + 1

    # Orient away from the root by propagating reachability.
    parents = np.zeros((count, n), dtype=np.int32)
    reached = np.zeros((count, n), dtype=bool)
    reached[:, root - 1] = True
    for _ in range(n - 1):
        changed = False
        for e in range(n - 1):
            u = edges_u[:, e] - 1
            v = edges_v[:, e] - 1
            ru = reached[rows, u]
            rv = reached[rows, v]
            forward = ru & ~rv
            if forward.any():
                parents[rows[forward], v[forward]] = u[forward] + 1
                reached[rows[forward], v[forward]] = True
                changed = True
            backward = rv & ~ru
            if backward.any():
                parents[rows[backward], u[backward]] = v[backward] + 1
                reached[rows[backward], u[backward]] = True
                changed = True
        if not changed:
            break
    if not reached.all():
        raise AssertionError("tree orientation failed to reach every node")
    return parents


@dataclass
class TreeEnumeration:
    """All labeled spanning trees of the complete graph on n nodes, rooted.

    Trees are stored as parent vectors to keep n = 8 (262144 trees)
    affordable; :meth:`tree` materializes an individual scheduled tree.
    """

    n: int
    root: int
    parents: np.ndarray

    def __len__(self) -> int:
        return self.parents.shape[0]

    def tree(self, index: int) -> RootedTree:
        row = self.parents[index]
        edges = [(int(row[j]), j + 1) for j in range(self.n) if row[j] != 0]
        return orient_tree(edges, self.root, self.n)


def enumerate_trees(n: int, root: int, cap: int = DEFAULT_TREE_CAP) -> TreeEnumeration:
    """Enumerate all n**(n-2) spanning trees rooted at ``root``.

    Refuses to run above ``cap`` nodes (default 8; raise it explicitly for
    n = 9 at the price of ~5M trees).
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if n > cap:
        raise ValueError(
            f"tree enumeration for n={n} exceeds the cap of {cap} nodes; "
            f"raise the cap explicitly to proceed"
        )
    if not 1 <= root <= n:
        raise ValueError(f"root {root} out of range 1..{n}")
    return TreeEnumeration(n, root, _all_parent_vectors(n, root))


def tree_energy_columns(net: Network, enum: TreeEnumeration) -> np.ndarray:
    """Per-node energy of one unit of data on each tree: c[i-1, t]."""
    count = len(enum)
    c = np.zeros((net.n, count))
    cols = np.arange(count)
    for j in range(net.n):
        if j + 1 == enum.root:
            continue
        p = enum.parents[:, j] - 1
        np.add.at(c, (p, cols), net.cost_matrix[p, j])
    return c


# ---------------------------------------------------------------------------
# Min-max linear program
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpSolution:
    weights: np.ndarray
    objective: float
    iterations: int


def lp_minmax(c, demand: float, max_iterations: int = 100_000) -> LpSolution:
    """Minimize the largest per-node energy over weight vectors summing to
    ``demand``.

    ``c[i][r]`` is the energy node i spends per unit of data on part r. The
    epigraph problem (min t with c q <= t, sum q = demand, q >= 0) is solved
    in its reciprocal standard form -- maximize sum(y) subject to c y <= 1 --
    which admits the all-slack starting basis; the optimum maps back via
    t = demand / sum(y), q = demand * y / sum(y). Pivoting enters the
    steepest reduced cost and hands over to Bland's anti-cycling rule on
    degenerate stalls; both rules are deterministic.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2:
        raise ValueError("coefficient matrix must be two-dimensional")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise ValueError("coefficients must be finite and nonnegative")
    if demand <= 0:
        raise ValueError(f"demand must be positive, got {demand}")
    m, r = c.shape

    col_max = c.max(axis=0)
    zero_cols = np.nonzero(col_max <= PIVOT_TOL)[0]
    if zero_cols.size:
        # A part nobody pays for carries everything: objective 0.
        weights = np.zeros(r)
        weights[zero_cols[0]] = demand
        return LpSolution(weights, 0.0, 0)

    tableau = np.hstack([c, np.eye(m), np.ones((m, 1))])
    reduced = np.concatenate([np.ones(r), np.zeros(m)])
    basis = np.arange(r, r + m)

    # Steepest reduced cost makes quick progress on wide tableaus; a run of
    # degenerate (zero-step) pivots switches permanently to Bland's lowest
    # index rule, which cannot cycle. The switch rule is deterministic.
    stall = 0
    blands = False
    iterations = 0
    while True:
        candidates = np.nonzero(reduced > PIVOT_TOL)[0]
        if candidates.size == 0:
            break
        if iterations >= max_iterations:
            raise RuntimeError(
                f"simplex exceeded {max_iterations} iterations "
                f"(m={m}, r={r}); the tableau may be ill-conditioned"
            )
        if blands:
            enter = candidates[0]
        else:
            enter = candidates[np.argmax(reduced[candidates])]
        column = tableau[:, enter]
        positive = column > PIVOT_TOL
        if not positive.any():
            raise RuntimeError("unbounded pivot column in a bounded program")
        ratios = np.full(m, np.inf)
        ratios[positive] = tableau[positive, -1] / column[positive]
        best = ratios.min()
        # The window must survive a tiny-negative best (degenerate rhs dust).
        ties = np.nonzero(ratios <= best + FEAS_TOL * abs(best) + 1e-15)[0]
        leave = ties[np.argmin(basis[ties])]  # Bland: lowest basis index leaves
        if not blands:
            stall = stall + 1 if best <= 1e-15 else 0
            if stall > 2 * m:
                blands = True

        pivot = tableau[leave, enter]
        tableau[leave] /= pivot
        pivot_row = tableau[leave].copy()
        factors = tableau[:, enter].copy()
        factors[leave] = 0.0
        tableau -= np.outer(factors, pivot_row)
        reduced = reduced - reduced[enter] * pivot_row[:-1]
        basis[leave] = enter
        iterations += 1

    y = np.zeros(r + m)
    y[basis] = tableau[:, -1]
    y = y[:r]
    total = y.sum()
    weights = demand * y / total
    objective = demand / total
    return LpSolution(weights, float(objective), iterations)


# ---------------------------------------------------------------------------
# End-to-end exact solve
# ---------------------------------------------------------------------------

@dataclass
class ExactSolution:
    plan: BroadcastPlan
    report: EnergyReport
    objective: float
    tree_count: int
    lp_iterations: int

    def stats(self) -> dict:
        return {
            "trees": self.tree_count,
            "lp_iterations": self.lp_iterations,
            "objective": self.objective,
        }


def solve_exact(net: Network, k: int, demand: float = 1.0,
                cap: int = DEFAULT_TREE_CAP,
                battery: float | None = None) -> ExactSolution:
    """Optimal broadcast plan for source ``k`` by exhaustive tree enumeration."""
    enum = enumerate_trees(net.n, k, cap=cap)
    columns = tree_energy_columns(net, enum)
    lp = lp_minmax(columns, demand)

    support = np.nonzero(lp.weights > 1e-12 * demand)[0]
    kept = lp.weights[support]
    # Basic solutions keep at most n parts; rescale so the kept weights sum
    # to the demand exactly after dropping numerically-zero ones.
    kept = kept * (demand / kept.sum())
    parts = tuple(
        PlanPart(w, enum.tree(int(idx)).edges) for idx, w in zip(support, kept)
    )
    plan = BroadcastPlan(k, demand, parts)
    report = node_energy(net, plan, battery)
    return ExactSolution(plan, report, lp.objective, len(enum), lp.iterations)
