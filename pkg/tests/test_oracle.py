import itertools

import numpy as np
import pytest

import mlbcast as mb
from mlbcast import analytic1d, oracle
from mlbcast.model import BroadcastPlan, CostModel, PlanPart, node_energy
from mlbcast.oracle import (
    enumerate_trees,
    lp_minmax,
    orient_tree,
    prufer_decode,
    prufer_encode,
    solve_exact,
    tree_energy_columns,
)

QUAD = CostModel(((1.0, 2.0),), normalized=True)


# ---------------------------------------------------------------------------
# Prüfer coding and enumeration
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 16), (5, 125)])
def test_tree_counts(n, count):
    assert len(enumerate_trees(n, 1)) == count


def test_prufer_roundtrip_identity_all_n5():
    for seq in itertools.product(range(1, 6), repeat=3):
        edges = prufer_decode(seq, 5)
        assert prufer_encode(edges, 5) == tuple(seq)


def test_prufer_known_decode():
    # classic example: (4, 4, 4, 5) on 6 labels is the star-ish tree below
    assert set(prufer_decode((4, 4, 4, 5), 6)) == {(1, 4), (2, 4), (3, 4), (4, 5), (5, 6)}


def test_prufer_decode_validates():
    with pytest.raises(ValueError):
        prufer_decode((1, 2), 5)  # wrong length
    with pytest.raises(ValueError):
        prufer_decode((0, 1, 2), 5)  # label out of range


def test_batch_decode_matches_scalar():
    for n in (3, 4, 5, 6):
        for root in (1, n // 2 + 1):
            enum = enumerate_trees(n, root)
            for index, seq in enumerate(itertools.product(range(1, n + 1),
                                                          repeat=n - 2)):
                expected = orient_tree(prufer_decode(seq, n), root, n)
                assert enum.tree(index) == expected


def test_enumerated_trees_are_valid_and_distinct():
    enum = enumerate_trees(5, 2)
    seen = set()
    for i in range(len(enum)):
        tree = enum.tree(i)
        tree.validate(5)
        assert tree.root == 2
        seen.add(frozenset(tree.edges))
    assert len(seen) == 125  # no duplicates


def test_enumeration_cap():
    with pytest.raises(ValueError, match="cap of 8"):
        enumerate_trees(9, 1)
    with pytest.raises(ValueError, match="cap of 5"):
        enumerate_trees(6, 1, cap=5)


def test_schedule_is_breadth_first_lowest_child_first():
    # path 3-1-2 plus 3-4: rooted at 3, children sorted per level
    tree = orient_tree([(1, 3), (1, 2), (3, 4)], 3, 4)
    assert tree.edges == ((3, 1), (3, 4), (1, 2))


# ---------------------------------------------------------------------------
# LP
# ---------------------------------------------------------------------------

def test_lp_single_part():
    sol = lp_minmax(np.array([[1.0], [1.0], [0.0]]), 1.0)
    assert sol.weights == pytest.approx([1.0])
    assert sol.objective == pytest.approx(1.0, abs=1e-12)


def test_lp_symmetric_split():
    sol = lp_minmax(np.array([[4.0, 0.0], [0.0, 4.0]]), 1.0)
    assert sol.weights == pytest.approx([0.5, 0.5], abs=1e-12)
    assert sol.objective == pytest.approx(2.0, abs=1e-12)


def test_lp_all_sixteen_trees_recovers_closed_form():
    net = mb.regular_line_network(4, QUAD)
    enum = enumerate_trees(4, 2)
    sol = lp_minmax(tree_energy_columns(net, enum), 1.0)
    assert sol.objective == pytest.approx(81 / 58, abs=1e-11)


def test_lp_input_validation():
    with pytest.raises(ValueError):
        lp_minmax(np.array([[1.0, -0.1]]), 1.0)
    with pytest.raises(ValueError):
        lp_minmax(np.array([[1.0]]), 0.0)
    with pytest.raises(ValueError):
        lp_minmax(np.array([1.0, 2.0]), 1.0)


def test_lp_zero_column_means_free_plan():
    sol = lp_minmax(np.array([[3.0, 0.0], [1.0, 0.0]]), 2.0)
    assert sol.objective == 0.0
    assert sol.weights == pytest.approx([0.0, 2.0])


def test_lp_restart_agreement_under_column_permutation():
    # any pivoting path must land on the same optimum (min-max has no
    # spurious local minima)
    rng = np.random.default_rng(17)
    for _ in range(20):
        m, r = int(rng.integers(2, 6)), int(rng.integers(2, 30))
        c = rng.uniform(0.0, 5.0, size=(m, r))
        base = lp_minmax(c, 1.0).objective
        for _ in range(5):
            perm = rng.permutation(r)
            again = lp_minmax(c[:, perm], 1.0).objective
            assert again == pytest.approx(base, rel=1e-9, abs=1e-12)


# ---------------------------------------------------------------------------
# solve_exact
# ---------------------------------------------------------------------------

def test_solve_exact_line_border():
    net = mb.regular_line_network(4, QUAD)
    sol = solve_exact(net, 1)
    assert sol.objective == pytest.approx(1.0, abs=1e-11)
    sol.plan.validate(4)


def test_solve_exact_line_internal():
    net = mb.regular_line_network(4, QUAD)
    sol = solve_exact(net, 2)
    assert sol.objective == pytest.approx(81 / 58, abs=1e-11)
    assert sol.report.objective == pytest.approx(81 / 58, abs=1e-11)
    assert sol.tree_count == 16


def test_solution_support_is_basic():
    # a basic optimum carries at most one part per node
    for seed in (0, 7, 15):
        net = mb.random_network(6, seed=seed)
        for k in (1, 4):
            sol = solve_exact(net, k)
            assert 1 <= len(sol.plan.parts) <= 6


def test_solve_exact_two_nodes():
    net = mb.Network(np.array([[0.0, 0.0], [2.0, 0.0]]), QUAD)
    sol = solve_exact(net, 1)
    assert sol.plan.parts[0].edges == ((1, 2),)
    assert sol.objective == pytest.approx(net.cost(1, 2), abs=1e-12)


def test_solve_exact_coincident_nodes_zero_objective():
    net = mb.Network(np.zeros((3, 2)), QUAD)
    sol = solve_exact(net, 1)
    assert sol.objective == 0.0
    assert sol.report.objective == 0.0


def test_oracle_dominates_random_feasible_plans():
    rng = np.random.default_rng(5)
    for seed in (0, 1):
        net = mb.random_network(5, seed=seed)
        for k in (1, 3):
            best = solve_exact(net, k).objective
            enum = enumerate_trees(5, k)
            for _ in range(100):
                picks = rng.integers(0, len(enum), size=3)
                raw = rng.uniform(0.1, 1.0, 3)
                weights = raw / raw.sum()
                plan = BroadcastPlan(k, 1.0, tuple(
                    PlanPart(w, enum.tree(int(t)).edges)
                    for w, t in zip(weights, picks)))
                assert node_energy(net, plan).objective >= best - 1e-9


def test_scale_equivariance():
    net = mb.random_network(5, seed=9)
    base = solve_exact(net, 2, demand=1.0)
    scaled = solve_exact(net, 2, demand=3.5)
    assert scaled.objective == pytest.approx(3.5 * base.objective, rel=1e-9)
    assert sum(p.weight for p in scaled.plan.parts) == pytest.approx(3.5, rel=1e-12)


def test_permutation_equivariance():
    rng = np.random.default_rng(13)
    net = mb.random_network(5, seed=21)
    base = solve_exact(net, 2).objective
    perm = rng.permutation(5)  # perm[old-1] = new-1
    permuted_nodes = np.empty_like(net.nodes)
    permuted_nodes[perm] = net.nodes
    permuted = mb.Network(permuted_nodes, net.cost_model)
    again = solve_exact(permuted, int(perm[2 - 1]) + 1).objective
    assert again == pytest.approx(base, rel=1e-9)


def test_emitted_plans_verify():
    for seed in (2, 3):
        net = mb.random_network(6, seed=seed)
        for k in (1, 4):
            sol = solve_exact(net, k)
            ok, _ = mb.verify_broadcast(mb.flow_matrix(sol.plan, 6), k, 1.0)
            assert ok


def test_matches_analytic_on_lines():
    for n in (3, 5, 6):
        for a in (1.0, 2.0, 3.0):
            model = CostModel(((1.0, a),), normalized=True)
            net = mb.regular_line_network(n, model)
            for k in range(2, n):
                exact = solve_exact(net, k).objective
                closed = analytic1d.internal_objective(n, k, 1.0, model)
                assert exact == pytest.approx(closed, abs=1e-9)
