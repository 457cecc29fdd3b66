import numpy as np
import pytest

import mlbcast as mb
from mlbcast import analytic1d, heuristic, oracle
from mlbcast.heuristic import (
    CompositeGraph,
    build_graphs,
    constrained_mst,
    equal_energy_solve,
    optimize_weights,
    shortest_path,
    solve,
)
from mlbcast.model import CostModel

QUAD = CostModel(((1.0, 2.0),), normalized=True)
LINEAR = CostModel(((1.0, 1.0),), normalized=True)


# ---------------------------------------------------------------------------
# shortest paths
# ---------------------------------------------------------------------------

def test_relay_beats_direct_for_quadratic_cost():
    net = mb.regular_line_network(4, QUAD)
    assert shortest_path(net, 2, 4) == (2, 3, 4)  # 1 + 1 < 4


def test_linear_cost_tie_prefers_fewer_hops():
    net = mb.regular_line_network(4, LINEAR)
    assert shortest_path(net, 2, 4) == (2, 4)  # same cost, one hop


def test_adjacent_nodes_use_direct_edge():
    net = mb.regular_line_network(4, QUAD)
    assert shortest_path(net, 2, 3) == (2, 3)


def test_shortest_path_rejects_self():
    net = mb.regular_line_network(4, QUAD)
    with pytest.raises(ValueError):
        shortest_path(net, 2, 2)


def test_lexicographic_tie_break():
    # four corners of a square: two equal-cost two-hop routes to the far
    # corner; the smaller intermediate label wins
    net = mb.grid_network(2, 2, QUAD)
    assert shortest_path(net, 1, 4) in ((1, 2, 4), (1, 3, 4))
    assert shortest_path(net, 1, 4) == (1, 2, 4)


def test_zero_length_edges_are_free_hops():
    net = mb.Network(np.array([[0.0], [0.0], [3.0]]), QUAD)
    assert shortest_path(net, 1, 2) == (1, 2)  # zero-cost edge is usable
    # a detour through the coincident twin ties on cost, so fewer hops wins
    assert shortest_path(net, 1, 3) == (1, 3)


# ---------------------------------------------------------------------------
# degree-capped spanning trees
# ---------------------------------------------------------------------------

def test_capped_tree_on_line_from_internal_root():
    net = mb.regular_line_network(4, QUAD)
    assert constrained_mst(net, range(1, 5), 2) == ((2, 1), (2, 3), (3, 4))


def test_capped_tree_on_line_from_border_root_is_path():
    net = mb.regular_line_network(4, QUAD)
    assert constrained_mst(net, range(1, 5), 1) == ((1, 2), (2, 3), (3, 4))


def test_capped_tree_two_nodes():
    net = mb.regular_line_network(4, QUAD)
    assert constrained_mst(net, (2, 3), 2) == ((2, 3),)


def test_out_degree_never_exceeds_cap():
    rng = np.random.default_rng(19)
    for _ in range(20):
        n = int(rng.integers(4, 10))
        net = mb.random_network(n, seed=int(rng.integers(10_000)))
        root = int(rng.integers(1, n + 1))
        edges = constrained_mst(net, range(1, n + 1), root)
        out = {}
        receivers = set()
        for i, j in edges:
            out[i] = out.get(i, 0) + 1
            receivers.add(j)
        assert max(out.values()) <= 2
        assert len(edges) == n - 1
        assert len(receivers) == n - 1


def test_capped_tree_requires_root_membership():
    net = mb.regular_line_network(4, QUAD)
    with pytest.raises(ValueError):
        constrained_mst(net, (2, 3), 1)


# ---------------------------------------------------------------------------
# composite subgraphs
# ---------------------------------------------------------------------------

def test_border_source_early_exits_with_path():
    net = mb.regular_line_network(6, QUAD)
    graphs = build_graphs(net, 1)
    assert len(graphs) == 1
    assert graphs[0].edges == ((1, 2), (2, 3), (3, 4), (4, 5), (5, 6))


def test_line_composites_match_closed_form_trees():
    net = mb.regular_line_network(4, QUAD)
    graphs = build_graphs(net, 2)
    assert len(graphs) == 4
    expected = analytic1d.internal_trees(4, 2)
    for graph, tree in zip(graphs, expected):
        assert set(graph.edges) == set(tree.edges)
    # spot-check the documented traces
    assert graphs[3].path == (2, 3, 4)
    assert graphs[3].tree_edges == ((4, 1),)
    assert graphs[0].path == (2, 1)
    assert graphs[0].tree_edges == ((1, 3), (3, 4))


def test_composites_span_and_respect_order():
    rng = np.random.default_rng(37)
    for seed in range(5):
        n = int(rng.integers(4, 8))
        net = mb.random_network(n, seed=seed)
        k = int(rng.integers(1, n + 1))
        for graph in build_graphs(net, k):
            have = {k}
            for i, j in graph.edges:
                assert i in have
                assert j not in have
                have.add(j)
            assert len(have) == n


def test_path_covering_everything_leaves_bare_path_composite():
    # clustered line: the cheapest route from 1 to 4 relays through both
    # other nodes, so the residual tree for target 4 is empty
    net = mb.Network(np.array([[0.0], [1.0], [2.0], [3.0]]), QUAD)
    graphs = build_graphs(net, 2)
    target4 = graphs[3]
    assert target4.path == (2, 3, 4)
    # interior nodes {2, 3} are deleted; the residual {1, 4} roots at 4
    assert target4.tree_edges == ((4, 1),)


# ---------------------------------------------------------------------------
# weight optimization
# ---------------------------------------------------------------------------

def test_optimize_weights_recovers_line_optimum():
    net = mb.regular_line_network(4, QUAD)
    plan, report, lp = optimize_weights(net, build_graphs(net, 2), 1.0)
    assert report.objective == pytest.approx(81 / 58, abs=1e-11)
    plan.validate(4)


def test_optimize_weights_single_graph():
    net = mb.regular_line_network(4, QUAD)
    graphs = build_graphs(net, 1)
    plan, report, _ = optimize_weights(net, graphs, 2.0)
    assert plan.parts[0].weight == pytest.approx(2.0)
    assert report.objective == pytest.approx(2.0)


def test_unit_square_stays_within_ratio():
    net = mb.Network(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
                     QUAD)
    h = solve(net, 1)
    exact = oracle.solve_exact(net, 1)
    ratio = h.report.objective / exact.objective
    assert 1 - 1e-9 <= ratio <= 1.5


def test_exact_on_small_grids():
    for rows, cols in ((2, 3), (2, 4)):
        net = mb.grid_network(rows, cols, QUAD)
        for k in range(1, net.n + 1):
            h = solve(net, k)
            exact = oracle.solve_exact(net, k)
            assert h.report.objective == pytest.approx(exact.objective,
                                                       rel=1e-9)


# ---------------------------------------------------------------------------
# equal-energy shortcut
# ---------------------------------------------------------------------------

def test_equal_energy_matches_closed_form_weights():
    net = mb.regular_line_network(4, QUAD)
    outcome = equal_energy_solve(net, build_graphs(net, 2), 1.0)
    assert outcome.ok
    assert outcome.weights == pytest.approx(
        [81 / 232, 92 / 232, 23 / 232, 36 / 232], abs=1e-12)


def test_equal_energy_three_nodes():
    net = mb.regular_line_network(3, QUAD)
    outcome = equal_energy_solve(net, build_graphs(net, 2), 1.0)
    assert outcome.weights == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-12)


def test_equal_energy_fails_for_silent_node():
    # node 3 transmits in no subgraph, so its energy row pins everyone to zero
    net = mb.regular_line_network(3, QUAD)
    path = CompositeGraph(1, 3, (1, 2, 3), ())
    outcome = equal_energy_solve(net, [path, path, path], 1.0)
    assert not outcome.ok
    assert outcome.reason


def test_equal_energy_requires_one_graph_per_node():
    net = mb.regular_line_network(3, QUAD)
    with pytest.raises(ValueError):
        equal_energy_solve(net, build_graphs(net, 2)[:2], 1.0)


def test_equal_energy_agrees_with_lp_when_it_succeeds():
    for n, k in ((4, 2), (5, 3), (7, 4)):
        net = mb.regular_line_network(n, QUAD)
        graphs = build_graphs(net, k)
        outcome = equal_energy_solve(net, graphs, 1.0)
        assert outcome.ok
        _, lp_report, _ = optimize_weights(net, graphs, 1.0)
        parts = tuple(mb.PlanPart(w, g.edges)
                      for w, g in zip(outcome.weights, graphs))
        report = mb.node_energy(net, mb.BroadcastPlan(k, 1.0, parts))
        assert report.objective == pytest.approx(lp_report.objective, abs=1e-9)


# ---------------------------------------------------------------------------
# end-to-end solve
# ---------------------------------------------------------------------------

def test_solve_line_equals_closed_form():
    for n in (3, 5, 8):
        for a in (2.0, 3.0):
            model = CostModel(((1.0, a),), normalized=True)
            net = mb.regular_line_network(n, model)
            for k in range(2, n):
                h = solve(net, k)
                closed = analytic1d.internal_objective(n, k, 1.0, model)
                assert abs(h.report.objective - closed) <= 1e-9 * closed


def test_solve_border_is_single_path_part():
    net = mb.regular_line_network(7, QUAD)
    for k in (1, 7):
        h = solve(net, k)
        assert h.stats["early_exit"]
        assert len(h.plan.parts) == 1
        assert h.plan.parts[0].weight == pytest.approx(1.0)


def test_solve_dominates_oracle():
    for seed in (0, 4, 11):
        net = mb.random_network(6, seed=seed)
        for k in (1, 3, 6):
            h = solve(net, k)
            exact = oracle.solve_exact(net, k)
            assert h.report.objective >= exact.objective - 1e-9


def test_solve_plans_verify():
    for seed in (1, 2):
        net = mb.random_network(5, seed=seed)
        for k in range(1, 6):
            h = solve(net, k)
            h.plan.validate(5)
            ok, _ = mb.verify_broadcast(mb.flow_matrix(h.plan, 5), k, 1.0)
            assert ok


def test_solve_equal_energy_on_line():
    net = mb.regular_line_network(5, QUAD)
    h = solve(net, 3, weights="equal-energy")
    closed = analytic1d.internal_objective(5, 3, 1.0, QUAD)
    assert h.report.objective == pytest.approx(closed, abs=1e-11)
    assert "equal_energy_fallback" not in h.stats


def test_solve_equal_energy_falls_back_when_unsolvable():
    # clustered instance where strict equalization needs negative weights
    net = mb.random_network(7, seed=10)
    h = solve(net, 1, weights="equal-energy")
    lp = solve(net, 1, weights="lp")
    assert "equal_energy_fallback" in h.stats
    assert h.report.objective == pytest.approx(lp.report.objective, abs=1e-11)


def test_solve_warns_on_subquadratic_cost_in_plane():
    net = mb.random_network(5, seed=3, cost_model=CostModel(((1.0, 1.5),)))
    with pytest.warns(UserWarning, match="superadditive"):
        solve(net, 2)


def test_solve_reports_battery_cycles():
    net = mb.regular_line_network(4, QUAD)
    h = solve(net, 2, battery=10.0)
    assert h.report.cycles == 7


def test_solve_rejects_unknown_weight_method():
    net = mb.regular_line_network(4, QUAD)
    with pytest.raises(ValueError):
        solve(net, 2, weights="magic")
