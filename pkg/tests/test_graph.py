"""Graph construction, topology generation, cost sampling, and file I/O."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mosp import (
    CostDistribution,
    Edge,
    Graph,
    GraphError,
    GraphFormatError,
    TopologySpec,
    UniformMixture,
    additive_to_loss,
    default_cost_distribution,
    generate_topology,
    load_graph,
    loss_to_additive,
    parse_topology,
    sample_costs,
    save_graph,
)
from mosp.rng import spawn_rng


class TestLossTransform:
    def test_zero_loss_maps_to_zero(self):
        assert loss_to_additive(0.0) == 0.0

    def test_ten_percent_loss(self):
        assert loss_to_additive(0.1) == pytest.approx(0.105360516, abs=1e-9)

    def test_near_one_stays_finite(self):
        assert math.isfinite(loss_to_additive(0.999999))

    @pytest.mark.parametrize("bad", [1.0, -0.1, 1.5, float("nan")])
    def test_domain_rejected(self, bad):
        with pytest.raises(GraphError):
            loss_to_additive(bad)

    def test_round_trip(self):
        for p in (0.0, 1e-8, 0.05, 0.73, 0.9999):
            assert additive_to_loss(loss_to_additive(p)) == pytest.approx(p, rel=1e-12, abs=1e-15)

    def test_negative_additive_rejected(self):
        with pytest.raises(GraphError):
            additive_to_loss(-0.01)

    @given(st.floats(0.0, 0.99), st.floats(0.0, 0.99))
    def test_additive_over_independent_links(self, p1, p2):
        # the transform of the combined two-link loss equals the sum of
        # the per-link transforms
        combined = 1.0 - (1.0 - p1) * (1.0 - p2)
        total = loss_to_additive(p1) + loss_to_additive(p2)
        assert math.isclose(loss_to_additive(combined), total, rel_tol=1e-12, abs_tol=1e-15)


class TestGraphStructure:
    def test_adjacency_lists_incident_edges_ascending(self):
        g = Graph(4, [(0, 1, (1.0,)), (2, 3, (1.0,)), (0, 2, (1.0,)), (0, 3, (1.0,))])
        assert g.adjacency[0] == (0, 2, 3)
        assert g.adjacency[3] == (1, 3)
        assert g.other_end(2, 0) == 2
        assert g.other_end(2, 2) == 0

    def test_parallel_edges_are_representable(self):
        g = Graph(2, [(0, 1, (1.0, 9.0)), (0, 1, (9.0, 1.0))])
        assert len(g.edges) == 2
        assert g.adjacency[0] == (0, 1)

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError):
            Graph(3, [(1, 1, (1.0,))])

    def test_endpoint_out_of_range_rejected(self):
        with pytest.raises(GraphError):
            Graph(3, [(0, 3, (1.0,))])

    def test_negative_cost_rejected(self):
        with pytest.raises(GraphError):
            Graph(2, [(0, 1, (1.0, -2.0))])

    def test_non_finite_cost_rejected(self):
        with pytest.raises(GraphError):
            Graph(2, [(0, 1, (float("inf"),))])

    def test_mixed_attribute_counts_rejected(self):
        with pytest.raises(GraphError):
            Graph(3, [(0, 1, (1.0, 2.0)), (1, 2, (1.0,))])

    def test_endpoints_normalized_to_ascending(self):
        g = Graph(3, [(2, 0, (1.0,))])
        assert (g.edges[0].u, g.edges[0].v) == (0, 2)

    def test_connectivity_probe(self):
        connected = Graph(3, [(0, 1, (1.0,)), (1, 2, (1.0,))])
        split = Graph(3, [(0, 1, (1.0,))])
        assert connected.is_connected()
        assert not split.is_connected()


class TestTopologyGeneration:
    def test_two_nodes_yield_the_single_edge(self):
        g = generate_topology(TopologySpec(2, 1, seed=0))
        assert g.node_count == 2
        assert [(e.u, e.v) for e in g.edges] == [(0, 1)]

    def test_exact_counts_connectivity_and_degree(self):
        g = generate_topology(TopologySpec(50, 50, seed=7))
        assert (g.node_count, len(g.edges)) == (50, 50)
        assert g.is_connected()
        assert g.average_degree() == 2.0

    def test_infeasible_specs_rejected(self):
        with pytest.raises(GraphError):
            TopologySpec(5, 11)
        with pytest.raises(GraphError):
            TopologySpec(5, 3)

    def test_same_seed_same_graph(self):
        a = generate_topology(TopologySpec(25, 50, seed=3))
        b = generate_topology(TopologySpec(25, 50, seed=3))
        c = generate_topology(TopologySpec(25, 50, seed=4))
        assert a == b
        assert a != c

    @given(st.integers(2, 20), st.data())
    @settings(max_examples=60, deadline=None)
    def test_generated_graphs_are_simple_connected_exactly_sized(self, v, data):
        e = data.draw(st.integers(v - 1, v * (v - 1) // 2))
        seed = data.draw(st.integers(0, 2**31 - 1))
        g = generate_topology(TopologySpec(v, e, seed=seed))
        assert (g.node_count, len(g.edges)) == (v, e)
        assert g.is_connected()
        pairs = {(edge.u, edge.v) for edge in g.edges}
        assert len(pairs) == e
        assert all(u != w for u, w in pairs)

    def test_named_classes(self):
        for name, (v, e) in (("25N50E", (25, 50)), ("100N150E", (100, 150)), ("50N50E", (50, 50))):
            spec = parse_topology(name)
            assert (spec.node_count, spec.edge_count) == (v, e)
        mcc = parse_topology("MCC")
        assert (mcc.node_count, mcc.edge_count) == (30, 35)
        assert mcc.label == "MCC-30N35E"
        assert parse_topology("7,9").label == "7N9E"
        with pytest.raises(GraphError):
            parse_topology("bogus")

    def test_average_degrees_of_benchmark_classes(self):
        expected = {"25N50E": 4.0, "100N150E": 3.0, "MCC": 35 * 2 / 30, "50N50E": 2.0}
        for name, degree in expected.items():
            g = generate_topology(parse_topology(name, seed=1))
            assert g.average_degree() == pytest.approx(degree, rel=1e-12)


class TestMixturesAndSampling:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(GraphError):
            UniformMixture(0.5, 0.0, 1.0, 0.6, 0.0, 1.0)

    def test_bounds_must_be_ordered_and_non_negative(self):
        with pytest.raises(GraphError):
            UniformMixture(0.5, 2.0, 1.0, 0.5, 0.0, 1.0)
        with pytest.raises(GraphError):
            UniformMixture(0.5, -1.0, 1.0, 0.5, 0.0, 1.0)

    def test_loss_mixture_support_must_stay_below_one(self):
        bad = UniformMixture(0.5, 0.0, 1.0, 0.5, 1.0, 1.0)
        with pytest.raises(GraphError):
            CostDistribution((bad,), loss_index=0)

    def test_analytic_means(self):
        dist = default_cost_distribution()
        assert dist.attributes[0].mean() == pytest.approx(0.050750 / 3, rel=1e-12)
        assert dist.attributes[1].mean() == pytest.approx(4.5, rel=1e-12)
        assert dist.attributes[2].mean() == pytest.approx(8.0 / 3.0, rel=1e-12)

    def test_empirical_means_match_analytic(self):
        # frozen expectations: raw loss 0.0169167, latency 4.5 ms
        rng = spawn_rng(1234)
        dist = default_cost_distribution()
        loss = dist.attributes[0].sample(rng, size=1_000_000)
        latency = dist.attributes[1].sample(rng, size=1_000_000)
        assert abs(float(loss.mean()) - 0.0169167) <= 0.01 * 0.0169167
        assert abs(float(latency.mean()) - 4.5) <= 0.01 * 4.5

    def test_point_mass_mixture_pins_every_edge_cost(self):
        mix = UniformMixture(0.5, 0.25, 0.25, 0.5, 0.25, 0.25)
        dist = CostDistribution((mix, mix, mix), loss_index=0)
        g = sample_costs(generate_topology(TopologySpec(6, 8, seed=1)), dist, seed=2)
        expected = (loss_to_additive(0.25), 0.25, 0.25)
        assert all(e.cost == expected for e in g.edges)

    def test_sampling_is_deterministic_per_seed(self):
        base = generate_topology(TopologySpec(10, 14, seed=4))
        dist = default_cost_distribution()
        a = sample_costs(base, dist, seed=5)
        b = sample_costs(base, dist, seed=5)
        c = sample_costs(base, dist, seed=6)
        assert a == b
        assert a != c

    def test_loss_attribute_is_stored_in_additive_form(self):
        g = sample_costs(generate_topology(TopologySpec(20, 30, seed=8)), default_cost_distribution(), seed=9)
        for e in g.edges:
            assert e.cost[0] >= 0.0
            assert additive_to_loss(e.cost[0]) < 0.1

    def test_costs_are_finite_and_non_negative(self):
        g = sample_costs(generate_topology(TopologySpec(15, 25, seed=2)), default_cost_distribution(), seed=3)
        for e in g.edges:
            assert all(math.isfinite(c) and c >= 0.0 for c in e.cost)


class TestGraphFile:
    def test_round_trip_is_bitwise(self, tmp_path):
        g = sample_costs(generate_topology(TopologySpec(12, 20, seed=5)), default_cost_distribution(), seed=6)
        path = tmp_path / "g.txt"
        save_graph(g, path)
        loaded = load_graph(path)
        assert loaded == g
        assert loaded.num_attributes == 3

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text(
            "# banner\n"
            "mosp-graph v1\n"
            "\n"
            "nodes 2  # two of them\n"
            "0 1 0.5 1.0 2.0  # the only edge\n"
        )
        g = load_graph(path)
        assert g.node_count == 2
        assert g.edges[0].cost == (0.5, 1.0, 2.0)

    def test_single_node_graph(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 1\n")
        g = load_graph(path)
        assert (g.node_count, len(g.edges)) == (1, 0)

    def test_negative_cost_reports_line_number(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 2\n0 1 -0.5 1.0 2.0\n")
        with pytest.raises(GraphFormatError, match="line 3"):
            load_graph(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v2\nnodes 2\n0 1 1 1 1\n")
        with pytest.raises(GraphFormatError, match="header"):
            load_graph(path)

    def test_missing_nodes_line_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\n0 1 1 1 1\n")
        with pytest.raises(GraphFormatError):
            load_graph(path)

    def test_self_loop_reports_line_number(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 3\n0 1 1 1 1\n2 2 1 1 1\n")
        with pytest.raises(GraphFormatError, match="line 4"):
            load_graph(path)

    def test_node_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 2\n0 5 1 1 1\n")
        with pytest.raises(GraphFormatError, match="line 3"):
            load_graph(path)

    def test_non_numeric_cost_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 2\n0 1 fast 1 1\n")
        with pytest.raises(GraphFormatError, match="line 3"):
            load_graph(path)

    def test_inconsistent_attribute_count_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 3\n0 1 1 1 1\n1 2 1 1\n")
        with pytest.raises(GraphFormatError, match="line 4"):
            load_graph(path)

    def test_disconnected_graph_rejected(self, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("mosp-graph v1\nnodes 4\n0 1 1 1 1\n2 3 1 1 1\n")
        with pytest.raises(GraphFormatError, match="not connected"):
            load_graph(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(GraphFormatError):
            load_graph(tmp_path / "absent.txt")

    def test_two_attribute_graph_round_trips(self, tmp_path):
        g = Graph(3, [(0, 1, (1.5, 2.5)), (1, 2, (0.25, 0.125))])
        path = tmp_path / "g.txt"
        save_graph(g, path)
        loaded = load_graph(path)
        assert loaded == g
        assert loaded.num_attributes == 2

    def test_save_uses_shortest_round_trip_floats(self, tmp_path):
        g = Graph(2, [Edge(0, 1, (0.1 + 0.2, 1e-17, 3.0))])
        path = tmp_path / "g.txt"
        save_graph(g, path)
        assert load_graph(path).edges[0].cost == g.edges[0].cost
