import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dspectrum import (
    EdgeListParseError,
    Graph,
    ThresholdUndefinedError,
    connected_components,
    degree,
    dump_edge_list,
    epidemic_threshold,
    load_edge_list,
    max_degree,
)

from corpus import edgeless, er_graph, k4, p3, p4, star


class TestLoadEdgeList:
    def test_p3_from_text(self):
        g, report = load_edge_list("a b\nb c")
        assert g.node_count == 3
        assert g.edge_count == 2
        assert g.labels == ("a", "b", "c")
        assert report.edges_kept == 2
        assert report.self_loops_dropped == 0

    def test_simplification_counts(self):
        g, report = load_edge_list("a b\nb a\na a")
        assert g.edge_count == 1
        assert report.edges_kept == 1
        assert report.self_loops_dropped == 1
        assert report.duplicate_edges_dropped == 1

    def test_comments_ignored(self):
        g, report = load_edge_list("1 2\n2 3\n3 1\n# comment")
        assert g.node_count == 3
        assert g.edge_count == 3
        assert report.edges_kept == 3

    def test_malformed_line_names_line_number(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list("a b\na b c")
        assert exc.value.line_number == 2

    def test_empty_input_is_empty_graph(self):
        g, report = load_edge_list("")
        assert g.node_count == 0
        assert report.edges_kept == 0

    def test_first_appearance_order(self):
        g, _ = load_edge_list("x y\nz x")
        assert g.labels == ("x", "y", "z")

    def test_self_loop_only_label_is_isolated(self):
        g, report = load_edge_list("a a\nb c")
        assert g.node_count == 3
        assert g.degree(0) == 0
        assert report.isolated_nodes == 1

    def test_accepts_bytes_and_file_objects(self):
        for source in (b"a b\n", io.StringIO("a b\n"), io.BytesIO(b"a b\n")):
            g, _ = load_edge_list(source)
            assert g.edge_count == 1

    def test_degree_sum_is_twice_edge_count(self):
        g, report = load_edge_list("a b\nb c\nc d\nd a\na c")
        assert int(g.degrees.sum()) == 2 * report.edges_kept


class TestGraphInvariants:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(2, [(0, 0)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            Graph(2, [(0, 5)])

    def test_adjacency_symmetric_and_sorted(self):
        g = er_graph(30, 0.2, seed=3)
        for u in range(g.node_count):
            nbrs = g.neighbors(u)
            assert list(nbrs) == sorted(nbrs)
            for v in nbrs:
                assert u in g.neighbors(v)

    def test_arrays_read_only(self):
        g = p3()
        with pytest.raises(ValueError):
            g.degrees[0] = 7


class TestDegreeOps:
    def test_degree_examples(self):
        assert degree(k4(), 0) == 3
        assert degree(star(), 0) == 3
        assert degree(star(), 1) == 1
        assert degree(edgeless(), 2) == 0

    def test_degree_out_of_range(self):
        with pytest.raises(IndexError):
            degree(p3(), 5)

    def test_max_degree_examples(self):
        assert max_degree(k4()) == 3
        assert max_degree(p4()) == 2
        assert max_degree(edgeless()) == 0


class TestEpidemicThreshold:
    def test_k4(self):
        assert epidemic_threshold(k4()) == pytest.approx(0.5)

    def test_p3_hand_value(self):
        # degrees (1,2,1): <k>=4/3, <k^2>=2 -> 2.0
        assert epidemic_threshold(p3()) == pytest.approx(2.0)

    def test_star_hand_value(self):
        # degrees (3,1,1,1): <k>=1.5, <k^2>=3 -> 1.0
        assert epidemic_threshold(star()) == pytest.approx(1.0)

    def test_k_regular_closed_form(self):
        cycle6 = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
        assert epidemic_threshold(cycle6) == pytest.approx(1.0)
        k5 = Graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
        assert epidemic_threshold(k5) == pytest.approx(1 / 3)

    def test_perfect_matching_undefined(self):
        matching = Graph(4, [(0, 1), (2, 3)])
        with pytest.raises(ThresholdUndefinedError):
            epidemic_threshold(matching)

    def test_empty_graph_undefined(self):
        with pytest.raises(ThresholdUndefinedError):
            epidemic_threshold(Graph(0, []))


class TestRoundTrip:
    def test_p3_round_trip(self):
        g = p3()
        g2, report = load_edge_list(dump_edge_list(g))
        assert report.self_loops_dropped == 0
        assert report.duplicate_edges_dropped == 0
        assert g2.labels == g.labels
        assert list(g2.edges()) == list(g.edges())

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 25), st.floats(0.05, 0.6), st.integers(0, 10_000))
    def test_random_round_trip(self, n, p, seed):
        g = er_graph(n, p, seed)
        if g.edge_count == 0:
            return
        # drop isolated nodes first: the text format cannot carry them
        keep = np.flatnonzero(g.degrees > 0)
        remap = {int(v): i for i, v in enumerate(keep)}
        h = Graph(
            keep.size,
            [(remap[u], remap[v]) for u, v in g.edges()],
            labels=[g.labels[v] for v in keep],
        )
        h2, report = load_edge_list(dump_edge_list(h))
        assert report.self_loops_dropped == 0
        assert report.duplicate_edges_dropped == 0
        assert h2.node_count == h.node_count

        def by_label(graph):
            return {
                graph.labels[v]: {graph.labels[u] for u in graph.neighbors(v)}
                for v in range(graph.node_count)
            }

        assert by_label(h2) == by_label(h)

    def test_unrepresentable_label_rejected(self):
        g = Graph(2, [(0, 1)], labels=["ok", "not ok"])
        with pytest.raises(ValueError):
            dump_edge_list(g)


class TestComponents:
    def test_two_components(self):
        g = Graph(5, [(0, 1), (2, 3)])
        comp = connected_components(g)
        assert comp[0] == comp[1]
        assert comp[2] == comp[3]
        assert len({int(comp[0]), int(comp[2]), int(comp[4])}) == 3

    def test_sizes_sum_to_n(self):
        g = er_graph(40, 0.05, seed=9)
        comp = connected_components(g)
        assert int(np.bincount(comp).sum()) == g.node_count
