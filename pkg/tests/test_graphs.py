import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skppr import (
    AliasTable,
    EdgeListFormatError,
    Graph,
    GraphValidationError,
    generate_power_law,
    load_edge_list,
    read_graph,
    read_id_map,
    write_graph,
    write_id_map,
)

import helpers


class TestFromArcs:
    def test_degrees_and_neighbors(self):
        g = Graph.from_arcs(3, [(0, 1), (0, 2), (1, 0), (2, 0)], is_undirected=False)
        assert g.n == 3 and g.m == 4
        assert g.out_degrees.tolist() == [2, 1, 1]
        assert g.in_degrees.tolist() == [2, 1, 1]
        assert g.out_neighbors(0).tolist() == [1, 2]
        assert g.in_neighbors(0).tolist() == [1, 2]
        assert g.out_degree(0) == 2 and g.in_degree(2) == 1

    def test_duplicate_arcs_collapse(self):
        g = Graph.from_arcs(2, [(0, 1), (0, 1), (1, 0), (0, 1)], is_undirected=False)
        assert g.m == 2
        assert g.out_degrees.tolist() == [1, 1]

    def test_zero_out_degree_rejected_with_external_id(self):
        with pytest.raises(GraphValidationError, match="node 7 has out-degree 0"):
            Graph.from_arcs(2, [(0, 1)], is_undirected=False, ext_ids=np.array([3, 7]))

    def test_endpoint_out_of_range(self):
        with pytest.raises(GraphValidationError, match="outside"):
            Graph.from_arcs(2, [(0, 2)], is_undirected=False)

    def test_undirected_missing_reverse_rejected(self):
        with pytest.raises(GraphValidationError, match="no reverse"):
            Graph.from_arcs(3, [(0, 1), (1, 2), (2, 0)], is_undirected=True)

    def test_self_loop_counts_once(self):
        g = Graph.from_arcs(1, [(0, 0)], is_undirected=True)
        assert g.m == 1 and g.degree(0) == 1

    def test_transition_is_row_stochastic(self, small_directed):
        g = small_directed
        sums = np.asarray(g.transition.sum(axis=1)).ravel()
        assert np.allclose(sums, 1.0)
        # the transposed matrix is exactly the transpose
        assert (g.transition.T != g.transition_T).nnz == 0

    def test_arc_sources_aligns_with_out_indices(self):
        g = Graph.from_arcs(3, [(0, 1), (1, 2), (2, 0), (0, 2)], is_undirected=False)
        pairs = set(zip(g.arc_sources().tolist(), g.out_indices.tolist()))
        assert pairs == {(0, 1), (0, 2), (1, 2), (2, 0)}


class TestEdgeListIO:
    def test_first_appearance_numbering(self):
        g = load_edge_list("5 7\n7 9\n9 5\n")
        assert g.ext_ids.tolist() == [5, 7, 9]
        assert g.arcs_external() == {(5, 7), (7, 9), (9, 5)}

    def test_comments_and_blank_lines_skipped(self):
        g = load_edge_list("# header\n\n0 1\n  \n# mid\n1 0\n")
        assert g.n == 2 and g.m == 2

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(EdgeListFormatError, match="line 3") as exc:
            load_edge_list("0 1\n1 0\n0 1 2\n")
        assert exc.value.line_no == 3

    def test_non_integer_field(self):
        with pytest.raises(EdgeListFormatError, match="line 2"):
            load_edge_list("0 1\n1 x\n")

    def test_negative_id_rejected(self):
        with pytest.raises(EdgeListFormatError, match="non-negative"):
            load_edge_list("0 -1\n")

    def test_empty_input_rejected(self):
        with pytest.raises(GraphValidationError, match="empty"):
            load_edge_list("# nothing\n")

    def test_undirected_mode_materializes_both_arcs(self):
        g = load_edge_list("0 1\n", mode="undirected")
        assert g.m == 2 and g.is_undirected
        assert g.out_neighbors(0).tolist() == [1]
        assert g.out_neighbors(1).tolist() == [0]

    def test_undirected_self_loop_stays_single(self):
        g = load_edge_list("0 0\n", mode="undirected")
        assert g.m == 1 and g.degree(0) == 1

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            load_edge_list("0 1\n1 0\n", mode="both")

    def test_header_mode_sniffing(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# n=2 m=2 mode=u\n0 1\n1 0\n")
        g = read_graph(str(p))
        assert g.is_undirected and g.m == 2
        # explicit mode overrides the header
        g2 = read_graph(str(p), mode="directed")
        assert not g2.is_undirected and g2.m == 2

    def test_write_header_and_undirected_edges_once(self):
        g = load_edge_list("0 1\n1 2\n", mode="undirected")
        buf = io.StringIO()
        write_graph(g, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "# n=3 m=4 mode=u"
        assert len(lines) == 3  # header + one line per edge

    def test_structural_round_trip(self):
        # re-emission in CSR order permutes first-appearance numbering here
        text = "0 1\n0 3\n1 0\n2 3\n3 0\n3 2\n"
        g = load_edge_list(text)
        buf = io.StringIO()
        write_graph(g, buf)
        g2 = load_edge_list(buf.getvalue())
        assert g.structural_equal(g2)

    def test_id_map_round_trip_is_exact(self):
        text = "9 4\n4 9\n9 2\n2 9\n7 2\n2 7\n"
        g = load_edge_list(text, mode="directed")
        gbuf, mbuf = io.StringIO(), io.StringIO()
        write_graph(g, gbuf)
        write_id_map(g, mbuf)
        id_map = read_id_map(mbuf.getvalue())
        g2 = load_edge_list(gbuf.getvalue(), mode="directed", id_map=id_map)
        assert g2 == g
        # second emission is byte-identical
        gbuf2 = io.StringIO()
        write_graph(g2, gbuf2)
        assert gbuf2.getvalue() == gbuf.getvalue()

    def test_id_map_missing_node_rejected(self):
        with pytest.raises(GraphValidationError, match="missing from id_map"):
            load_edge_list("0 1\n1 0\n2 0\n0 2\n", id_map={0: 0, 1: 1})

    def test_id_map_must_be_dense(self):
        with pytest.raises(GraphValidationError, match="0..n-1"):
            load_edge_list("0 1\n1 0\n", id_map={0: 0, 1: 2})

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=30))
    def test_round_trip_preserves_structure(self, pairs):
        lines = "".join(f"{u} {v}\n" for u, v in pairs)
        try:
            g = load_edge_list(lines, mode="undirected")
        except GraphValidationError:
            return  # isolated-node inputs are rejected, nothing to round-trip
        buf = io.StringIO()
        write_graph(g, buf)
        g2 = load_edge_list(buf.getvalue(), mode="undirected")
        assert g.structural_equal(g2)


class TestGeneratePowerLaw:
    def test_size_and_arc_count(self):
        n, attach = 200, 4
        g = generate_power_law(n, attach, seed=0)
        assert g.n == n and g.is_undirected
        edges = attach * (attach - 1) // 2 + attach * (n - attach)
        assert g.m == 2 * edges  # distinct targets, no self-loops

    def test_connected(self):
        g = generate_power_law(300, 2, seed=3)
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for w in g.out_neighbors(v).tolist():
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        assert len(seen) == g.n

    def test_deterministic_in_seed(self):
        assert generate_power_law(100, 3, 7) == generate_power_law(100, 3, 7)

    def test_heavy_tail(self):
        g = generate_power_law(1000, 4, seed=1)
        deg = g.out_degrees
        assert deg.max() / np.median(deg) > 10

    def test_argument_validation(self):
        with pytest.raises(ValueError, match="attach"):
            generate_power_law(10, 0, 0)
        with pytest.raises(ValueError, match="n >= attach"):
            generate_power_law(3, 3, 0)


class TestAliasTable:
    def test_implied_distribution_exact(self):
        w = np.array([1.0, 2.0, 3.0, 4.0])
        table = AliasTable.from_weights(w)
        assert np.allclose(table.implied_distribution(), w / w.sum(), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0.0, 100.0, allow_nan=False), min_size=1, max_size=40).filter(
            lambda w: sum(w) > 1e-9
        )
    )
    def test_implied_distribution_matches_weights(self, w):
        table = AliasTable.from_weights(w)
        want = np.asarray(w) / sum(w)
        assert np.allclose(table.implied_distribution(), want, atol=1e-9)

    def test_sampling_frequencies(self):
        table = AliasTable.from_weights([1.0, 3.0])
        rng = np.random.default_rng(0)
        draws = table.sample_array(rng, 40000)
        assert set(np.unique(draws).tolist()) <= {0, 1}
        assert abs(draws.mean() - 0.75) < 0.01

    def test_scalar_sample_in_range(self):
        table = AliasTable.from_weights([2.0, 0.0, 1.0])
        rng = np.random.default_rng(1)
        vals = {table.sample(rng) for _ in range(200)}
        assert vals <= {0, 2}  # zero-weight entry never drawn

    def test_invalid_weights(self):
        with pytest.raises(ValueError):
            AliasTable.from_weights([])
        with pytest.raises(ValueError):
            AliasTable.from_weights([-1.0, 2.0])
        with pytest.raises(ValueError):
            AliasTable.from_weights([0.0, 0.0])
        with pytest.raises(ValueError):
            AliasTable.from_weights([np.inf])


def test_random_graph_helper_has_no_sinks():
    rng = np.random.default_rng(0)
    for directed in (True, False):
        g = helpers.random_graph(40, rng, directed=directed)
        assert int(g.out_degrees.min()) >= 1
        assert g.is_undirected == (not directed)
