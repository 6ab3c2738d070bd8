import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multising.errors import ParseError
from multising.ingest import (
    ResultRecord,
    parse_dimacs_col,
    parse_edge_list,
    parse_graph_dump,
    parse_tsplib,
    read_results_csv,
    results_to_csv,
    results_to_json,
    serialize_graph,
    tsp_subinstance,
    tsplib_distance_matrix,
    write_results,
)
from multising.instances import BURMA14_TSP, build_graph, graph_to_dimacs
from multising.model import Graph, TspInstance


class TestDimacs:
    def test_generated_myciel3_counts(self):
        text = graph_to_dimacs(build_graph("myciel3"), "myciel3")
        g = parse_dimacs_col(text)
        assert (g.num_nodes, g.num_edges) == (11, 20)

    def test_duplicate_and_reversed_edges_deduplicated(self):
        text = "p edge 3 4\ne 1 2\ne 2 1\ne 1 2\ne 2 3\n"
        g = parse_dimacs_col(text)
        assert g.num_edges == 2

    def test_self_loop_rejected_with_line_number(self):
        with pytest.raises(ParseError, match="line 2: self-loop"):
            parse_dimacs_col("p edge 3 1\ne 1 1\n")

    def test_missing_problem_line(self):
        with pytest.raises(ParseError, match="problem line"):
            parse_dimacs_col("e 1 2\n")

    def test_non_integer_tokens(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_dimacs_col("p edge 2 1\ne one 2\n")

    def test_out_of_range_ids(self):
        with pytest.raises(ParseError, match="line 2.*range"):
            parse_dimacs_col("p edge 2 1\ne 1 5\n")

    def test_unknown_lines_warn_but_parse(self):
        with pytest.warns(UserWarning, match="unknown line type"):
            g = parse_dimacs_col("p edge 2 1\nx nonsense\ne 1 2\n")
        assert g.num_edges == 1

    def test_comments_ignored(self):
        g = parse_dimacs_col("c hello\np edge 2 1\nc mid\ne 1 2\n")
        assert g.num_edges == 1


class TestEdgeList:
    def test_zero_based_autodetect(self):
        g = parse_edge_list("0 1\n1 2\n")
        assert (g.num_nodes, g.num_edges) == (3, 2)

    def test_one_based_autodetect(self):
        g = parse_edge_list("1 2\n2 3\n")
        assert (g.num_nodes, g.num_edges) == (3, 2)

    def test_explicit_base_overrides(self):
        g = parse_edge_list("1 2\n2 3\n", base=0)
        assert g.num_nodes == 4  # node 0 exists but is isolated

    def test_empty_rejected(self):
        with pytest.raises(ParseError, match="empty"):
            parse_edge_list("\n# nothing\n")

    def test_token_error_carries_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_edge_list("0 1\n0 x\n")

    def test_duplicates_removed(self):
        g = parse_edge_list("0 1\n1 0\n0 1\n")
        assert g.num_edges == 1


class TestTsplib:
    def test_burma14_shape_and_normalization(self):
        inst = parse_tsplib(BURMA14_TSP)
        assert inst.num_cities == 14
        assert inst.weights.max() == 1.0
        assert inst.name == "burma14"

    def test_geo_regression_values(self):
        mat = tsplib_distance_matrix(BURMA14_TSP)
        assert mat[0, 1] == 153
        assert mat[0, 2] == 510
        assert mat[12, 13] == 247
        assert mat.max() == 1261

    def test_explicit_full_matrix_round_trip(self):
        text = ("NAME: toy\nTYPE: TSP\nDIMENSION: 3\n"
                "EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
                "EDGE_WEIGHT_SECTION\n0 2 4\n2 0 6\n4 6 0\nEOF\n")
        inst = parse_tsplib(text)
        assert inst.weights[0, 1] == pytest.approx(2 / 6)
        assert inst.weights.max() == 1.0

    def test_lower_diag_row(self):
        text = ("NAME: toy\nTYPE: TSP\nDIMENSION: 3\n"
                "EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW\n"
                "EDGE_WEIGHT_SECTION\n0\n2 0\n4 6 0\nEOF\n")
        mat = tsplib_distance_matrix(text)
        assert mat[0, 1] == 2 and mat[0, 2] == 4 and mat[1, 2] == 6

    def test_unsupported_weight_type_named(self):
        text = "DIMENSION: 3\nEDGE_WEIGHT_TYPE: ATT\n"
        with pytest.raises(ParseError, match="ATT"):
            parse_tsplib(text)

    def test_dimension_mismatch(self):
        text = ("DIMENSION: 4\nEDGE_WEIGHT_TYPE: EXPLICIT\n"
                "EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n"
                "0 1\n1 0\nEOF\n")
        with pytest.raises(ParseError, match="expected 16 weights"):
            parse_tsplib(text)

    def test_subinstance_renormalizes_before_slice_after(self):
        mat = tsplib_distance_matrix(BURMA14_TSP)
        sub = tsp_subinstance(mat, 5, name="burma5")
        block = mat[:5, :5].astype(float)
        np.testing.assert_allclose(sub.weights, block / block.max())

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_normalization_idempotent(self, n, seed):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.5, 9.0, size=(n, n))
        mat = np.triu(raw, k=1)
        mat = mat + mat.T
        once = TspInstance.from_matrix(mat)
        twice = TspInstance.from_matrix(once.weights)
        np.testing.assert_array_equal(once.weights, twice.weights)


class TestResults:
    def records(self):
        return [
            ResultRecord("myciel3", "vectorized-gibbs", 0, 7, 1000, 0.0, 0, 0.0, 0.5),
            ResultRecord("myciel3", "vectorized-gibbs", 1, 7, 1000, 1.0, 1, 0.05, 0.4),
            ResultRecord("queen5_5", "tabucol", 0, 7, 1000, 0.0, 0, 0.0, 0.1),
        ]

    def test_round_trip(self, tmp_path):
        recs = self.records()
        write_results(recs, tmp_path / "r.csv", tmp_path / "r.json")
        back = read_results_csv((tmp_path / "r.csv").read_text())
        assert back == recs

    def test_schema_header_present(self):
        text = results_to_csv(self.records())
        assert text.startswith("# schema=multising-results-v1\n")
        import json
        payload = json.loads(results_to_json(self.records()))
        assert payload["schema"] == "multising-results-v1"
        assert len(payload["records"]) == 3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            results_to_csv([])
        with pytest.raises(ValueError):
            results_to_json([])


class TestGraphDump:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 8), st.data())
    def test_round_trip(self, n, data):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True,
                                    max_size=len(pairs))) if pairs else []
        weights = [1.0 + 0.25 * k for k in range(len(chosen))]
        g = Graph.from_edges(n, chosen, weights)
        back = parse_graph_dump(serialize_graph(g))
        assert back.num_nodes == g.num_nodes
        assert np.array_equal(back.edges, g.edges)
        assert np.array_equal(back.edge_weights, g.edge_weights)

    def test_bad_record_rejected(self):
        with pytest.raises(ParseError, match="unknown record"):
            parse_graph_dump("g 2 1\nz 0 1 1.0\n")
