import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multising.bench import tour_cost
from multising.errors import CapacityError
from multising.instances import BURMA14_TSP, build_instance
from multising.ingest import parse_tsplib, tsplib_distance_matrix
from multising.model import ColoringInstance, Graph, encode_values
from multising.onehot import build_onehot
from multising.oracles import (
    enumerate_min_energy,
    exact_min_conflicts,
    held_karp,
    held_karp_matrix,
)
from multising.vectorized import build_coloring_model

# Held-Karp on the raw burma14 GEO matrix, frozen once verified against the
# published optimum.
BURMA14_OPT_RAW = 3323.0
BURMA14_MAX_DIST = 1261.0


def triangle(q):
    return ColoringInstance(
        graph=Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]), q=q, name="k3")


class TestMinConflicts:
    def test_triangle_two_colors(self):
        assert exact_min_conflicts(triangle(2)).value == 1.0

    def test_triangle_three_colors(self):
        assert exact_min_conflicts(triangle(3)).value == 0.0

    def test_myciel4_is_five_colorable(self):
        res = exact_min_conflicts(build_instance("myciel4"))
        assert res.value == 0.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 6), st.data())
    def test_rainbow_coloring_when_q_at_least_n(self, n, data):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        chosen = data.draw(st.lists(st.sampled_from(pairs), max_size=len(pairs),
                                    unique=True))
        inst = ColoringInstance(graph=Graph.from_edges(n, chosen), q=n,
                                name="rand")
        assert exact_min_conflicts(inst).value == 0.0

    def test_witness_reevaluates_to_value(self):
        inst = triangle(2)
        res = exact_min_conflicts(inst)
        colors = res.witness
        clashes = sum(1 for u, v in inst.graph.edges if colors[u] == colors[v])
        assert clashes == res.value

    def test_myciel3_witness_grounds_the_vectorized_model(self):
        inst = build_instance("myciel3")
        res = exact_min_conflicts(inst)
        assert res.value == 0.0
        model = build_coloring_model(inst)
        state = encode_values([int(c) for c in res.witness], model.layout)
        assert model.energy(state) == 0.0

    def test_capacity_refusal(self):
        graph = Graph.from_edges(100, [(i, i + 1) for i in range(99)])
        inst = ColoringInstance(graph=graph, q=30, name="big")
        with pytest.raises(CapacityError):
            exact_min_conflicts(inst)


class TestHeldKarp:
    def test_three_cities_unique_tour(self):
        mat = np.array([[0, 2, 3], [2, 0, 4], [3, 4, 0]], dtype=float)
        cost, tour = held_karp_matrix(mat)
        assert cost == 2 + 4 + 3
        assert sorted(tour) == [0, 1, 2]

    def test_four_city_ring(self):
        # ring edges cheap, diagonals dear: the ring tour wins over the other
        # two distinct tours (checked by enumerating all of them)
        ring = np.array([
            [0, 1, 5, 1],
            [1, 0, 1, 5],
            [5, 1, 0, 1],
            [1, 5, 1, 0]], dtype=float)
        import itertools
        best = min(tour_cost([0] + list(p), ring)
                   for p in itertools.permutations([1, 2, 3]))
        cost, tour = held_karp_matrix(ring)
        assert cost == best == 4.0
        assert tour_cost(tour, ring) == cost

    def test_burma14_pinned_optimum(self):
        mat = tsplib_distance_matrix(BURMA14_TSP).astype(float)
        cost, tour = held_karp_matrix(mat)
        assert cost == BURMA14_OPT_RAW
        assert tour_cost(tour, mat) == cost

    def test_normalized_instance_scales(self):
        inst = parse_tsplib(BURMA14_TSP)
        res = held_karp(inst)
        assert res.value == pytest.approx(BURMA14_OPT_RAW / BURMA14_MAX_DIST)
        assert tour_cost(res.witness, inst.weights) == pytest.approx(res.value)

    def test_capacity_refusal(self):
        mat = np.zeros((21, 21))
        with pytest.raises(CapacityError):
            held_karp_matrix(mat)


class TestEnumerate:
    def test_single_edge_onehot_ground_state(self):
        inst = ColoringInstance(graph=Graph.from_edges(2, [(0, 1)]), q=2,
                                name="e")
        model = build_onehot(inst, 1.0, 1.0)
        res = enumerate_min_energy(model)
        assert res.value == 0.0
        assert model.energy(res.witness) == 0.0

    def test_k3_q2_vectorized_floor(self):
        res = enumerate_min_energy(build_coloring_model(triangle(2)))
        assert res.value == 1.0
        assert res.nodes_explored == 8

    def test_cross_oracle_consistency(self):
        # both mappings agree with the conflict oracle about colorability
        cases = [
            (Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), 2, True),
            (Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]), 2, False),
        ]
        for graph, q, colorable in cases:
            inst = ColoringInstance(graph=graph, q=q, name="g")
            oh = enumerate_min_energy(build_onehot(inst, 1.0, 1.0))
            vec = enumerate_min_energy(build_coloring_model(inst))
            conflicts = exact_min_conflicts(inst)
            assert (oh.value == 0.0) == colorable
            assert (vec.value == 0.0) == colorable
            assert (conflicts.value == 0.0) == colorable

    def test_witness_matches_energy_api(self):
        model = build_coloring_model(triangle(3))
        res = enumerate_min_energy(model)
        assert model.energy(res.witness) == res.value

    def test_capacity_refusal(self):
        graph = Graph.from_edges(13, [(i, i + 1) for i in range(12)])
        inst = ColoringInstance(graph=graph, q=4, name="path13")
        model = build_coloring_model(inst)  # 26 bits
        with pytest.raises(CapacityError):
            enumerate_min_energy(model)

    def test_chunked_enumeration_matches_single_chunk(self):
        model = build_coloring_model(triangle(3))  # 6 bits
        small = enumerate_min_energy(model, chunk=8)
        big = enumerate_min_energy(model, chunk=1 << 16)
        assert small.value == big.value
        assert np.array_equal(small.witness, big.witness)
