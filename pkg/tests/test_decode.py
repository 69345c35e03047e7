import pytest
import numpy as np

from models.core.sequences import CyclicTransitionModel, validate_probability_matrix
from models.core.exceptions import ValidationError, DimensionMismatchError
from models.decode_management import (
    ORIGIN, DESTINATION, argmax_decode, build_decoding_graph, viterbi_decode, decode, sample_vertex
)
from models.oracle_management import brute_force_full
from tests.test_assertions import assert_valid_sequence
from tests.test_base import random_matrix, one_hot_matrix


class TestArgmax:
    def test_may_violate_transitions(self, invalid_argmax_3x3, model3):
        result = argmax_decode(invalid_argmax_3x3)
        assert result.states == (0, 2, 0)
        assert result.objective == pytest.approx(1.8)
        assert not result.is_valid(model3)

    def test_one_hot_rows(self):
        result = argmax_decode(validate_probability_matrix([[1, 0], [0, 1]]))
        assert result.states == (0, 1)
        assert result.objective == 2.0

    def test_ties_go_to_smaller_index(self):
        assert argmax_decode(validate_probability_matrix([[0.5, 0.5], [0.5, 0.5]])).states == (0, 0)


class TestDecodingGraph:
    @pytest.mark.parametrize("T,L,vertices,arcs", [(3, 3, 11, 18), (1, 2, 4, 4), (100, 4, 402, 800)])
    def test_sizes(self, rng, T, L, vertices, arcs):
        graph = build_decoding_graph(random_matrix(rng, T, L), CyclicTransitionModel(L))
        assert graph.n_vertices == vertices
        assert graph.n_arcs == arcs

    def test_acyclic_with_layered_order(self, example_3x3, model3):
        graph = build_decoding_graph(example_3x3, model3)
        order = graph.topological_order()
        position = {v: i for i, v in enumerate(order)}
        assert order[0] == ORIGIN and order[-1] == DESTINATION
        for u, v, _ in graph.arcs():
            assert position[u] < position[v]

    def test_arc_distances(self, example_3x3, model3):
        graph = build_decoding_graph(example_3x3, model3).graph
        assert graph[ORIGIN][sample_vertex(0, 2)]["distance"] == 0.2
        assert graph[sample_vertex(0, 0)][sample_vertex(1, 1)]["distance"] == 0.7
        assert graph[sample_vertex(2, 1)][DESTINATION]["distance"] == 0.0
        assert not graph.has_edge(sample_vertex(0, 0), sample_vertex(1, 2))

    def test_longest_path_equals_viterbi(self, rng):
        for _ in range(50):
            L = int(rng.integers(2, 5))
            P = random_matrix(rng, int(rng.integers(1, 10)), L)
            model = CyclicTransitionModel(L)
            value = build_decoding_graph(P, model).longest_path_value()
            assert value == pytest.approx(viterbi_decode(P, model).objective, abs=1e-12)


class TestViterbi:
    def test_example(self, example_3x3, model3):
        result = viterbi_decode(example_3x3, model3)
        assert result.states == (0, 1, 2)
        assert result.objective == pytest.approx(1.6)

    def test_repairs_invalid_argmax(self, invalid_argmax_3x3, model3):
        result = viterbi_decode(invalid_argmax_3x3, model3)
        assert result.states == (1, 2, 0)
        assert result.objective == pytest.approx(1.4)

    def test_consistent_one_hot_recovered(self):
        result = viterbi_decode(one_hot_matrix([0, 0, 1, 2], 3), CyclicTransitionModel(3))
        assert result.states == (0, 0, 1, 2)
        assert result.objective == 4.0

    def test_single_sample_is_argmax(self):
        P = validate_probability_matrix([[0.2, 0.5, 0.3]])
        assert viterbi_decode(P, CyclicTransitionModel(3)).states == (1,)

    def test_matches_oracle(self, rng):
        for _ in range(200):
            L = int(rng.integers(2, 5))
            P = random_matrix(rng, int(rng.integers(1, 9)), L)
            model = CyclicTransitionModel(L)
            fast, slow = viterbi_decode(P, model), brute_force_full(P, model)
            assert fast.states == slow.states
            assert abs(fast.objective - slow.objective) <= 1e-12

    def test_always_valid_and_dominates_valid_argmax(self, rng):
        for _ in range(300):
            L = int(rng.integers(2, 6))
            P = random_matrix(rng, int(rng.integers(1, 30)), L)
            model = CyclicTransitionModel(L)
            result = viterbi_decode(P, model)
            assert_valid_sequence(model, result.states)
            baseline = argmax_decode(P)
            assert result.objective <= baseline.objective + 1e-12
            if baseline.is_valid(model):
                assert result.objective == pytest.approx(baseline.objective, abs=1e-12)

    def test_deterministic(self, rng):
        P = random_matrix(rng, 40, 4)
        model = CyclicTransitionModel(4)
        assert viterbi_decode(P, model) == viterbi_decode(P, model)

    def test_dimension_mismatch(self, example_3x3):
        with pytest.raises(DimensionMismatchError):
            viterbi_decode(example_3x3, CyclicTransitionModel(4))


class TestDispatch:
    def test_methods(self, invalid_argmax_3x3, model3):
        assert decode(invalid_argmax_3x3, model3, "argmax").states == (0, 2, 0)
        assert decode(invalid_argmax_3x3, model3, "viterbi").states == (1, 2, 0)

    def test_unknown_method(self, example_3x3, model3):
        with pytest.raises(ValidationError):
            decode(example_3x3, model3, "beam")


@pytest.mark.slow
def test_long_recording_decodes_quickly():
    import time
    rng = np.random.default_rng(1)
    P = validate_probability_matrix(rng.dirichlet(np.ones(6), size=15000), rate_hz=50)
    started = time.perf_counter()
    result = viterbi_decode(P, CyclicTransitionModel(6))
    assert time.perf_counter() - started < 5.0
    assert len(result) == 15000
