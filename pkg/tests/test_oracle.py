import pytest

from models.core.sequences import CyclicTransitionModel, is_valid_sequence, validate_probability_matrix
from models.core.exceptions import InstanceTooLargeError, DimensionMismatchError
from models.decode_management import build_decoding_graph, viterbi_decode
from models.oracle_management import (
    enumerate_valid_sequences, brute_force_full, brute_force_window, longest_path_bellman_ford
)
from models.window_management import WindowSpec
from tests.test_base import random_matrix, random_instances


class TestEnumeration:
    @pytest.mark.parametrize("L,n", [(2, 1), (2, 4), (3, 5), (5, 3)])
    def test_count(self, L, n):
        sequences = list(enumerate_valid_sequences(CyclicTransitionModel(L), n))
        assert len(sequences) == L * 2 ** (n - 1)
        assert len(set(sequences)) == len(sequences)

    def test_all_valid(self):
        model = CyclicTransitionModel(4)
        assert all(is_valid_sequence(model, seq) for seq in enumerate_valid_sequences(model, 6))


class TestGuards:
    def test_too_many_samples(self, rng):
        with pytest.raises(InstanceTooLargeError):
            brute_force_full(random_matrix(rng, 17, 2), CyclicTransitionModel(2))

    def test_too_many_states(self, rng):
        with pytest.raises(InstanceTooLargeError):
            brute_force_full(random_matrix(rng, 3, 6), CyclicTransitionModel(6))

    def test_window_too_wide(self, rng):
        with pytest.raises(InstanceTooLargeError):
            brute_force_window(random_matrix(rng, 12, 2), CyclicTransitionModel(2), WindowSpec(width_samples=9))

    def test_dimension_mismatch(self, example_3x3):
        with pytest.raises(DimensionMismatchError):
            brute_force_full(example_3x3, CyclicTransitionModel(2))


class TestBruteForce:
    def test_full_example(self, invalid_argmax_3x3, model3):
        result = brute_force_full(invalid_argmax_3x3, model3)
        assert result.states == (1, 2, 0)
        assert result.objective == pytest.approx(1.4)

    def test_window_example(self, window_5x2, model2):
        result = brute_force_window(window_5x2, model2, WindowSpec(width_samples=2))
        assert (result.start, result.states) == (1, (1, 1))
        assert result.n_candidates == 4

    def test_uniform_rows_pick_smallest_reversed(self):
        P = validate_probability_matrix([[0.5, 0.5]] * 3)
        result = brute_force_full(P, CyclicTransitionModel(2))
        assert result.states == (0, 0, 0)
        assert result.states == viterbi_decode(P, CyclicTransitionModel(2)).states


class TestBellmanFord:
    def test_example(self, example_3x3, model3):
        assert longest_path_bellman_ford(build_decoding_graph(example_3x3, model3)) == pytest.approx(1.6)

    def test_equals_dynamic_program(self, rng):
        for P, L in random_instances(rng, 60, 12, 5):
            model = CyclicTransitionModel(L)
            value = longest_path_bellman_ford(build_decoding_graph(P, model))
            assert value == pytest.approx(viterbi_decode(P, model).objective, abs=1e-12)
