"""
Brute-force reference solvers for small instances.

These enumerate every transition-valid sequence and are the ground truth the
decoders are tested against. Hard size guards keep them from running away.
"""
import itertools
import logging
from typing import Iterator, Optional, Tuple

import networkx as nx
import numpy as np

from models.core.constants import ORACLE_MAX_SAMPLES, ORACLE_MAX_STATES, ORACLE_MAX_WINDOW
from models.core.sequences import ProbabilityMatrix, CyclicTransitionModel, DecodedSequence, WindowDecodeResult
from models.core.exceptions import dimension_mismatch, instance_too_large
from models.decode_management import DecodingGraph, ORIGIN, DESTINATION
from models.window_management import WindowSpec

logger = logging.getLogger(__name__)


def enumerate_valid_sequences(model: CyclicTransitionModel, length: int) -> Iterator[Tuple[int, ...]]:
    """Yield all L * 2^(length - 1) transition-valid sequences"""
    L = model.n_states
    for first in range(L):
        for steps in itertools.product((0, 1), repeat=length - 1):
            seq = [first]
            for step in steps:
                seq.append((seq[-1] + step) % L)
            yield tuple(seq)


def _sequence_value(p: np.ndarray, offset: int, seq: Tuple[int, ...]) -> float:
    total = 0.0
    for k, s in enumerate(seq):
        total += p[offset + k, s]
    return float(total)


def _better(value: float, seq: Tuple[int, ...], best_value: Optional[float], best_seq: Optional[Tuple[int, ...]]) -> bool:
    """Higher value wins; equal values go to the sequence smaller from the last sample backwards"""
    if best_value is None or value > best_value:
        return True
    return value == best_value and seq[::-1] < best_seq[::-1]


def _guard(P: ProbabilityMatrix, model: CyclicTransitionModel) -> None:
    if P.n_states != model.n_states:
        raise dimension_mismatch(P.n_states, model.n_states)
    if P.n_samples > ORACLE_MAX_SAMPLES:
        raise instance_too_large("T", P.n_samples, ORACLE_MAX_SAMPLES)
    if P.n_states > ORACLE_MAX_STATES:
        raise instance_too_large("L", P.n_states, ORACLE_MAX_STATES)


def brute_force_full(P: ProbabilityMatrix, model: CyclicTransitionModel) -> DecodedSequence:
    """Exhaustive constrained decode, same tie-breaks as viterbi_decode

    Raises:
        InstanceTooLargeError: T > 16 or L > 5
    """
    _guard(P, model)
    best_value, best_seq = None, None
    for seq in enumerate_valid_sequences(model, P.n_samples):
        value = _sequence_value(P.p, 0, seq)
        if _better(value, seq, best_value, best_seq):
            best_value, best_seq = value, seq
    return DecodedSequence(states=best_seq, objective=best_value)


def brute_force_window(P: ProbabilityMatrix, model: CyclicTransitionModel, spec: WindowSpec) -> WindowDecodeResult:
    """Exhaustive window selection over every start and every valid in-window sequence

    Raises:
        InstanceTooLargeError: T > 16, W > 8 or L > 5
    """
    _guard(P, model)
    width = spec.resolve(P.n_samples, P.rate_hz)
    if width > ORACLE_MAX_WINDOW:
        raise instance_too_large("W", width, ORACLE_MAX_WINDOW)

    best = None
    n_starts = P.n_samples - width + 1
    for start in range(n_starts):
        value, seq = None, None
        for candidate in enumerate_valid_sequences(model, width):
            candidate_value = _sequence_value(P.p, start, candidate)
            if _better(candidate_value, candidate, value, seq):
                value, seq = candidate_value, candidate
        # strict comparison keeps the earliest start on ties
        if best is None or value > best[0]:
            best = (value, start, seq)

    value, start, seq = best
    return WindowDecodeResult(start=start, width=width, states=seq, objective=value,
                              n_samples=P.n_samples, n_candidates=n_starts)


def longest_path_bellman_ford(graph: DecodingGraph) -> float:
    """Longest o -> d path value via Bellman-Ford on negated distances"""
    negated = nx.DiGraph()
    for u, v, distance in graph.arcs():
        negated.add_edge(u, v, cost=-distance)
    return -float(nx.bellman_ford_path_length(negated, ORIGIN, DESTINATION, weight="cost"))
