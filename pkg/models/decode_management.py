"""
Full-sequence decoding: the per-sample argmax baseline and the exact
constrained decoder (longest o -> d path in the time-layered DAG).
"""
import logging
from dataclasses import dataclass
from typing import Hashable, List, Tuple

import networkx as nx
import numpy as np

from models.core.sequences import ProbabilityMatrix, CyclicTransitionModel, DecodedSequence
from models.core.exceptions import ValidationError, dimension_mismatch

logger = logging.getLogger(__name__)

ORIGIN = "o"
DESTINATION = "d"

DECODE_METHODS = ("argmax", "viterbi")


def sample_vertex(t: int, s: int) -> Tuple[str, int, int]:
    return ("v", t, s)


@dataclass(frozen=True)
class DecodingGraph:
    """Time-layered DAG whose o -> d paths are the transition-valid sequences

    Vertices are "o", "d" and ("v", t, s). The arc entering ("v", t, s) carries
    distance p[t][s]; arcs entering "d" carry 0.
    """
    graph: nx.DiGraph
    n_samples: int
    n_states: int

    @property
    def n_vertices(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def n_arcs(self) -> int:
        return self.graph.number_of_edges()

    def arcs(self) -> List[Tuple[Hashable, Hashable, float]]:
        return [(u, v, data["distance"]) for u, v, data in self.graph.edges(data=True)]

    def topological_order(self) -> List[Hashable]:
        order: List[Hashable] = [ORIGIN]
        for t in range(self.n_samples):
            order.extend(sample_vertex(t, s) for s in range(self.n_states))
        order.append(DESTINATION)
        return order

    def longest_path_value(self) -> float:
        return float(nx.dag_longest_path_length(self.graph, weight="distance", default_weight=0.0))


def _check_dimensions(P: ProbabilityMatrix, model: CyclicTransitionModel) -> None:
    if P.n_states != model.n_states:
        raise dimension_mismatch(P.n_states, model.n_states)


def argmax_decode(P: ProbabilityMatrix) -> DecodedSequence:
    """Pick the most likely state per sample, ignoring transitions

    Ties go to the smaller state index. The result may violate the
    transition model.
    """
    states = np.argmax(P.p, axis=1)
    objective = 0.0
    for t, s in enumerate(states):
        objective += P.p[t, s]
    return DecodedSequence(states=tuple(int(s) for s in states), objective=float(objective))


def build_decoding_graph(P: ProbabilityMatrix, model: CyclicTransitionModel) -> DecodingGraph:
    """Build the |V| = T*L + 2, |A| = 2*L*T decoding graph"""
    _check_dimensions(P, model)
    T, L = P.n_samples, P.n_states
    graph = nx.DiGraph()
    graph.add_node(ORIGIN)
    for s in range(L):
        graph.add_edge(ORIGIN, sample_vertex(0, s), distance=float(P.p[0, s]))
    for t in range(T - 1):
        for s in range(L):
            for nxt in model.successors(s):
                graph.add_edge(sample_vertex(t, s), sample_vertex(t + 1, nxt), distance=float(P.p[t + 1, nxt]))
    for s in range(L):
        graph.add_edge(sample_vertex(T - 1, s), DESTINATION, distance=0.0)
    logger.debug(f"Decoding graph built: {graph.number_of_nodes()} vertices, {graph.number_of_edges()} arcs")
    return DecodingGraph(graph=graph, n_samples=T, n_states=L)


def advance_scores(scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One layer of the DP: best predecessor value and choice for every state

    `scores` holds the best prefix value per state on its last axis. The
    predecessors of s are s (stay) and s - 1 mod L (advance). Returns the best
    predecessor value and a boolean that is True where the advance
    predecessor is taken; equal values go to the smaller state index.
    """
    stay = scores
    advance = np.roll(scores, 1, axis=-1)
    L = scores.shape[-1]
    # s - 1 is the smaller index for every s except s = 0, whose advance
    # predecessor is L - 1
    prefer_advance_on_tie = np.arange(L) != 0
    take_advance = (advance > stay) | ((advance == stay) & prefer_advance_on_tie)
    return np.where(take_advance, advance, stay), take_advance


def best_constrained_value(p: np.ndarray) -> float:
    """Optimal objective of the constrained decode of rows `p`, without backtracking"""
    scores = p[0].copy()
    for t in range(1, p.shape[0]):
        best, _ = advance_scores(scores)
        scores = best + p[t]
    return float(scores.max())


def viterbi_decode(P: ProbabilityMatrix, model: CyclicTransitionModel) -> DecodedSequence:
    """Exact constrained decode by dynamic programming over time layers

    Equivalent to the longest o -> d path in the decoding graph. Optimal
    predecessor ties and optimal final-state ties both go to the smaller
    state index.
    """
    _check_dimensions(P, model)
    T, L = P.n_samples, P.n_states
    p = P.p
    took_advance = np.zeros((T, L), dtype=bool)
    scores = p[0].copy()
    for t in range(1, T):
        best, take_advance = advance_scores(scores)
        took_advance[t] = take_advance
        scores = best + p[t]

    last = int(np.argmax(scores))
    objective = float(scores[last])
    states = [0] * T
    states[T - 1] = last
    for t in range(T - 1, 0, -1):
        s = states[t]
        states[t - 1] = (s - 1) % L if took_advance[t, s] else s
    logger.debug(f"Constrained decode of {T} samples: objective {objective:.6f}")
    return DecodedSequence(states=tuple(states), objective=objective)


def decode(P: ProbabilityMatrix, model: CyclicTransitionModel, method: str = "viterbi") -> DecodedSequence:
    """Dispatch to the named full-sequence decoder"""
    if method == "argmax":
        _check_dimensions(P, model)
        return argmax_decode(P)
    if method == "viterbi":
        return viterbi_decode(P, model)
    raise ValidationError(
        f"Unknown decode method '{method}' (expected one of {', '.join(DECODE_METHODS)})",
        field_name="method",
        invalid_value=method
    )
