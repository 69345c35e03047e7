"""
Bidirectional LSTM inference: feature sequence -> hidden states -> per-sample
state probabilities.

Only the forward computation is provided; weights come from a JSON weight
file or from the seeded initializer used to build test fixtures.
"""
import logging
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import expit, softmax

from models.core.constants import GATE_MODE_ALIAS, LSTM_INIT_LOW, LSTM_INIT_HIGH
from models.core.sequences import ProbabilityMatrix, validate_probability_matrix
from models.core.exceptions import ShapeMismatchError, NonFiniteInputError
from models.data_models import LstmDims, DirectionWeightsFile, LstmWeightsFile

logger = logging.getLogger(__name__)

GATES = ("i", "f", "o", "j")


def _as_array(value, name: str) -> np.ndarray:
    try:
        return np.asarray(value, dtype=np.float64)
    except ValueError:
        raise ShapeMismatchError(f"{name} has rows of different lengths", field_name=name)


class GateMode(str, Enum):
    """Activation placement in the cell update

    paper:    i = tanh, f = sigmoid, o = tanh, candidate = sigmoid (alias: tanh_gates)
    standard: i, f, o = sigmoid, candidate = tanh
    """
    PAPER = "paper"
    STANDARD = "standard"

    @classmethod
    def _missing_(cls, value):
        if value == GATE_MODE_ALIAS:
            return cls.PAPER
        return None

    @classmethod
    def choices(cls) -> list:
        return [m.value for m in cls] + [GATE_MODE_ALIAS]


@dataclass(frozen=True)
class DirectionWeights:
    """Parameters of one direction; W_x* are M x N, W_h* are M x M, b_* have length M"""
    W_xi: np.ndarray
    W_xf: np.ndarray
    W_xo: np.ndarray
    W_xj: np.ndarray
    W_hi: np.ndarray
    W_hf: np.ndarray
    W_ho: np.ndarray
    W_hj: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_o: np.ndarray
    b_j: np.ndarray

    def validate(self, n_features: int, memory: int, direction: str) -> None:
        for gate in GATES:
            expected = {
                f"W_x{gate}": (memory, n_features),
                f"W_h{gate}": (memory, memory),
                f"b_{gate}": (memory,),
            }
            for name, shape in expected.items():
                array = getattr(self, name)
                if array.shape != shape:
                    raise ShapeMismatchError(
                        f"{direction}.{name} has shape {array.shape}, expected {shape}",
                        field_name=f"{direction}.{name}",
                        invalid_value=array.shape
                    )
                if not np.all(np.isfinite(array)):
                    raise NonFiniteInputError(f"{direction}.{name} holds non-finite values", field_name=name)


@dataclass(frozen=True)
class LstmWeights:
    n_features: int
    memory: int
    n_states: int
    forward: DirectionWeights
    backward: DirectionWeights
    W_out: np.ndarray

    def validate(self) -> 'LstmWeights':
        """Check every shape against (N, M, L)

        Raises:
            ShapeMismatchError: A parameter has the wrong shape
            NonFiniteInputError: A parameter holds NaN or inf
        """
        self.forward.validate(self.n_features, self.memory, "forward")
        self.backward.validate(self.n_features, self.memory, "backward")
        expected = (self.n_states, 2 * self.memory)
        if self.W_out.shape != expected:
            raise ShapeMismatchError(
                f"W_out has shape {self.W_out.shape}, expected {expected}",
                field_name="W_out",
                invalid_value=self.W_out.shape
            )
        if not np.all(np.isfinite(self.W_out)):
            raise NonFiniteInputError("W_out holds non-finite values", field_name="W_out")
        return self

    @classmethod
    def from_file_model(cls, model: LstmWeightsFile) -> 'LstmWeights':
        """Convert a parsed weight file and check every shape

        Raises:
            ShapeMismatchError: A matrix is ragged or has the wrong shape
        """
        def direction(d: DirectionWeightsFile, prefix: str) -> DirectionWeights:
            return DirectionWeights(**{name: _as_array(value, f"{prefix}.{name}")
                                       for name, value in d.model_dump().items()})

        weights = cls(
            n_features=model.dims.N,
            memory=model.dims.M,
            n_states=model.dims.L,
            forward=direction(model.forward, "forward"),
            backward=direction(model.backward, "backward"),
            W_out=_as_array(model.W_out, "W_out")
        )
        return weights.validate()

    def to_file_model(self) -> LstmWeightsFile:
        def direction(d: DirectionWeights) -> DirectionWeightsFile:
            return DirectionWeightsFile(**{f.name: getattr(d, f.name).tolist() for f in fields(d)})

        return LstmWeightsFile(
            dims=LstmDims(N=self.n_features, M=self.memory, L=self.n_states),
            forward=direction(self.forward),
            backward=direction(self.backward),
            W_out=self.W_out.tolist()
        )


def init_random_weights(n_features: int, memory: int, n_states: int, seed: int,
                        low: float = LSTM_INIT_LOW, high: float = LSTM_INIT_HIGH) -> LstmWeights:
    """Uniform random weights in [low, high), reproducible from `seed`"""
    rng = np.random.default_rng(seed)

    def direction() -> DirectionWeights:
        params = {}
        for gate in GATES:
            params[f"W_x{gate}"] = rng.uniform(low, high, size=(memory, n_features))
            params[f"W_h{gate}"] = rng.uniform(low, high, size=(memory, memory))
            params[f"b_{gate}"] = rng.uniform(low, high, size=memory)
        return DirectionWeights(**params)

    return LstmWeights(
        n_features=n_features,
        memory=memory,
        n_states=n_states,
        forward=direction(),
        backward=direction(),
        W_out=rng.uniform(low, high, size=(n_states, 2 * memory))
    )


def swap_directions(weights: LstmWeights) -> LstmWeights:
    """Exchange forward and backward parameters and the matching halves of W_out"""
    M = weights.memory
    W_out = np.concatenate([weights.W_out[:, M:], weights.W_out[:, :M]], axis=1)
    return replace(weights, forward=weights.backward, backward=weights.forward, W_out=W_out)


def validate_features(raw: Union[np.ndarray, Sequence[Sequence[float]]], n_features: int) -> np.ndarray:
    """Return the T x N feature matrix as float64

    Raises:
        ShapeMismatchError: Not 2-D, empty, or N does not match the weights
        NonFiniteInputError: NaN or infinite entries
    """
    try:
        x = np.asarray(raw, dtype=np.float64)
    except ValueError as e:
        raise ShapeMismatchError(f"Feature rows have inconsistent lengths: {e}", field_name="x")
    if x.ndim != 2 or x.shape[0] == 0:
        raise ShapeMismatchError(f"Features must be a non-empty T x N matrix, got shape {x.shape}", field_name="x")
    if x.shape[1] != n_features:
        raise ShapeMismatchError(
            f"Features have {x.shape[1]} columns, weights expect {n_features}",
            field_name="x",
            invalid_value=x.shape[1]
        )
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("Features hold non-finite values", field_name="x")
    return x


def _run_direction(d: DirectionWeights, x: np.ndarray, gate_mode: GateMode) -> np.ndarray:
    T = x.shape[0]
    M = d.b_i.shape[0]
    # input projections for all samples at once
    xi = x @ d.W_xi.T + d.b_i
    xf = x @ d.W_xf.T + d.b_f
    xo = x @ d.W_xo.T + d.b_o
    xj = x @ d.W_xj.T + d.b_j

    h = np.zeros(M)
    c = np.zeros(M)
    out = np.empty((T, M))
    for t in range(T):
        zi = xi[t] + d.W_hi @ h
        zf = xf[t] + d.W_hf @ h
        zo = xo[t] + d.W_ho @ h
        zj = xj[t] + d.W_hj @ h
        if gate_mode is GateMode.PAPER:
            i, f, o, j = np.tanh(zi), expit(zf), np.tanh(zo), expit(zj)
        else:
            i, f, o, j = expit(zi), expit(zf), expit(zo), np.tanh(zj)
        c = c * f + i * j
        h = np.tanh(c) * o
        out[t] = h
    return out


def lstm_forward(weights: LstmWeights, x: np.ndarray,
                 gate_mode: Union[GateMode, str] = GateMode.PAPER) -> np.ndarray:
    """Run both directions and concatenate: row t is [forward h_t, backward h_t]

    h and c start at zero at both ends of the sequence.

    Returns:
        np.ndarray: T x 2M hidden matrix
    """
    gate_mode = GateMode(gate_mode)
    weights.validate()
    x = validate_features(x, weights.n_features)
    forward = _run_direction(weights.forward, x, gate_mode)
    backward = _run_direction(weights.backward, x[::-1], gate_mode)[::-1]
    return np.concatenate([forward, backward], axis=1)


def output_probabilities(W_out: np.ndarray, h: np.ndarray, rate_hz: Optional[float] = None) -> ProbabilityMatrix:
    """Softmax output layer p_t = softmax(W_out h_t)

    Raises:
        ShapeMismatchError: W_out columns do not match the hidden width
    """
    W_out = np.asarray(W_out, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or W_out.ndim != 2 or W_out.shape[1] != h.shape[1]:
        raise ShapeMismatchError(
            f"W_out {W_out.shape} cannot be applied to hidden states {h.shape}",
            field_name="W_out",
            invalid_value=W_out.shape
        )
    logits = h @ W_out.T
    p = softmax(logits, axis=1)
    return validate_probability_matrix(p, rate_hz=rate_hz)


def infer_probabilities(weights: LstmWeights, x: np.ndarray,
                        gate_mode: Union[GateMode, str] = GateMode.PAPER,
                        rate_hz: Optional[float] = None) -> ProbabilityMatrix:
    """Features to probability matrix: forward pass followed by the output layer"""
    h = lstm_forward(weights, x, gate_mode)
    P = output_probabilities(weights.W_out, h, rate_hz=rate_hz)
    logger.debug(f"LSTM inference: T={P.n_samples}, M={weights.memory}, L={P.n_states}, gates={GateMode(gate_mode).value}")
    return P
