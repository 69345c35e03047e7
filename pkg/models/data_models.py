from pydantic import BaseModel, Field, model_validator
from typing import Any, Dict, List, Literal, Optional, Tuple

from models.core.constants import (
    DEFAULT_RATE_HZ, DEFAULT_WINDOW_SECONDS, DEFAULT_TOLERANCE_MS, PCG_POSITIVE_STATES, PCG_NEGATIVE_STATES,
    DEFAULT_CORPUS_SIZE, DEFAULT_DURATION_S, DEFAULT_TEMPERATURE, DEFAULT_BURST_SECONDS, DEFAULT_BURST_UNIFORMITY,
    DEFAULT_LOGIT_NOISE_STD, DEFAULT_BURST_NOISE_STD, DEFAULT_SEED, MAX_SEED, MIN_STATES
)


class AppConfigDecoding(BaseModel):
    """Full-sequence decoding defaults."""
    method: Literal["argmax", "viterbi"] = "viterbi"
    gate_mode: Literal["paper", "tanh_gates", "standard"] = "paper"


class AppConfigWindow(BaseModel):
    """Optimal window selection defaults."""
    seconds: float = Field(default=DEFAULT_WINDOW_SECONDS, ge=0)
    rate_hz: float = Field(default=DEFAULT_RATE_HZ, gt=0)
    workers: int = Field(default=1, ge=1)
    per_start: bool = False


class AppConfigMetrics(BaseModel):
    """Event matching defaults."""
    tolerance_ms: float = Field(default=DEFAULT_TOLERANCE_MS, gt=0)
    positive_states: List[int] = Field(default_factory=lambda: list(PCG_POSITIVE_STATES))
    negative_states: List[int] = Field(default_factory=lambda: list(PCG_NEGATIVE_STATES))


class AppConfigSynth(BaseModel):
    """Synthetic corpus defaults."""
    preset: Literal["pcg", "ecg"] = "pcg"
    count: int = Field(default=DEFAULT_CORPUS_SIZE, ge=1)
    duration_s: float = Field(default=DEFAULT_DURATION_S, gt=0)
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0)
    burst_seconds: float = Field(default=DEFAULT_BURST_SECONDS, ge=0)
    burst_uniformity: float = Field(default=DEFAULT_BURST_UNIFORMITY, ge=0, le=1)
    logit_noise_std: float = Field(default=DEFAULT_LOGIT_NOISE_STD, ge=0)
    burst_noise_std: float = Field(default=DEFAULT_BURST_NOISE_STD, ge=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=MAX_SEED)


class AppConfigOutput(BaseModel):
    """Output locations. An empty plot path disables the SVG plot."""
    corpus_dir: str = "corpus"
    plot: str = ""


class AppConfigLogging(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"


class AppConfig(BaseModel):
    """Main application configuration."""
    decoding: AppConfigDecoding = Field(default_factory=AppConfigDecoding)
    window: AppConfigWindow = Field(default_factory=AppConfigWindow)
    metrics: AppConfigMetrics = Field(default_factory=AppConfigMetrics)
    synth: AppConfigSynth = Field(default_factory=AppConfigSynth)
    output: AppConfigOutput = Field(default_factory=AppConfigOutput)
    logging: AppConfigLogging = Field(default_factory=AppConfigLogging)


class FormulationSizes(BaseModel):
    """Variable and constraint counts of one optimization formulation."""
    formulation: str
    variables: int
    binary_variables: int
    constraints: int


class NoiseBurst(BaseModel):
    """A stretch of the signal where emissions are blended toward uniform."""
    start_s: float = Field(ge=0)
    length_s: float = Field(gt=0)
    uniformity: float = Field(ge=0, le=1)


class SynthConfig(BaseModel):
    """Parameters of one synthetic recording. Durations are in samples."""
    n_states: int = Field(ge=MIN_STATES)
    rate_hz: float = Field(gt=0)
    duration_s: float = Field(gt=0)
    mean_durations: List[float]
    std_durations: List[float]
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0)
    bursts: List[NoiseBurst] = Field(default_factory=list)
    logit_noise_std: float = Field(default=DEFAULT_LOGIT_NOISE_STD, ge=0)
    burst_noise_std: float = Field(default=DEFAULT_BURST_NOISE_STD, ge=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=MAX_SEED)
    state_names: Optional[List[str]] = None

    @model_validator(mode="after")
    def _consistent(self) -> 'SynthConfig':
        if len(self.mean_durations) != self.n_states or len(self.std_durations) != self.n_states:
            raise ValueError(f"need one mean and one std duration per state ({self.n_states})")
        if any(m <= 0 for m in self.mean_durations):
            raise ValueError("mean durations must be positive")
        if any(s < 0 for s in self.std_durations):
            raise ValueError("duration standard deviations must be non-negative")
        if self.state_names is not None and len(self.state_names) != self.n_states:
            raise ValueError(f"expected {self.n_states} state names, got {len(self.state_names)}")
        for burst in self.bursts:
            if burst.start_s + burst.length_s > self.duration_s + 1e-9:
                raise ValueError(
                    f"burst [{burst.start_s}, {burst.start_s + burst.length_s}) s exceeds the "
                    f"{self.duration_s} s signal"
                )
        return self


class MetricsReport(BaseModel):
    """Sample accuracy and event-level sensitivity/specificity of one estimate."""
    accuracy: float
    sensitivity: float
    specificity: float
    tp: int
    fp: int
    tn: int
    fn: int
    sensitivity_defined: bool = True
    specificity_defined: bool = True
    tolerance_ms: float = DEFAULT_TOLERANCE_MS
    evaluated_range: Optional[Tuple[int, int]] = None


class RunRow(BaseModel):
    recording: str
    method: str
    metrics: MetricsReport


class MethodAggregate(BaseModel):
    """Mean and median of the per-recording metrics of one method."""
    count: int
    mean_accuracy: float
    median_accuracy: float
    mean_sensitivity: float
    median_sensitivity: float
    mean_specificity: float
    median_specificity: float


class RunReport(BaseModel):
    """Per-recording rows plus per-method aggregates."""
    rows: List[RunRow] = Field(default_factory=list)
    aggregates: Dict[str, MethodAggregate] = Field(default_factory=dict)
    parameters: Dict[str, Any] = Field(default_factory=dict)


class WindowReport(BaseModel):
    """Result of optimal window selection as written to disk."""
    start: int
    width: int
    objective: float
    n_candidates: int
    n_samples: int
    states: List[int]
    rate_hz: Optional[float] = None


class MatrixSidecar(BaseModel):
    """Metadata stored next to a probability matrix CSV."""
    n_states: int = Field(ge=MIN_STATES)
    rate_hz: Optional[float] = Field(default=None, gt=0)
    state_names: Optional[List[str]] = None
    synth: Optional[SynthConfig] = None


class CorpusManifest(BaseModel):
    """Generation parameters of a synthetic corpus directory."""
    preset: str
    count: int
    master_seed: int
    duration_s: float
    rate_hz: float
    temperature: float
    burst_seconds: float
    burst_uniformity: float
    recordings: List[str]


class LstmDims(BaseModel):
    N: int = Field(ge=1)
    M: int = Field(ge=1)
    L: int = Field(ge=MIN_STATES)


class DirectionWeightsFile(BaseModel):
    """One LSTM direction: input, recurrent and bias parameters of each gate."""
    W_xi: List[List[float]]
    W_xf: List[List[float]]
    W_xo: List[List[float]]
    W_xj: List[List[float]]
    W_hi: List[List[float]]
    W_hf: List[List[float]]
    W_ho: List[List[float]]
    W_hj: List[List[float]]
    b_i: List[float]
    b_f: List[float]
    b_o: List[float]
    b_j: List[float]


class LstmWeightsFile(BaseModel):
    """JSON schema of a bidirectional LSTM weight file."""
    dims: LstmDims
    forward: DirectionWeightsFile
    backward: DirectionWeightsFile
    W_out: List[List[float]]
