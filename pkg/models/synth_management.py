"""
Seeded synthetic recordings: cyclic semi-Markov ground truth plus noisy
per-sample probability emissions with injected noise bursts.

Ground truth and emissions draw from separate streams derived from the
recording seed, so changing the emission parameters never changes the
ground truth.
"""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import ValidationError as PydanticValidationError
from scipy.special import softmax
from scipy.stats import truncnorm
from tqdm import tqdm

from models.core.constants import (
    DEFAULT_RATE_HZ, DEFAULT_DURATION_S, DEFAULT_TEMPERATURE, DEFAULT_LOGIT_NOISE_STD, DEFAULT_BURST_NOISE_STD,
    DEFAULT_SEED, PCG_STATE_NAMES, PCG_MEAN_DURATIONS_S, PCG_STD_DURATIONS_S,
    ECG_STATE_NAMES, ECG_MEAN_DURATIONS_S, ECG_STD_DURATIONS_S
)
from models.core.sequences import ProbabilityMatrix, validate_probability_matrix
from models.core.exceptions import InvalidConfigError
from models.data_models import SynthConfig, NoiseBurst

logger = logging.getLogger(__name__)

PRESETS = ("pcg", "ecg")


def _round(x: float) -> int:
    return int(math.floor(x + 0.5))


def load_synth_config(data: Dict[str, Any]) -> SynthConfig:
    """Validate a raw mapping into a SynthConfig

    Raises:
        InvalidConfigError: The mapping violates the SynthConfig schema
    """
    try:
        return SynthConfig.model_validate(data)
    except PydanticValidationError as e:
        raise InvalidConfigError("Invalid synthetic recording configuration", details=str(e), field_name="synth")


def n_samples(cfg: SynthConfig) -> int:
    return _round(cfg.duration_s * cfg.rate_hz)


def _preset(names: Sequence[str], means_s: Sequence[float], stds_s: Sequence[float], rate_hz: float,
            duration_s: float, temperature: float, bursts: Sequence[NoiseBurst], seed: int,
            logit_noise_std: float, burst_noise_std: float) -> SynthConfig:
    return load_synth_config({
        "n_states": len(names),
        "rate_hz": rate_hz,
        "duration_s": duration_s,
        "mean_durations": [m * rate_hz for m in means_s],
        "std_durations": [s * rate_hz for s in stds_s],
        "temperature": temperature,
        "bursts": [b.model_dump() for b in bursts],
        "logit_noise_std": logit_noise_std,
        "burst_noise_std": burst_noise_std,
        "seed": seed,
        "state_names": list(names),
    })


def pcg_like_config(rate_hz: float = DEFAULT_RATE_HZ, duration_s: float = DEFAULT_DURATION_S,
                    temperature: float = DEFAULT_TEMPERATURE, bursts: Sequence[NoiseBurst] = (),
                    seed: int = DEFAULT_SEED, logit_noise_std: float = DEFAULT_LOGIT_NOISE_STD,
                    burst_noise_std: float = DEFAULT_BURST_NOISE_STD) -> SynthConfig:
    """Four-state heart sound cycle: S1, systole, S2, diastole"""
    return _preset(PCG_STATE_NAMES, PCG_MEAN_DURATIONS_S, PCG_STD_DURATIONS_S, rate_hz, duration_s,
                   temperature, bursts, seed, logit_noise_std, burst_noise_std)


def ecg_like_config(rate_hz: float = DEFAULT_RATE_HZ, duration_s: float = DEFAULT_DURATION_S,
                    temperature: float = DEFAULT_TEMPERATURE, bursts: Sequence[NoiseBurst] = (),
                    seed: int = DEFAULT_SEED, logit_noise_std: float = DEFAULT_LOGIT_NOISE_STD,
                    burst_noise_std: float = DEFAULT_BURST_NOISE_STD) -> SynthConfig:
    """Six-state ECG cycle: P, PQ, QRS, ST, T, TP"""
    return _preset(ECG_STATE_NAMES, ECG_MEAN_DURATIONS_S, ECG_STD_DURATIONS_S, rate_hz, duration_s,
                   temperature, bursts, seed, logit_noise_std, burst_noise_std)


def preset_config(preset: str, **kwargs) -> SynthConfig:
    if preset == "pcg":
        return pcg_like_config(**kwargs)
    if preset == "ecg":
        return ecg_like_config(**kwargs)
    raise InvalidConfigError(f"Unknown preset '{preset}' (expected one of {', '.join(PRESETS)})",
                             field_name="preset", invalid_value=preset)


def _draw_duration(mean: float, std: float, rng: np.random.Generator) -> int:
    if std == 0:
        return max(1, _round(mean))
    # truncated below so that rounding never yields less than one sample
    a = (0.5 - mean) / std
    value = truncnorm.rvs(a, np.inf, loc=mean, scale=std, random_state=rng)
    return max(1, _round(float(value)))


def generate_ground_truth(cfg: SynthConfig) -> np.ndarray:
    """Cyclic state sequence 0, 1, ..., L-1, 0, ... with random state durations

    Raises:
        InvalidConfigError: The configuration yields an empty signal
    """
    T = n_samples(cfg)
    if T < 1:
        raise InvalidConfigError(f"{cfg.duration_s} s at {cfg.rate_hz} Hz holds no samples", field_name="duration_s")
    rng = np.random.default_rng([cfg.seed, 0])
    states = np.empty(T, dtype=int)
    t, state = 0, 0
    while t < T:
        length = _draw_duration(cfg.mean_durations[state], cfg.std_durations[state], rng)
        states[t:t + length] = state
        t += length
        state = (state + 1) % cfg.n_states
    return states


def burst_profile(cfg: SynthConfig, n: int) -> np.ndarray:
    """Per-sample uniformity: the covering burst's value, 0 outside bursts"""
    lam = np.zeros(n)
    for burst in cfg.bursts:
        lo = _round(burst.start_s * cfg.rate_hz)
        hi = min(n, _round((burst.start_s + burst.length_s) * cfg.rate_hz))
        lam[lo:hi] = np.maximum(lam[lo:hi], burst.uniformity)
    return lam


def emit_probabilities(gt: Sequence[int], cfg: SynthConfig) -> ProbabilityMatrix:
    """Noisy probability rows around the ground truth

    logits = one_hot / temperature + N(0, sigma_t^2) with
    sigma_t = logit_noise_std + lambda_t * burst_noise_std, and
    row = (1 - lambda_t) * softmax(logits) + lambda_t / L.
    """
    gt = np.asarray(gt, dtype=int)
    if gt.size == 0 or gt.min() < 0 or gt.max() >= cfg.n_states:
        raise InvalidConfigError(f"Ground truth must be non-empty with states in [0, {cfg.n_states})",
                                 field_name="gt")
    T, L = gt.size, cfg.n_states
    rng = np.random.default_rng([cfg.seed, 1])
    lam = burst_profile(cfg, T)
    sigma = cfg.logit_noise_std + lam * cfg.burst_noise_std

    logits = np.zeros((T, L))
    logits[np.arange(T), gt] = 1.0 / cfg.temperature
    logits += rng.standard_normal((T, L)) * sigma[:, None]
    p = (1.0 - lam)[:, None] * softmax(logits, axis=1) + (lam / L)[:, None]
    return validate_probability_matrix(p, rate_hz=cfg.rate_hz, state_names=cfg.state_names)


def generate_recording(cfg: SynthConfig) -> Tuple[np.ndarray, ProbabilityMatrix]:
    gt = generate_ground_truth(cfg)
    return gt, emit_probabilities(gt, cfg)


def corpus_configs(base: SynthConfig, count: int, master_seed: int, burst_seconds: float,
                   burst_uniformity: float) -> List[SynthConfig]:
    """Per-recording configurations with independent seeds and one randomly placed burst

    Raises:
        InvalidConfigError: count < 1 or the burst does not fit in the signal
    """
    if count < 1:
        raise InvalidConfigError(f"Corpus needs at least one recording, got {count}", field_name="count")
    if burst_seconds > base.duration_s:
        raise InvalidConfigError(
            f"A {burst_seconds} s burst does not fit in {base.duration_s} s",
            field_name="burst_seconds",
            invalid_value=burst_seconds
        )
    configs = []
    for child in np.random.SeedSequence(master_seed).spawn(count):
        seed = int(child.generate_state(1, dtype=np.uint64)[0])
        bursts = []
        if burst_seconds > 0:
            start = float(np.random.default_rng(child).uniform(0.0, base.duration_s - burst_seconds))
            bursts.append(NoiseBurst(start_s=start, length_s=burst_seconds, uniformity=burst_uniformity))
        configs.append(base.model_copy(update={"seed": seed, "bursts": bursts}))
    return configs


def generate_corpus(configs: Sequence[SynthConfig], workers: int = 1,
                    progress: bool = False) -> List[Tuple[np.ndarray, ProbabilityMatrix]]:
    """Generate every recording; order follows `configs` regardless of workers"""
    if workers > 1:
        logger.info(f"Generating {len(configs)} recordings on {workers} workers")
        return list(Parallel(n_jobs=workers)(delayed(generate_recording)(cfg) for cfg in configs))
    return [generate_recording(cfg) for cfg in tqdm(configs, desc="Recordings", disable=not progress)]


def describe(cfg: SynthConfig, gt: Optional[np.ndarray] = None) -> str:
    """One-line summary used in log messages"""
    bursts = ", ".join(f"[{b.start_s:.2f}+{b.length_s:.2f}s @ {b.uniformity:.2f}]" for b in cfg.bursts) or "none"
    length = len(gt) if gt is not None else n_samples(cfg)
    return f"L={cfg.n_states} T={length} rate={cfg.rate_hz}Hz tau={cfg.temperature} seed={cfg.seed} bursts={bursts}"
