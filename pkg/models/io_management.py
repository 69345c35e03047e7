"""
On-disk formats: probability matrices, state sequences, annotations,
features, LSTM weights, JSON reports and synthetic corpus directories.

Matrix CSV files have no header: T rows of L comma-separated floats. Their
metadata lives in a sidecar JSON with the same basename. State CSV files hold
one integer per line. Parse failures name the file and the 1-based line.
"""
import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError as PydanticValidationError

from models.core.constants import CORPUS_MANIFEST, STATES_SUFFIX, ANNOTATIONS_SUFFIX, RECORDING_PREFIX
from models.core.sequences import ProbabilityMatrix, validate_probability_matrix
from models.core.exceptions import (
    DataFileError, ValidationError, RowNotNormalizedError, NegativeEntryError,
    dimension_mismatch, file_parse_failed, file_write_failed
)
from models.data_models import MatrixSidecar, SynthConfig, CorpusManifest, LstmWeightsFile
from models.lstm_management import LstmWeights
from models.metrics_management import extract_events

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
ModelT = TypeVar("ModelT", bound=BaseModel)


def _read_rows(path: Path) -> List[List[str]]:
    if not path.exists():
        raise DataFileError(f"File not found: {path}", path=str(path), error_code="FILE_NOT_FOUND")
    try:
        with open(path, "r", newline="") as f:
            return [row for row in csv.reader(f)]
    except (OSError, csv.Error, UnicodeDecodeError) as e:
        raise file_parse_failed(str(path), None, str(e))


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise file_write_failed(str(path), str(e))


def sidecar_path(matrix_path: PathLike) -> Path:
    return Path(matrix_path).with_suffix(".json")


def read_json_model(model_cls: Type[ModelT], path: PathLike) -> ModelT:
    """Load a JSON file into a pydantic model

    Raises:
        DataFileError: Missing file, invalid JSON or schema violation
    """
    path = Path(path)
    if not path.exists():
        raise DataFileError(f"File not found: {path}", path=str(path), error_code="FILE_NOT_FOUND")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise file_parse_failed(str(path), e.lineno, e.msg)
    except OSError as e:
        raise file_parse_failed(str(path), None, str(e))
    try:
        return model_cls.model_validate(data)
    except PydanticValidationError as e:
        raise file_parse_failed(str(path), None, str(e))


def write_json_model(model: BaseModel, path: PathLike) -> Path:
    path = Path(path)
    _write_text(path, model.model_dump_json(indent=2) + "\n")
    logger.debug(f"Wrote {type(model).__name__} to {path}")
    return path


def read_sidecar(matrix_path: PathLike) -> Optional[MatrixSidecar]:
    path = sidecar_path(matrix_path)
    if not path.exists():
        return None
    return read_json_model(MatrixSidecar, path)


def read_matrix_csv(path: PathLike, rate_hz: Optional[float] = None,
                    n_states: Optional[int] = None) -> ProbabilityMatrix:
    """Read and validate a probability matrix CSV

    The rate and state names come from the sidecar when present; an explicit
    `rate_hz` takes precedence.

    Raises:
        DataFileError: Missing file or a non-numeric entry
        ValidationError: The matrix is not a valid probability matrix, or its
            column count differs from `n_states`
    """
    path = Path(path)
    rows, line_numbers = [], []
    for lineno, row in enumerate(_read_rows(path), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([float(cell) for cell in row])
            line_numbers.append(lineno)
        except ValueError as e:
            raise file_parse_failed(str(path), lineno, str(e))

    sidecar = read_sidecar(path)
    rate = rate_hz if rate_hz is not None else (sidecar.rate_hz if sidecar else None)
    names = sidecar.state_names if sidecar else None
    try:
        P = validate_probability_matrix(rows, rate_hz=rate, state_names=names)
    except (RowNotNormalizedError, NegativeEntryError) as e:
        e.details = f"{path}, line {line_numbers[e.row]}"
        raise
    except ValidationError as e:
        e.details = e.details or str(path)
        raise
    if n_states is not None and P.n_states != n_states:
        raise dimension_mismatch(P.n_states, n_states)
    logger.debug(f"Read {P.n_samples}x{P.n_states} matrix from {path}")
    return P


def write_matrix_csv(P: ProbabilityMatrix, path: PathLike, synth: Optional[SynthConfig] = None) -> Path:
    """Write the matrix losslessly plus its sidecar JSON"""
    path = Path(path)
    lines = [",".join(f"{v:.17g}" for v in row) for row in P.p]
    _write_text(path, "\n".join(lines) + "\n")
    sidecar = MatrixSidecar(
        n_states=P.n_states,
        rate_hz=P.rate_hz,
        state_names=list(P.state_names) if P.state_names else None,
        synth=synth
    )
    write_json_model(sidecar, sidecar_path(path))
    return path


def read_states_csv(path: PathLike) -> np.ndarray:
    """One integer state per line

    Raises:
        DataFileError: Missing file, a non-integer line, or no states at all
    """
    path = Path(path)
    states = []
    for lineno, row in enumerate(_read_rows(path), start=1):
        if not row or not row[0].strip():
            continue
        if len(row) != 1:
            raise file_parse_failed(str(path), lineno, f"expected one state per line, got {len(row)} fields")
        try:
            states.append(int(row[0]))
        except ValueError as e:
            raise file_parse_failed(str(path), lineno, str(e))
    if not states:
        raise file_parse_failed(str(path), None, "no states")
    return np.asarray(states, dtype=int)


def write_states_csv(states: Sequence[int], path: PathLike) -> Path:
    path = Path(path)
    _write_text(path, "".join(f"{int(s)}\n" for s in states))
    return path


def write_annotations_csv(states: Sequence[int], path: PathLike) -> Path:
    """Run-length annotation rows start,end,state (end inclusive)"""
    path = Path(path)
    _write_text(path, "".join(f"{ev.start},{ev.end},{ev.state}\n" for ev in extract_events(states)))
    return path


def read_annotations_csv(path: PathLike) -> np.ndarray:
    """Expand start,end,state rows back into a per-sample state sequence

    Raises:
        DataFileError: Malformed rows or runs that leave gaps or overlap
    """
    path = Path(path)
    states: List[int] = []
    for lineno, row in enumerate(_read_rows(path), start=1):
        if not row or not row[0].strip():
            continue
        try:
            start, end, state = (int(cell) for cell in row)
        except ValueError as e:
            raise file_parse_failed(str(path), lineno, f"expected start,end,state: {e}")
        if start != len(states) or end < start:
            raise file_parse_failed(str(path), lineno, f"run [{start}, {end}] does not continue at {len(states)}")
        states.extend([state] * (end - start + 1))
    if not states:
        raise file_parse_failed(str(path), None, "no annotations")
    return np.asarray(states, dtype=int)


def read_state_file(path: PathLike) -> np.ndarray:
    """States from either a per-sample CSV or an annotation CSV"""
    if str(path).endswith(ANNOTATIONS_SUFFIX):
        return read_annotations_csv(path)
    return read_states_csv(path)


def read_features_csv(path: PathLike) -> np.ndarray:
    """T rows of N comma-separated floats, no header"""
    path = Path(path)
    rows = []
    for lineno, row in enumerate(_read_rows(path), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as e:
            raise file_parse_failed(str(path), lineno, str(e))
    if not rows:
        raise file_parse_failed(str(path), None, "no feature rows")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise file_parse_failed(str(path), lineno, f"expected {width} features, got {len(row)}")
    return np.asarray(rows, dtype=np.float64)


def read_weights(path: PathLike) -> LstmWeights:
    """Load and shape-check an LSTM weight JSON file

    Raises:
        DataFileError: Missing file or schema violation
        ValidationError: Ragged, misshapen or non-finite parameters; details name the file
    """
    try:
        return LstmWeights.from_file_model(read_json_model(LstmWeightsFile, path))
    except ValidationError as e:
        e.details = e.details or str(path)
        raise


def write_weights(weights: LstmWeights, path: PathLike) -> Path:
    return write_json_model(weights.to_file_model(), path)


@dataclass(frozen=True)
class CorpusRecording:
    name: str
    gt: np.ndarray
    P: ProbabilityMatrix
    config: Optional[SynthConfig] = None


def recording_name(index: int) -> str:
    return f"{RECORDING_PREFIX}{index:03d}"


def write_corpus(directory: PathLike, recordings: Sequence[CorpusRecording], manifest: CorpusManifest) -> Path:
    """Write every recording's matrix, sidecar, states and annotations plus the manifest"""
    directory = Path(directory)
    for rec in recordings:
        write_matrix_csv(rec.P, directory / f"{rec.name}.csv", synth=rec.config)
        write_states_csv(rec.gt, directory / f"{rec.name}{STATES_SUFFIX}")
        write_annotations_csv(rec.gt, directory / f"{rec.name}{ANNOTATIONS_SUFFIX}")
    write_json_model(manifest, directory / CORPUS_MANIFEST)
    logger.info(f"Wrote {len(recordings)} recordings to {directory}")
    return directory


def load_corpus(directory: PathLike) -> List[CorpusRecording]:
    """Load every recording of a corpus directory, ordered by name

    Raises:
        DataFileError: Missing directory, no recordings, or a recording
            without its ground-truth states file
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataFileError(f"Corpus directory not found: {directory}", path=str(directory),
                            error_code="CORPUS_NOT_FOUND")
    matrices = sorted(p for p in directory.glob(f"{RECORDING_PREFIX}*.csv")
                      if not p.name.endswith(STATES_SUFFIX) and not p.name.endswith(ANNOTATIONS_SUFFIX))
    if not matrices:
        raise DataFileError(f"No recordings in {directory}", path=str(directory), error_code="CORPUS_EMPTY")

    recordings = []
    for matrix_path in matrices:
        name = matrix_path.stem
        P = read_matrix_csv(matrix_path)
        gt = read_states_csv(directory / f"{name}{STATES_SUFFIX}")
        sidecar = read_sidecar(matrix_path)
        recordings.append(CorpusRecording(name=name, gt=gt, P=P, config=sidecar.synth if sidecar else None))
    logger.info(f"Loaded {len(recordings)} recordings from {directory}")
    return recordings
