from pathlib import Path
import logging
import math
import os
from typing import List
from dataclasses import dataclass
from pydantic import ValidationError

from models.data_models import AppConfig, AppConfigMetrics, AppConfigWindow, AppConfigOutput

logger = logging.getLogger(__name__)

@dataclass
class ValidationResult:
    """Stores validation check results"""
    is_valid: bool
    errors: List[str]
    warnings: List[str]

class ConfigValidator:
    """Validates decoder and corpus configuration

    This class handles runtime validation checks that cannot
    be handled by Pydantic's built-in validation alone.
    """

    def __init__(self, config_manager):
        self.config_manager = config_manager
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def validate_all(self) -> ValidationResult:
        """Run all validation checks

        Returns:
            ValidationResult: Result of validation containing errors and warnings
        """
        self.errors.clear()
        self.warnings.clear()

        config = self.config_manager.config

        try:
            AppConfig.model_validate(config.model_dump())
        except ValidationError as e:
            for error in e.errors():
                self.errors.append(f"Config error: {error['loc']}, {error['msg']}")

        self._check_state_sets(config.metrics)
        self._check_window(config.window)
        self._check_workers(config.window)
        self._check_corpus_dir(config.output)

        return ValidationResult(
            is_valid=len(self.errors) == 0,
            errors=self.errors.copy(),
            warnings=self.warnings.copy()
        )

    def _check_state_sets(self, metrics: AppConfigMetrics) -> None:
        overlap = set(metrics.positive_states) & set(metrics.negative_states)
        if overlap:
            self.errors.append(f"States {sorted(overlap)} are both positive and negative")
        if not metrics.positive_states:
            self.warnings.append("No positive states: sensitivity will always be undefined")

    def _check_window(self, window: AppConfigWindow) -> None:
        width = int(math.floor(window.seconds * window.rate_hz + 0.5))
        if width < 1:
            self.errors.append(
                f"Default window of {window.seconds} s at {window.rate_hz} Hz covers no samples"
            )

    def _check_workers(self, window: AppConfigWindow) -> None:
        cpus = os.cpu_count() or 1
        if window.workers > cpus:
            self.warnings.append(f"{window.workers} workers requested but only {cpus} CPUs available")

    def _check_corpus_dir(self, output: AppConfigOutput) -> None:
        corpus_dir = Path(output.corpus_dir)
        if not corpus_dir.exists():
            self.warnings.append(f"Corpus directory not found at: {corpus_dir}")
            self.warnings.append("Run the synth command to create a corpus")
