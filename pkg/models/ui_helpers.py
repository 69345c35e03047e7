"""
UI helper functions and constants for rendering command output.

This module centralizes all printing so that library modules stay silent.
"""
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from models.core.constants import (
    UI_SEPARATOR_WIDTH_MEDIUM, UI_SEPARATOR_WIDTH_LARGE, ERROR_PREFIX, SUCCESS_PREFIX, WARNING_PREFIX
)
from models.core.exceptions import file_write_failed
from models.core.sequences import ProbabilityMatrix, WindowDecodeResult
from models.data_models import FormulationSizes, RunReport, MetricsReport

logger = logging.getLogger(__name__)

# Color constants
GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
RESET = "\033[0m"


def print_success(message: str) -> None:
    print(f"{GREEN}{SUCCESS_PREFIX} {message}{RESET}")


def print_warning(message: str) -> None:
    print(f"{YELLOW}{WARNING_PREFIX} {message}{RESET}")


def print_error(message: str) -> None:
    print(f"{RED}{ERROR_PREFIX} {message}{RESET}", file=sys.stderr)


def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Left-aligned text table; floats are shown with four decimals"""
    def cell(value: object) -> str:
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    body = [[cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in body:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line, "-" * len(line)]
    out.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body)
    return "\n".join(out)


def display_metrics(report: MetricsReport) -> None:
    print(f"\nAccuracy:    {report.accuracy:.4f}")
    sens_note = "" if report.sensitivity_defined else " (undefined)"
    spec_note = "" if report.specificity_defined else " (undefined)"
    print(f"Sensitivity: {report.sensitivity:.4f}{sens_note}")
    print(f"Specificity: {report.specificity:.4f}{spec_note}")
    print(f"TP={report.tp} FP={report.fp} TN={report.tn} FN={report.fn}")


def display_run_report(report: RunReport, show_rows: bool = False) -> None:
    """Per-method aggregates, optionally preceded by every row"""
    if show_rows:
        print(format_table(
            ["Recording", "Method", "A", "Sens", "Spec", "TP", "FP", "TN", "FN"],
            [(r.recording, r.method, r.metrics.accuracy, r.metrics.sensitivity, r.metrics.specificity,
              r.metrics.tp, r.metrics.fp, r.metrics.tn, r.metrics.fn) for r in report.rows]
        ))
        print()
    print("=" * UI_SEPARATOR_WIDTH_LARGE)
    print(format_table(
        ["Method", "N", "mean A", "median A", "mean Sens", "median Sens", "mean Spec", "median Spec"],
        [(method, agg.count, agg.mean_accuracy, agg.median_accuracy, agg.mean_sensitivity,
          agg.median_sensitivity, agg.mean_specificity, agg.median_specificity)
         for method, agg in report.aggregates.items()]
    ))
    print("=" * UI_SEPARATOR_WIDTH_LARGE)


def display_sizes(sizes: List[FormulationSizes], n_samples: int, n_states: int) -> None:
    print(f"\nFormulation sizes for T={n_samples}, L={n_states}")
    print("=" * UI_SEPARATOR_WIDTH_MEDIUM)
    print(format_table(
        ["Formulation", "Variables", "Binary", "Constraints"],
        [(s.formulation, s.variables, s.binary_variables, s.constraints) for s in sizes]
    ))


def display_window(result: WindowDecodeResult, rate_hz: Optional[float] = None) -> None:
    print(f"\nBest window: samples [{result.start}, {result.stop}) of {result.n_samples}")
    if rate_hz:
        print(f"Time: {result.start / rate_hz:.2f} s to {result.stop / rate_hz:.2f} s")
    print(f"Width: {result.width} samples, candidates evaluated: {result.n_candidates}")
    print(f"Objective: {result.objective:.6f}")


def render_window_plot(P: ProbabilityMatrix, result: WindowDecodeResult, path: Union[str, Path]) -> Path:
    """SVG of the per-sample maximum probability with the chosen window shaded

    Raises:
        WriteFailureError: The plot cannot be saved
    """
    path = Path(path)
    rate = P.rate_hz
    x = np.arange(P.n_samples) / rate if rate else np.arange(P.n_samples)

    fig, ax = plt.subplots(figsize=(10, 3))
    ax.plot(x, P.p.max(axis=1), linewidth=0.8, color="black")
    lo = result.start / rate if rate else result.start
    hi = result.stop / rate if rate else result.stop
    ax.axvspan(lo, hi, color="tab:green", alpha=0.25, label="selected window")
    ax.set_xlabel("time (s)" if rate else "sample")
    ax.set_ylabel("max probability")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right", frameon=False)
    try:
        fig.savefig(path, format="svg", bbox_inches="tight")
    except OSError as e:
        raise file_write_failed(str(path), str(e))
    finally:
        plt.close(fig)
    logger.info(f"Window plot written to {path}")
    return path
