"""
Constants used throughout the HeartPath decoder.

This module centralizes tolerances, defaults and limits so that the decoders,
the metrics and the CLI agree on the same values.
"""

# Probability matrix validation
ROW_SUM_TOLERANCE = 1e-6
RENORMALIZE_LOG_THRESHOLD = 1e-12
MIN_STATES = 2

# Sampling
DEFAULT_RATE_HZ = 50.0
DEFAULT_WINDOW_SECONDS = 5.0

# Event matching
DEFAULT_TOLERANCE_MS = 60.0
MS_PER_SECOND = 1000.0

# PCG state layout (S1, systole, S2, diastole)
PCG_STATE_NAMES = ("S1", "systole", "S2", "diastole")
PCG_POSITIVE_STATES = (0, 2)
PCG_NEGATIVE_STATES = (1, 3)
PCG_MEAN_DURATIONS_S = (0.12, 0.30, 0.10, 0.45)
PCG_STD_DURATIONS_S = (0.02, 0.025, 0.02, 0.05)

# ECG state layout
ECG_STATE_NAMES = ("P", "PQ", "QRS", "ST", "T", "TP")
ECG_MEAN_DURATIONS_S = (0.10, 0.06, 0.10, 0.10, 0.16, 0.30)
ECG_STD_DURATIONS_S = (0.015, 0.01, 0.015, 0.02, 0.03, 0.06)

# Synthetic emissions
DEFAULT_TEMPERATURE = 0.5
DEFAULT_LOGIT_NOISE_STD = 0.4
DEFAULT_BURST_NOISE_STD = 3.0
DEFAULT_BURST_SECONDS = 4.0
DEFAULT_BURST_UNIFORMITY = 0.9
DEFAULT_CORPUS_SIZE = 100
DEFAULT_DURATION_S = 20.0
DEFAULT_SEED = 20200611
MAX_SEED = 2**64

# Brute-force oracle guards
ORACLE_MAX_SAMPLES = 16
ORACLE_MAX_STATES = 5
ORACLE_MAX_WINDOW = 8

# LSTM
LSTM_INIT_LOW = -0.05
LSTM_INIT_HIGH = 0.05
GATE_MODE_ALIAS = "tanh_gates"

# LP export
LP_SIGNIFICANT_DIGITS = 12
LP_TERMS_PER_LINE = 8

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3

# File naming inside a corpus directory
CORPUS_MANIFEST = "corpus.json"
STATES_SUFFIX = ".states.csv"
ANNOTATIONS_SUFFIX = ".annotations.csv"
RECORDING_PREFIX = "rec_"

# UI Separator Widths
UI_SEPARATOR_WIDTH_MEDIUM = 50
UI_SEPARATOR_WIDTH_LARGE = 80

# Error Message Constants
ERROR_PREFIX = "✗"
SUCCESS_PREFIX = "✓"
WARNING_PREFIX = "○"
