import sys
from pathlib import Path
import logging
import argparse
import signal
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError as PydanticValidationError

from models.config_management import ConfigManager
from models.validator_management import ConfigValidator
from models.core.exceptions import HeartPathError, ConfigurationError, ValidationError
from models.core.constants import EXIT_OK
from models.core.sequences import CyclicTransitionModel, ProbabilityMatrix
from models.data_models import AppConfig, CorpusManifest, WindowReport
from models.decode_management import DECODE_METHODS, decode
from models.window_management import WindowSpec, window_decode, window_decode_per_start
from models.lp_management import (
    Formulation, CardinalityRule, formulation_sizes, build_p6_linearized, build_p8, write_lp
)
from models.lstm_management import GateMode, infer_probabilities
from models.metrics_management import evaluate
from models.synth_management import PRESETS, preset_config, corpus_configs, generate_corpus, describe
from models.experiment_management import run_compare, single_run_report
from models.io_management import (
    CorpusRecording, read_matrix_csv, write_matrix_csv, read_state_file, write_states_csv,
    read_features_csv, read_weights, write_json_model, write_corpus, load_corpus, recording_name
)
from models.helpers import setup_logging, resolve_log_level, show_progress, handle_keyboard_interrupt
from models.ui_helpers import (
    print_success, print_warning, print_error, display_metrics, display_run_report,
    display_sizes, display_window, render_window_plot
)

logger = logging.getLogger(__name__)

EXPORTABLE = (Formulation.P6_LINEARIZED.value, Formulation.P8.value)


def _state_list(value: str) -> List[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated state indices, got {value!r}")


def _range(value: str) -> List[int]:
    parts = value.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected start,len, got {value!r}")
    try:
        return [int(parts[0]), int(parts[1])]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers start,len, got {value!r}")


def _add_window_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument('--seconds', type=float, help='Window length J in seconds')
    group.add_argument('--samples', type=int, help='Window length W in samples')
    parser.add_argument('--rate', type=float, help='Sample frequency F in Hz (default: matrix sidecar, then config)')


def _build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation"""
    parser = argparse.ArgumentParser(
        prog='heartpath',
        description='Constrained decoding of cyclic state sequences and optimal window selection'
    )
    parser.add_argument('--config', type=Path, help='Configuration file (default: config/config.toml)')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('--quiet', action='store_true', help='Warnings only, no progress bars')
    sub = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    p = sub.add_parser('decode', help='Decode a full probability matrix')
    p.add_argument('--probs', type=Path, help='Probability matrix CSV')
    p.add_argument('--weights', type=Path, help='LSTM weight JSON (with --features)')
    p.add_argument('--features', type=Path, help='Feature CSV (with --weights)')
    p.add_argument('--gate-mode', choices=GateMode.choices())
    p.add_argument('--states', type=int, required=True, help='Number of states L')
    p.add_argument('--rate', type=float)
    p.add_argument('--method', choices=DECODE_METHODS)
    p.add_argument('--out', type=Path, required=True, help='Decoded state CSV')

    p = sub.add_parser('window', help='Select and decode the best window')
    p.add_argument('--probs', type=Path, required=True)
    p.add_argument('--states', type=int, required=True)
    _add_window_args(p)
    p.add_argument('--workers', type=int)
    p.add_argument('--per-start', action='store_true', help='Decode every start independently')
    p.add_argument('--exclude-boundaries', action='store_true',
                   help='Forbid windows touching the first or last sample')
    p.add_argument('--out', type=Path, required=True, help='Window report JSON')
    p.add_argument('--emit-plot', type=Path, help='SVG plot of the chosen window')

    p = sub.add_parser('eval', help='Score an estimated state sequence')
    p.add_argument('--gt', type=Path, required=True, help='Ground-truth states or annotations CSV')
    p.add_argument('--est', type=Path, required=True, help='Estimated states CSV')
    p.add_argument('--rate', type=float)
    p.add_argument('--tolerance-ms', type=float)
    p.add_argument('--window', type=_range, metavar='START,LEN')
    p.add_argument('--positive', type=_state_list, metavar='S1,S2,...')
    p.add_argument('--negative', type=_state_list, metavar='S1,S2,...')
    p.add_argument('--out', type=Path, required=True, help='Report JSON')

    p = sub.add_parser('compare', help='Compare full argmax with windowed decoding over a corpus')
    p.add_argument('--corpus', type=Path)
    _add_window_args(p)
    p.add_argument('--trials', type=int, default=1, help='Random windows per recording')
    p.add_argument('--seed', type=int)
    p.add_argument('--workers', type=int)
    p.add_argument('--per-start', action='store_true')
    p.add_argument('--tolerance-ms', type=float)
    p.add_argument('--positive', type=_state_list)
    p.add_argument('--negative', type=_state_list)
    p.add_argument('--show-rows', action='store_true')
    p.add_argument('--out', type=Path, required=True)

    p = sub.add_parser('synth', help='Generate a synthetic corpus')
    p.add_argument('--out', type=Path, help='Corpus directory')
    p.add_argument('--preset', choices=PRESETS)
    p.add_argument('--count', type=int)
    p.add_argument('--duration', type=float, help='Recording length in seconds')
    p.add_argument('--rate', type=float)
    p.add_argument('--temperature', type=float)
    p.add_argument('--burst-seconds', type=float)
    p.add_argument('--burst-uniformity', type=float)
    p.add_argument('--seed', type=int)
    p.add_argument('--workers', type=int)

    p = sub.add_parser('export-lp', help='Write an LP file for an external MILP solver')
    p.add_argument('--probs', type=Path, required=True)
    p.add_argument('--states', type=int, required=True)
    p.add_argument('--formulation', choices=EXPORTABLE, default=Formulation.P6_LINEARIZED.value)
    _add_window_args(p)
    p.add_argument('--cardinality', choices=[r.value for r in CardinalityRule], default=CardinalityRule.WINDOW.value)
    p.add_argument('--out', type=Path, required=True)

    p = sub.add_parser('infer', help='Run the bidirectional LSTM on a feature file')
    p.add_argument('--weights', type=Path, required=True)
    p.add_argument('--features', type=Path, required=True)
    p.add_argument('--gate-mode', choices=GateMode.choices())
    p.add_argument('--rate', type=float)
    p.add_argument('--out', type=Path, required=True, help='Probability matrix CSV')

    p = sub.add_parser('sizes', help='Print formulation sizes for T samples and L states')
    p.add_argument('T', type=int)
    p.add_argument('L', type=int)

    p = sub.add_parser('init-config', help='Write the default configuration')
    p.add_argument('--force', action='store_true', help='Overwrite an existing file')
    return parser


def _window_spec(args: argparse.Namespace, config: AppConfig) -> WindowSpec:
    try:
        if args.samples is not None:
            return WindowSpec(width_samples=args.samples)
        seconds = args.seconds if args.seconds is not None else config.window.seconds
        return WindowSpec(seconds=seconds, rate_hz=args.rate)
    except PydanticValidationError as e:
        raise ValidationError("Invalid window", field_name="window", details=str(e))


def _with_rate(P: ProbabilityMatrix, config: AppConfig) -> ProbabilityMatrix:
    if P.rate_hz is not None:
        return P
    logger.debug(f"No rate for the matrix; using the configured {config.window.rate_hz} Hz")
    return ProbabilityMatrix(p=P.p, rate_hz=config.window.rate_hz, state_names=P.state_names)


def cli_decode(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    config = config_manager.config
    method = args.method or config.decoding.method
    if args.probs is not None:
        P = read_matrix_csv(args.probs, rate_hz=args.rate, n_states=args.states)
    else:
        weights = read_weights(args.weights)
        features = read_features_csv(args.features)
        P = infer_probabilities(weights, features, args.gate_mode or config.decoding.gate_mode, rate_hz=args.rate)
    model = CyclicTransitionModel(args.states, P.state_names)
    result = decode(P, model, method)
    if not result.is_valid(model):
        logger.warning("Decoded sequence violates the transition model")
        print_warning("sequence violates transition model")
    write_states_csv(result.states, args.out)
    print(f"objective: {result.objective:.12g}")
    print_success(f"{len(result)} states written to {args.out}")
    return EXIT_OK


def cli_window(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    config = config_manager.config
    P = _with_rate(read_matrix_csv(args.probs, n_states=args.states), config)
    model = CyclicTransitionModel(args.states, P.state_names)
    spec = _window_spec(args, config)
    if args.per_start or config.window.per_start:
        workers = args.workers or config.window.workers
        result = window_decode_per_start(P, model, spec, exclude_boundaries=args.exclude_boundaries,
                                         workers=workers, progress=show_progress(args.quiet))
    else:
        result = window_decode(P, model, spec, exclude_boundaries=args.exclude_boundaries)

    report = WindowReport(
        start=result.start,
        width=result.width,
        objective=result.objective,
        n_candidates=result.n_candidates,
        n_samples=result.n_samples,
        states=list(result.states),
        rate_hz=P.rate_hz
    )
    write_json_model(report, args.out)
    display_window(result, P.rate_hz)
    plot = args.emit_plot or (Path(config.output.plot) if config.output.plot else None)
    if plot is not None:
        render_window_plot(P, result, plot)
    print_success(f"Window written to {args.out}")
    return EXIT_OK


def cli_eval(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    config = config_manager.config
    gt = read_state_file(args.gt)
    est = read_state_file(args.est)
    restrict = (args.window[0], args.window[0] + args.window[1]) if args.window else None
    tolerance_ms = args.tolerance_ms if args.tolerance_ms is not None else config.metrics.tolerance_ms
    metrics = evaluate(
        gt, est,
        positive_states=args.positive if args.positive is not None else config.metrics.positive_states,
        negative_states=args.negative if args.negative is not None else config.metrics.negative_states,
        rate_hz=args.rate or config.window.rate_hz,
        tolerance_ms=tolerance_ms,
        restrict=restrict
    )
    report = single_run_report(args.est.stem, "estimate", metrics, parameters={
        "gt": str(args.gt), "est": str(args.est), "tolerance_ms": tolerance_ms
    })
    write_json_model(report, args.out)
    display_metrics(metrics)
    print_success(f"Report written to {args.out}")
    return EXIT_OK


def cli_compare(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    config = config_manager.config
    corpus_dir = args.corpus or Path(config.output.corpus_dir)
    recordings = load_corpus(corpus_dir)
    spec = _window_spec(args, config)
    seed = args.seed if args.seed is not None else config.synth.seed
    tolerance_ms = args.tolerance_ms if args.tolerance_ms is not None else config.metrics.tolerance_ms
    report = run_compare(
        recordings, spec,
        positive_states=args.positive if args.positive is not None else config.metrics.positive_states,
        negative_states=args.negative if args.negative is not None else config.metrics.negative_states,
        tolerance_ms=tolerance_ms,
        trials=args.trials,
        seed=seed,
        workers=args.workers or config.window.workers,
        per_start=args.per_start or config.window.per_start,
        progress=show_progress(args.quiet),
        parameters={
            "corpus": str(corpus_dir), "window": spec.model_dump(), "trials": args.trials,
            "seed": seed, "tolerance_ms": tolerance_ms
        }
    )
    write_json_model(report, args.out)
    display_run_report(report, show_rows=args.show_rows)
    print_success(f"Report written to {args.out}")
    return EXIT_OK


def cli_synth(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    s = config_manager.config.synth
    preset = args.preset or s.preset
    count = args.count or s.count
    seed = args.seed if args.seed is not None else s.seed
    burst_seconds = args.burst_seconds if args.burst_seconds is not None else s.burst_seconds
    burst_uniformity = args.burst_uniformity if args.burst_uniformity is not None else s.burst_uniformity
    out = args.out or Path(config_manager.config.output.corpus_dir)

    base = preset_config(
        preset,
        rate_hz=args.rate or config_manager.config.window.rate_hz,
        duration_s=args.duration or s.duration_s,
        temperature=args.temperature or s.temperature,
        logit_noise_std=s.logit_noise_std,
        burst_noise_std=s.burst_noise_std,
        seed=seed
    )
    configs = corpus_configs(base, count, seed, burst_seconds, burst_uniformity)
    logger.debug(f"First recording: {describe(configs[0])}")
    generated = generate_corpus(configs, workers=args.workers or config_manager.config.window.workers,
                                progress=show_progress(args.quiet))
    recordings = [
        CorpusRecording(name=recording_name(i), gt=gt, P=P, config=cfg)
        for i, (cfg, (gt, P)) in enumerate(zip(configs, generated))
    ]
    manifest = CorpusManifest(
        preset=preset,
        count=count,
        master_seed=seed,
        duration_s=base.duration_s,
        rate_hz=base.rate_hz,
        temperature=base.temperature,
        burst_seconds=burst_seconds,
        burst_uniformity=burst_uniformity,
        recordings=[r.name for r in recordings]
    )
    write_corpus(out, recordings, manifest)
    print_success(f"{count} recordings written to {out}")
    return EXIT_OK


def cli_export_lp(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    config = config_manager.config
    P = _with_rate(read_matrix_csv(args.probs, n_states=args.states), config)
    model = CyclicTransitionModel(args.states, P.state_names)
    if args.formulation == Formulation.P8.value:
        lp = build_p8(P, model, _window_spec(args, config), args.cardinality)
    else:
        lp = build_p6_linearized(P, model)
    write_lp(lp.generate(), args.out)
    print(f"{args.formulation}: {len(lp.variables)} variables ({len(lp.binaries)} binary), "
          f"{len(lp.constraints)} constraints")
    print_success(f"LP written to {args.out}")
    return EXIT_OK


def cli_infer(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    weights = read_weights(args.weights)
    features = read_features_csv(args.features)
    gate_mode = args.gate_mode or config_manager.config.decoding.gate_mode
    P = infer_probabilities(weights, features, gate_mode, rate_hz=args.rate)
    write_matrix_csv(P, args.out)
    print_success(f"{P.n_samples}x{P.n_states} probabilities written to {args.out}")
    return EXIT_OK


def cli_sizes(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    sizes = [formulation_sizes(args.T, args.L, f) for f in Formulation]
    display_sizes(sizes, args.T, args.L)
    return EXIT_OK


def cli_init_config(args: argparse.Namespace, config_manager: ConfigManager) -> int:
    if config_manager.config_file.exists() and not args.force:
        raise ConfigurationError("Config file already exists (use --force to overwrite)",
                                 config_path=str(config_manager.config_file))
    config_manager.config = AppConfig()
    path = config_manager.save()
    result = ConfigValidator(config_manager).validate_all()
    for warning in result.warnings:
        print_warning(warning)
    print_success(f"Default configuration written to {path}")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, ConfigManager], int]] = {
    'decode': cli_decode,
    'window': cli_window,
    'eval': cli_eval,
    'compare': cli_compare,
    'synth': cli_synth,
    'export-lp': cli_export_lp,
    'infer': cli_infer,
    'sizes': cli_sizes,
    'init-config': cli_init_config,
}


def _check_sources(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.command != 'decode':
        return
    has_matrix = args.probs is not None
    has_network = args.weights is not None or args.features is not None
    if has_matrix == has_network:
        parser.error("decode needs exactly one source: --probs, or --weights with --features")
    if has_network and (args.weights is None or args.features is None):
        parser.error("--weights and --features must be given together")


def _load_config(args: argparse.Namespace) -> ConfigManager:
    config_manager = ConfigManager(Path.cwd(), config_file=args.config)
    if args.config is not None and not args.config.exists() and args.command != 'init-config':
        raise ConfigurationError("Config file not found", config_path=str(args.config),
                                 error_code="CONFIG_NOT_FOUND")
    if args.command == 'init-config':
        return config_manager
    config = config_manager.load()
    setup_logging(resolve_log_level(config.logging.level, args.verbose, args.quiet))
    result = ConfigValidator(config_manager).validate_all()
    for warning in result.warnings:
        logger.debug(warning)
    if not result.is_valid:
        raise ConfigurationError("Invalid configuration", config_path=str(config_manager.config_file),
                                 details="; ".join(result.errors), error_code="CONFIG_INVALID")
    return config_manager


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    parser = _build_parser()
    args = parser.parse_args(argv)
    _check_sources(parser, args)
    setup_logging(resolve_log_level("INFO", args.verbose, args.quiet))

    try:
        config_manager = _load_config(args)
        return COMMANDS[args.command](args, config_manager)
    except HeartPathError as e:
        print_error(str(e))
        if e.error_code:
            logger.debug(f"{type(e).__name__} [{e.error_code}] exit {e.exit_code}")
        return e.exit_code


if __name__ == '__main__':
    signal.signal(signal.SIGINT, handle_keyboard_interrupt)
    sys.exit(main())
