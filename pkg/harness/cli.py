"""
Command-Line Surface
synth-ecg, synth-pli, denoise, evaluate and bench subcommands.
Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

from core.errors import ConfigurationError, PliToolkitError
from core.io import read_annotations, read_signal, write_columns, write_signal
from evaluation.report import evaluate
from harness.methods import METHOD_NAMES, NotchSettings, build_method
from harness.plan import EvaluationSettings, load_plan, read_sections
from harness.results import EXPORT_FORMATS, export_results, export_summary
from harness.runner import run_plan
from monitoring.logging_config import log_error, log_experiment_event, log_stage
from monitoring.metrics import MetricsManager
from monitoring.tracing import TracingManager
from shrinkage.denoiser import DenoiserSpec
from synthesis.config import AfEcgConfig, PliConfig, PliScenario
from synthesis.pli import realize_pli
from synthesis.records import synth_af_ecg, write_record

logger = logging.getLogger(__name__)

SERVICE_NAME = "pli-toolkit"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
RESULT_FILES = {"csv": "results.csv", "json": "results.json", "long": "results_long.csv"}


class UsageError(Exception):
    """Bad command line"""


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting with status 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _sections(args) -> Dict[str, Dict[str, str]]:
    return read_sections(args.config) if args.config else {}


def _out_dir(args, default: Path) -> Path:
    return args.out if args.out is not None else default


def _synth_ecg(args) -> int:
    config = AfEcgConfig.from_mapping(
        _sections(args).get("ecg", {}),
        seed=args.seed,
        duration_s=args.duration,
        sample_rate_hz=args.fs,
        heart_rate_bpm=args.heart_rate,
        rr_variability_fraction=args.rr_variability,
        fwave_amplitude_uV=args.fwave_amplitude,
    )
    started = time.perf_counter()
    record = synth_af_ecg(config)
    path, _ = write_record(record, _out_dir(args, Path(".")) / f"{args.name}.csv")
    log_stage(logger, "synthesize", args.name, time.perf_counter() - started, {"beats": int(record.r_peaks.size)})
    print(path)
    return EXIT_OK


def _synth_pli(args) -> int:
    config = PliConfig.from_mapping(_sections(args).get("pli", {}), seed=args.seed, scenario=args.scenario)
    started = time.perf_counter()
    realization = realize_pli(config, args.duration, args.fs)
    name = args.name or f"pli_{config.scenario.value}"
    echo = {f"pli.{key}": value for key, value in config.to_mapping().items()}
    echo["pli.frequency_offset_hz"] = f"{realization.frequency_offset_hz:g}"
    echo["pli.am_rate_hz"] = f"{realization.am_rate_hz:.6g}"
    path = write_columns(
        _out_dir(args, Path(".")) / f"{name}.csv",
        {"amplitude": realization.signal.samples, "frequency_hz": realization.frequency_track.samples},
        args.fs,
        echo,
    )
    log_stage(logger, "synthesize", name, time.perf_counter() - started)
    print(path)
    return EXIT_OK


def _denoise(args) -> int:
    sections = _sections(args)
    denoiser = DenoiserSpec.from_mapping(sections.get("denoiser", {}))
    try:
        notch = NotchSettings(**sections.get("notch", {}))
    except ValueError as e:
        raise ConfigurationError(f"invalid [notch] section: {e}") from e
    method = build_method(args.method, denoiser, notch)

    started = time.perf_counter()
    signal = read_signal(args.input, args.fs)
    denoised = method(signal)
    destination = _out_dir(args, args.input.parent) / f"{args.input.stem}.denoised.csv"
    path, _ = write_signal(destination, denoised, echo={"method": args.method, "input": args.input.name})
    log_stage(logger, "denoise", args.input.stem, time.perf_counter() - started, {"method": args.method})
    print(path)
    return EXIT_OK


def _evaluate(args) -> int:
    try:
        settings = EvaluationSettings(**_sections(args).get("evaluation", {}))
    except ValueError as e:
        raise ConfigurationError(f"invalid [evaluation] section: {e}") from e
    clean = read_signal(args.clean, args.fs)
    denoised = read_signal(args.denoised, args.fs)
    r_peaks = read_annotations(args.annotations) if args.annotations else None

    report = evaluate(
        clean, denoised, r_peaks,
        method=args.method, scenario=args.scenario, snr_in=args.snr_in,
        beta_fraction=settings.beta_fraction,
        beta_scope=settings.beta_scope,
        drop_edge_beats=settings.drop_edge_beats,
    )
    document = json.dumps(report.as_row(), indent=2)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "evaluation.json").write_text(document + "\n")
    print(document)
    return EXIT_OK


def _bench(args) -> int:
    if args.config is None:
        raise UsageError("bench needs --config <plan file>")
    plan = load_plan(args.config, args.seed)
    jobs = args.jobs if args.jobs is not None else int(os.getenv("PLI_JOBS", "1"))
    out_dir = _out_dir(args, Path("results"))
    metrics_file = args.metrics_file or os.getenv("PLI_METRICS_FILE")
    metrics = MetricsManager(plan.name)

    table = run_plan(plan, jobs=jobs, metrics=metrics)
    results = export_results(table, out_dir / RESULT_FILES[args.format], args.format)
    summary = export_summary(table, out_dir / "summary.csv")
    if metrics_file:
        metrics.write_textfile(metrics_file)

    log_experiment_event(logger, "export_written", {
        "results": str(results), "summary": str(summary), "errors": len(table.failures),
    })
    print(results)
    print(summary)
    return EXIT_OK


def build_parser() -> ToolkitArgumentParser:
    common = ToolkitArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed")
    common.add_argument("--config", type=Path, default=None, help="INI config / plan file")
    common.add_argument("--out", type=Path, default=None, help="Output directory")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes")

    parser = ToolkitArgumentParser(prog="pli-toolkit", description="SWT power-line interference denoising toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ToolkitArgumentParser)

    synth_ecg = commands.add_parser("synth-ecg", parents=[common], help="Synthesize an AF ECG record")
    synth_ecg.add_argument("--duration", type=float, default=None, help="Seconds")
    synth_ecg.add_argument("--fs", type=float, default=None, help="Sample rate (Hz)")
    synth_ecg.add_argument("--heart-rate", type=float, default=None, help="Mean heart rate (bpm)")
    synth_ecg.add_argument("--rr-variability", type=float, default=None, help="RR variability fraction (0-0.25)")
    synth_ecg.add_argument("--fwave-amplitude", type=float, default=None, help="f-wave amplitude (uV)")
    synth_ecg.add_argument("--name", default="af_ecg", help="Output file stem")
    synth_ecg.set_defaults(handler=_synth_ecg)

    synth_pli = commands.add_parser("synth-pli", parents=[common], help="Synthesize power-line interference")
    synth_pli.add_argument("--scenario", choices=[scenario.value for scenario in PliScenario], default=None)
    synth_pli.add_argument("--duration", type=float, default=60.0, help="Seconds")
    synth_pli.add_argument("--fs", type=float, default=1000.0, help="Sample rate (Hz)")
    synth_pli.add_argument("--name", default=None, help="Output file stem")
    synth_pli.set_defaults(handler=_synth_pli)

    denoise = commands.add_parser("denoise", parents=[common], help="Denoise a CSV record")
    denoise.add_argument("--method", choices=METHOD_NAMES, required=True)
    denoise.add_argument("--input", type=Path, required=True)
    denoise.add_argument("--fs", type=float, required=True, help="Sample rate (Hz)")
    denoise.set_defaults(handler=_denoise)

    evaluation = commands.add_parser("evaluate", parents=[common], help="Score a denoised record")
    evaluation.add_argument("--clean", type=Path, required=True)
    evaluation.add_argument("--denoised", type=Path, required=True)
    evaluation.add_argument("--fs", type=float, required=True, help="Sample rate (Hz)")
    evaluation.add_argument("--annotations", type=Path, default=None, help="R-peak sidecar")
    evaluation.add_argument("--method", default="")
    evaluation.add_argument("--scenario", default="")
    evaluation.add_argument("--snr-in", default=None)
    evaluation.set_defaults(handler=_evaluate)

    bench = commands.add_parser("bench", parents=[common], help="Run an experiment plan")
    bench.add_argument("--format", choices=EXPORT_FORMATS, default="csv")
    bench.add_argument("--metrics-file", type=Path, default=None, help="Prometheus textfile output")
    bench.set_defaults(handler=_bench)
    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and map failures to exit codes"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        return int(e.code or 0)
    if args.jobs is not None and args.jobs < 1:
        print(f"{parser.prog}: error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    tracing = TracingManager(SERVICE_NAME)
    try:
        with tracing.create_span(f"cli.{args.command}", {"command": args.command}):
            return args.handler(args)
    except (UsageError, ConfigurationError) as e:
        log_error(logger, e, {"command": args.command})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PliToolkitError as e:
        log_error(logger, e, {"command": args.command})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    finally:
        tracing.shutdown()
