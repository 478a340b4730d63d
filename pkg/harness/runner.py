"""
Experiment Runner
Expands a plan into a deterministic work list, evaluates each work unit
inline or on a process pool, and merges the rows by index
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DataError
from core.signal import Signal, mix_at_snr
from evaluation.detector import detect_r_peaks
from evaluation.report import REPORT_COLUMNS, evaluate
from harness.ingest import IngestedRecord, ingest_directory
from harness.methods import build_method
from harness.plan import ExperimentPlan
from harness.results import ResultsTable
from monitoring.logging_config import log_error, log_experiment_event, log_work_unit
from monitoring.metrics import MetricsManager
from monitoring.tracing import trace_function
from synthesis.config import AfEcgConfig, PliConfig, PliScenario
from synthesis.pli import realize_pli
from synthesis.records import GeneratedRecord, synth_af_ecg, synth_noise_free_pair

logger = logging.getLogger(__name__)

SYNTHETIC_RECORD = "synthetic"
HEART_RATE_LIMITS = (30.0, 220.0)


@dataclass(frozen=True)
class WorkUnit:
    """One (record, method, scenario, snr, trial) cell of a plan"""

    index: int
    record: str
    sweep_value: Optional[float]
    method: str
    scenario: PliScenario
    snr_in_db: float
    trial: int
    ecg_seed: int
    pli_seed: int
    heart_rate_bpm: Optional[float]


def trial_seeds(master_seed: int, trial: int) -> Tuple[int, int, int]:
    """(ecg, pli, draw) seeds of a trial, derived from the master seed by trial index"""
    ecg_seed, pli_seed, draw_seed = np.random.SeedSequence([master_seed, trial]).generate_state(3)
    return int(ecg_seed), int(pli_seed), int(draw_seed)


def trial_heart_rate(plan: ExperimentPlan, draw_seed: int) -> Optional[float]:
    if plan.heart_rate_draw is None:
        return None
    draw = np.random.default_rng(draw_seed).normal(plan.heart_rate_draw.mean_bpm, plan.heart_rate_draw.std_bpm)
    return float(np.clip(draw, *HEART_RATE_LIMITS))


def build_work_units(plan: ExperimentPlan, records: Sequence[IngestedRecord] = ()) -> List[WorkUnit]:
    """Deterministic work list; method varies fastest so generated records are reused"""
    names = [SYNTHETIC_RECORD] if plan.is_synthetic else [record.name for record in records]
    units: List[WorkUnit] = []
    for record in names:
        for sweep_value in plan.sweep_points:
            for trial in range(plan.trials):
                ecg_seed, pli_seed, draw_seed = trial_seeds(plan.seed, trial)
                heart_rate = trial_heart_rate(plan, draw_seed) if plan.is_synthetic else None
                for scenario in plan.scenarios:
                    for snr in plan.snr_in_db:
                        for method in plan.methods:
                            units.append(WorkUnit(
                                index=len(units), record=record, sweep_value=sweep_value,
                                method=method, scenario=scenario, snr_in_db=snr, trial=trial,
                                ecg_seed=ecg_seed, pli_seed=pli_seed, heart_rate_bpm=heart_rate,
                            ))
    return units


def _ecg_config(plan: ExperimentPlan, unit: WorkUnit) -> AfEcgConfig:
    values = plan.ecg.model_dump()
    values["seed"] = unit.ecg_seed
    if unit.heart_rate_bpm is not None:
        values["heart_rate_bpm"] = unit.heart_rate_bpm
    if plan.sweep_parameter is not None:
        values[plan.sweep_parameter] = unit.sweep_value
    return AfEcgConfig(**values)


def _pli_config(plan: ExperimentPlan, unit: WorkUnit) -> PliConfig:
    return plan.pli.model_copy(update={"seed": unit.pli_seed, "scenario": unit.scenario})


@lru_cache(maxsize=4)
def _clean_record(config: AfEcgConfig) -> GeneratedRecord:
    return synth_af_ecg(config)


@lru_cache(maxsize=4)
def _synthetic_pair(ecg: AfEcgConfig, pli: PliConfig, snr_in_db: float) -> Tuple[Signal, Signal]:
    clean, noisy = synth_noise_free_pair(ecg, pli, snr_in_db, clean=_clean_record(ecg))
    return clean.composite, noisy.composite


def _contaminate(clean: Signal, pli: PliConfig, snr_in_db: float) -> Signal:
    realization = realize_pli(pli, clean.duration_s, clean.sample_rate_hz)
    calibration = None
    if pli.scenario is PliScenario.AMP_VARYING:
        calibration = slice(realization.onset_sample, None)
    noisy, _ = mix_at_snr(clean, realization.signal, snr_in_db, calibration)
    return noisy


def _row(plan: ExperimentPlan, unit: WorkUnit) -> Dict[str, object]:
    return {
        "record": unit.record,
        "sweep_parameter": plan.sweep_parameter or "",
        "sweep_value": math.nan if unit.sweep_value is None else unit.sweep_value,
        "method": unit.method,
        "scenario": unit.scenario.value,
        "snr_in_db": unit.snr_in_db,
        "trial": unit.trial,
        "seed": unit.ecg_seed,
        "heart_rate_bpm": math.nan,
        "snr_out_db": math.nan,
        "asci_global_pct": math.nan,
        "asci_tq_pct": math.nan,
        "asci_qrst_pct": math.nan,
        "beat_count": math.nan,
        "error": "",
    }


def run_unit(plan: ExperimentPlan, unit: WorkUnit, record: Optional[IngestedRecord] = None) -> Tuple[Dict[str, object], float]:
    """
    Synthesize (or contaminate), denoise and evaluate one work unit

    Failures are caught and reported in the row's error column.

    Returns:
        (result row, wall-clock seconds)
    """
    started = time.perf_counter()
    row = _row(plan, unit)
    try:
        method = build_method(unit.method, plan.denoiser, plan.notch)
        pli = _pli_config(plan, unit)
        if record is None:
            ecg = _ecg_config(plan, unit)
            row["heart_rate_bpm"] = ecg.heart_rate_bpm
            clean, noisy = _synthetic_pair(ecg, pli, unit.snr_in_db)
            denoised = method(noisy)
            r_peaks = clean.annotations
        else:
            clean = record.signal
            denoised = method(_contaminate(clean, pli, unit.snr_in_db))
            r_peaks = clean.annotations if record.has_annotations else detect_r_peaks(denoised)

        report = evaluate(
            clean, denoised, r_peaks,
            method=unit.method, scenario=unit.scenario.value, snr_in=unit.snr_in_db,
            beta_fraction=plan.evaluation.beta_fraction,
            beta_scope=plan.evaluation.beta_scope,
            drop_edge_beats=plan.evaluation.drop_edge_beats,
        )
        row.update({column: value for column, value in report.as_row().items() if column in REPORT_COLUMNS[3:]})
    except Exception as e:
        log_error(logger, e, {"unit": unit.index, "method": unit.method, "scenario": unit.scenario.value})
        row["error"] = f"{type(e).__name__}: {e}"
    return row, time.perf_counter() - started


def _run_payload(payload) -> Tuple[Dict[str, object], float]:
    return run_unit(*payload)


@trace_function
def run_plan(
    plan: ExperimentPlan,
    jobs: int = 1,
    metrics: Optional[MetricsManager] = None,
) -> ResultsTable:
    """
    Evaluate every cell of a plan

    Args:
        plan: Validated experiment plan
        jobs: Worker processes (1 runs inline); results do not depend on it
        metrics: Optional run metrics sink

    Returns:
        ResultsTable with one row per work unit, in work-list order

    Raises:
        DataError: the record source cannot be resolved (raised before any work)
    """
    records: List[IngestedRecord] = []
    if not plan.is_synthetic:
        records = ingest_directory(plan.source, plan.source_sample_rate_hz, plan.resample_to_hz)
        if not records:
            raise DataError(f"no usable records in {plan.source}")
    by_name = {record.name: record for record in records}

    units = build_work_units(plan, records)
    log_experiment_event(logger, "plan_started", {
        "plan": plan.name, "units": len(units), "jobs": jobs, "seed": plan.seed,
    })
    payloads = [(plan, unit, by_name.get(unit.record)) for unit in units]

    started = time.perf_counter()
    if jobs <= 1:
        outcomes = [_run_payload(payload) for payload in payloads]
    else:
        chunk = max(1, len(payloads) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            outcomes = list(executor.map(_run_payload, payloads, chunksize=chunk))

    rows = []
    for unit, (row, duration) in zip(units, outcomes):
        status = "error" if row["error"] else "ok"
        log_work_unit(logger, {
            "index": unit.index, "method": unit.method, "scenario": unit.scenario.value,
            "snr_in_db": unit.snr_in_db, "trial": unit.trial,
        }, status, duration)
        if metrics is not None:
            metrics.record_work_unit(unit.method, unit.scenario.value, status, duration)
            if status == "error":
                metrics.record_error(row["error"].split(":", 1)[0])
        rows.append(row)

    if metrics is not None:
        kind = "synthetic" if plan.is_synthetic else "ingested"
        count = len(plan.sweep_points) * plan.trials if plan.is_synthetic else len(records)
        metrics.record_records(kind, count)

    table = ResultsTable.from_rows(rows, plan.echo())
    log_experiment_event(logger, "plan_finished", {
        "plan": plan.name, "rows": len(table), "errors": len(table.failures),
        "duration_seconds": round(time.perf_counter() - started, 3),
    })
    return table
