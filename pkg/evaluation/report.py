"""
Evaluation Reports
SNR_out, global ASCI and TQ / QRST interval ASCI for one denoised record
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np

from core.errors import EvaluationError
from core.signal import Signal, SnrDb, require_aligned
from evaluation.detector import detect_r_peaks
from evaluation.metrics import DEFAULT_BETA_FRACTION, asci, snr_out
from evaluation.segmentation import segment_beats
from monitoring.tracing import trace_function

logger = logging.getLogger(__name__)

# versioned column order of result rows
REPORT_SCHEMA_VERSION = 1
REPORT_COLUMNS = (
    "method", "scenario", "snr_in_db", "snr_out_db",
    "asci_global_pct", "asci_tq_pct", "asci_qrst_pct", "beat_count",
)


@dataclass(frozen=True)
class EvaluationReport:
    """Per-record quality indices"""

    method: str
    scenario: str
    snr_in_db: float
    snr_out_db: float
    asci_global_pct: float
    asci_tq_pct: float
    asci_qrst_pct: float
    beat_count: int

    def __post_init__(self):
        for name in ("asci_global_pct", "asci_tq_pct", "asci_qrst_pct"):
            value = getattr(self, name)
            if not math.isnan(value) and not -100.0 <= value <= 100.0:
                raise EvaluationError(f"{name} = {value} outside [-100, 100]")

    def as_row(self) -> Dict[str, object]:
        row = asdict(self)
        return {column: row[column] for column in REPORT_COLUMNS}


def _interval_asci(clean, denoised, beta_fraction, intervals, beta_scope) -> float:
    """NaN when no beat leaves an interval to score (e.g. two R-peaks with edge beats dropped)"""
    if not intervals:
        return math.nan
    return asci(clean, denoised, beta_fraction, intervals, beta_scope)


@trace_function
def evaluate(
    clean: Signal,
    denoised: Signal,
    r_peaks: Optional[Sequence[int]] = None,
    method: str = "",
    scenario: str = "",
    snr_in: Union[SnrDb, float, str, None] = None,
    beta_fraction: float = DEFAULT_BETA_FRACTION,
    beta_scope: str = "record",
    drop_edge_beats: bool = True,
) -> EvaluationReport:
    """
    Score a denoised record against its clean reference

    Args:
        clean: Noise-free record x
        denoised: Denoiser output x_hat
        r_peaks: R-peak indices; the clean record's annotations, else the
            detector on the clean record, when omitted
        method: Method id echoed into the report
        scenario: PLI scenario id echoed into the report
        snr_in: Input SNR echoed into the report
        beta_fraction: ASCI tolerance as a fraction of the clean std
        beta_scope: record or interval std for interval ASCI
        drop_edge_beats: Leave the first and last beat out of interval ASCI

    Returns:
        EvaluationReport; interval ASCI uses the union of the per-beat intervals,
        NaN with a zero beat count when no beat is left to score
    """
    require_aligned(clean, denoised)
    if r_peaks is None:
        r_peaks = clean.annotations if clean.annotations.size else detect_r_peaks(clean)
    peaks = np.asarray(r_peaks, dtype=np.int64)

    segmentation = segment_beats(peaks, clean.sample_rate_hz, len(clean))
    tq = segmentation.intervals("tq", drop_edge_beats)
    qrst = segmentation.intervals("qrst", drop_edge_beats)

    report = EvaluationReport(
        method=method,
        scenario=scenario,
        snr_in_db=math.nan if snr_in is None else SnrDb.coerce(snr_in).value,
        snr_out_db=snr_out(clean, denoised),
        asci_global_pct=asci(clean, denoised, beta_fraction),
        asci_tq_pct=_interval_asci(clean, denoised, beta_fraction, tq, beta_scope),
        asci_qrst_pct=_interval_asci(clean, denoised, beta_fraction, qrst, beta_scope),
        beat_count=segmentation.beat_count if tq or qrst else 0,
    )
    logger.debug(
        "Evaluated %s/%s: SNR_out %.2f dB, ASCI %.1f%%", method, scenario,
        report.snr_out_db, report.asci_global_pct,
    )
    return report
