"""
Quality Indices
Output SNR of a denoised record and the adaptive signed correlation index
"""

import math
from typing import Iterable, Optional, Tuple

import numpy as np

from core.errors import EvaluationError
from core.signal import Signal, power, require_aligned

SNR_OUT_CAP_DB = 200.0
RESIDUAL_FLOOR = 1e-30
DEFAULT_BETA_FRACTION = 0.05
BETA_SCOPES = ("record", "interval")


def snr_out(clean: Signal, denoised: Signal) -> float:
    """
    10*log10(P(denoised) / P(denoised - clean))

    A residual below 1e-30 returns the +200 dB sentinel.
    """
    require_aligned(clean, denoised)
    residual = power(denoised.samples - clean.samples)
    if residual < RESIDUAL_FLOOR:
        return SNR_OUT_CAP_DB
    signal_power = power(denoised)
    if signal_power == 0:
        raise EvaluationError("denoised record has zero power")
    return min(SNR_OUT_CAP_DB, 10.0 * math.log10(signal_power / residual))


def interval_mask(length: int, intervals: Optional[Iterable[Tuple[int, int]]]) -> np.ndarray:
    """Boolean mask of the union of [start, end) intervals (whole record when None)"""
    if intervals is None:
        return np.ones(length, dtype=bool)
    mask = np.zeros(length, dtype=bool)
    for start, end in intervals:
        mask[max(0, int(start)):min(length, int(end))] = True
    return mask


def asci(
    reference: Signal,
    test: Signal,
    beta_fraction: float = DEFAULT_BETA_FRACTION,
    intervals: Optional[Iterable[Tuple[int, int]]] = None,
    beta_scope: str = "record",
) -> float:
    """
    Adaptive signed correlation index, in percent

    Each scored sample counts +1 when |x - x_hat| <= beta and -1 otherwise,
    with beta = beta_fraction * population std of the reference. The std is
    taken over the whole reference ("record") or over the scored samples
    ("interval"). The index is not symmetric in its arguments.

    Args:
        reference: Clean record x
        test: Denoised record x_hat
        beta_fraction: Tolerance as a fraction of the reference std
        intervals: [start, end) sample intervals to score; whole record when None
        beta_scope: record or interval

    Returns:
        Mean of the signed scores times 100, in [-100, 100]
    """
    require_aligned(reference, test)
    if beta_scope not in BETA_SCOPES:
        raise EvaluationError(f"beta_scope must be one of {BETA_SCOPES}, got {beta_scope!r}")
    mask = interval_mask(len(reference), intervals)
    if not mask.any():
        raise EvaluationError("no samples to score: empty interval set")

    scope = reference.samples if beta_scope == "record" else reference.samples[mask]
    beta = beta_fraction * float(np.std(scope))
    deviation = np.abs(reference.samples[mask] - test.samples[mask])
    scores = np.where(deviation <= beta, 1.0, -1.0)
    return 100.0 * float(np.mean(scores))
