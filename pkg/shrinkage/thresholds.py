"""
Threshold Estimation
Per-sample moving-median thresholds, scalar minimax thresholds and the
QRS gate used by the hybrid rule
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import median_filter

from core.errors import ThresholdError

logger = logging.getLogger(__name__)

MINIMAX_MIN_LENGTH = 32
MAD_TO_SIGMA = 0.6745


@dataclass(frozen=True)
class ThresholdTrack:
    """Per-sample threshold lambda_j(n) for one detail scale"""

    values: np.ndarray
    scale: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if np.any(values < 0):
            raise ThresholdError(f"scale {self.scale}: negative threshold")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    @classmethod
    def constant(cls, value: float, length: int, scale: int) -> "ThresholdTrack":
        return cls(np.full(length, float(value)), scale)

    def scaled(self, factor: float) -> "ThresholdTrack":
        if not factor > 0:
            raise ThresholdError(f"threshold factor must be positive, got {factor}")
        return ThresholdTrack(factor * self.values, self.scale)


def window_length(window_ms: float, sample_rate_hz: float) -> int:
    """Window in samples, forced odd and at least 3"""
    if not window_ms > 0:
        raise ThresholdError(f"window must be positive, got {window_ms} ms")
    width = int(round(window_ms * sample_rate_hz / 1000.0))
    if width % 2 == 0:
        width += 1
    return max(width, 3)


def moving_median_threshold(
    detail, window_ms: float, sample_rate_hz: float, scale: int = 0
) -> ThresholdTrack:
    """
    Centred moving median of |detail|

    Interior samples use the full odd window; the first and last half-window
    samples use every available sample (shrinking windows), not reflection.
    """
    magnitude = np.abs(np.asarray(detail, dtype=float))
    width = window_length(window_ms, sample_rate_hz)
    count = magnitude.size
    if width > count:
        raise ThresholdError(f"window of {width} samples exceeds sequence of {count}")

    values = median_filter(magnitude, size=width, mode="nearest")
    half = width // 2
    for offset in range(half):
        values[offset] = np.median(magnitude[: offset + half + 1])
        values[count - 1 - offset] = np.median(magnitude[count - 1 - offset - half:])
    return ThresholdTrack(values, scale)


def noise_sigma(detail) -> float:
    """Robust noise level: median absolute coefficient / 0.6745"""
    return float(np.median(np.abs(np.asarray(detail, dtype=float)))) / MAD_TO_SIGMA


def minimax_threshold(detail) -> float:
    """
    Scalar minimax threshold sigma * (0.3936 + 0.1829 * log2 N)

    Sequences of 32 samples or fewer get a zero threshold.
    """
    coefficients = np.asarray(detail, dtype=float)
    if coefficients.size == 0:
        raise ThresholdError("empty coefficient sequence")
    if coefficients.size <= MINIMAX_MIN_LENGTH:
        return 0.0
    return noise_sigma(coefficients) * (0.3936 + 0.1829 * math.log2(coefficients.size))


def qrs_gate(detail, track: ThresholdTrack, factor: float) -> np.ndarray:
    """True where |detail(n)| exceeds factor * lambda(n)"""
    coefficients = np.asarray(detail, dtype=float)
    if coefficients.size != len(track):
        raise ThresholdError(
            f"detail has {coefficients.size} coefficients, threshold track {len(track)}"
        )
    return np.abs(coefficients) > factor * track.values
