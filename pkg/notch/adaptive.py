"""
Adaptive Notch
Quadrature-reference LMS canceller at the nominal mains frequency with
optional harmonic replicas
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import signal as sps

from core.errors import ConfigurationError, SignalError
from core.signal import Signal
from notch.butterworth import BiquadCascade

logger = logging.getLogger(__name__)

DEFAULT_STEP_SIZE = 0.1
DEFAULT_BANDWIDTH_HZ = 2.0
HARMONICS = (1, 2, 3, 4, 5)


def reference_amplitude(step_size: float, bandwidth_hz: float, sample_rate_hz: float) -> float:
    """Reference amplitude C giving a notch -3 dB width of bandwidth_hz: BW = mu * C^2 * fs / pi"""
    return math.sqrt(math.pi * bandwidth_hz / (step_size * sample_rate_hz))


@dataclass
class AdaptiveNotchState:
    """
    Per-record LMS state; owned by one record at a time

    Weights are stored as (in-phase, quadrature) pairs, one pair per
    harmonic. sample_index is the reference phase accumulator.
    """

    sample_rate_hz: float
    step_size: float = DEFAULT_STEP_SIZE
    fundamental_hz: float = 50.0
    harmonics: Tuple[int, ...] = HARMONICS
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    weights: np.ndarray = field(default=None)
    sample_index: int = 0

    def __post_init__(self):
        if not 0 < self.step_size < 1:
            raise ConfigurationError(f"step size must lie in (0, 1), got {self.step_size}")
        if not self.bandwidth_hz > 0:
            raise ConfigurationError(f"notch bandwidth must be positive, got {self.bandwidth_hz}")
        if not self.harmonics:
            raise ConfigurationError("at least one harmonic is required")
        nyquist = self.sample_rate_hz / 2.0
        too_high = [m for m in self.harmonics if m * self.fundamental_hz >= nyquist]
        if too_high:
            raise ConfigurationError(f"harmonics {too_high} of {self.fundamental_hz:g} Hz exceed Nyquist")
        if self.weights is None:
            self.weights = np.zeros(2 * len(self.harmonics))

    @property
    def amplitude(self) -> float:
        return reference_amplitude(self.step_size, self.bandwidth_hz, self.sample_rate_hz)

    def references(self, count: int) -> np.ndarray:
        """(count, 2 * harmonics) matrix of cos/sin references from the current phase"""
        n = self.sample_index + np.arange(count)
        columns = []
        for m in self.harmonics:
            angle = 2.0 * np.pi * m * self.fundamental_hz * n / self.sample_rate_hz
            columns.append(np.cos(angle))
            columns.append(np.sin(angle))
        return self.amplitude * np.column_stack(columns)

    def canceller(self) -> BiquadCascade:
        """
        LTI equivalent of the recursion started from zero weights

        With references C*cos / C*sin at w_m the loop y(n) = sum_k<n 2mu e(k) x(k)'x(n)
        depends on n - k only, so E/D = 1 / (1 + sum_m G_m) with
        G_m(z) = 2 mu C^2 (z^-1 cos w_m - z^-2) / (1 - 2 z^-1 cos w_m + z^-2).
        """
        loop_gain = 2.0 * self.step_size * self.amplitude ** 2
        resonators = []
        feedbacks = []
        for m in self.harmonics:
            cosine = math.cos(2.0 * np.pi * m * self.fundamental_hz / self.sample_rate_hz)
            resonators.append(np.array([1.0, -2.0 * cosine, 1.0]))
            feedbacks.append(loop_gain * np.array([0.0, cosine, -1.0]))

        numerator = functools.reduce(np.polymul, resonators)
        denominator = numerator.copy()
        for index, feedback in enumerate(feedbacks):
            others = [r for k, r in enumerate(resonators) if k != index]
            denominator = denominator + functools.reduce(np.polymul, others, feedback)
        return BiquadCascade.from_sos(
            sps.tf2sos(numerator, denominator), self.sample_rate_hz,
            self.fundamental_hz, self.bandwidth_hz, "bandstop",
        )

    def process(self, samples: np.ndarray) -> np.ndarray:
        """
        Run the recursion over a block; returns the error signal e(n)

        The carried weights enter as a known reference term, the rest of the
        recursion is the canceller filter from zero state.
        """
        samples = np.asarray(samples, dtype=float)
        refs = self.references(samples.size)
        residual = sps.sosfilt(self.canceller().sos, samples - refs @ self.weights)
        weights = self.weights + 2.0 * self.step_size * (refs.T @ residual)
        if not np.all(np.isfinite(weights)):
            raise SignalError("adaptive notch weights diverged")
        self.weights = weights
        self.sample_index += samples.size
        return residual


def adaptive_notch(
    signal: Signal,
    mu: float = DEFAULT_STEP_SIZE,
    harmonics: bool = True,
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ,
    fundamental_hz: float = 50.0,
) -> Signal:
    """
    LMS notch: subtract the weighted in-phase/quadrature references

    Args:
        signal: Noisy record
        mu: LMS step size in (0, 1)
        harmonics: Include replicas at 2-5x the fundamental (fundamental only when False)
        bandwidth_hz: Target notch width per harmonic
        fundamental_hz: Nominal mains frequency of the references

    Returns:
        Residual e(n) with the input annotations
    """
    if not np.all(np.isfinite(signal.samples)):
        raise SignalError("adaptive notch input contains non-finite samples")
    state = AdaptiveNotchState(
        sample_rate_hz=signal.sample_rate_hz,
        step_size=mu,
        fundamental_hz=fundamental_hz,
        harmonics=HARMONICS if harmonics else (1,),
        bandwidth_hz=bandwidth_hz,
    )
    residual = state.process(signal.samples)
    logger.debug(
        "Adaptive notch over %d samples, %d harmonics, final |w|max=%.3g",
        len(signal), len(state.harmonics), float(np.max(np.abs(state.weights))),
    )
    return signal.with_samples(residual)
