"""
Atrial Activity
Sawtooth f-waves: M harmonics of a sinusoidally frequency-modulated fundamental
"""

import logging
import math

import numpy as np

from core.signal import Signal
from monitoring.tracing import trace_function
from synthesis.config import FWAVE_BAND_HZ, FWAVE_STREAM, AfEcgConfig

logger = logging.getLogger(__name__)

FUNDAMENTAL_MEAN_HZ = 6.0
FUNDAMENTAL_STD_HZ = 1.5


def fwave_fundamental(config: AfEcgConfig) -> float:
    """
    Mean atrial frequency: the configured value or a N(6, 1.5) draw, clipped
    so that the frequency-modulated fundamental stays inside 3-9 Hz
    """
    if config.fwave_fundamental_hz is not None:
        f0 = config.fwave_fundamental_hz
    else:
        f0 = float(config.rng(FWAVE_STREAM).normal(FUNDAMENTAL_MEAN_HZ, FUNDAMENTAL_STD_HZ))
    low, high = FWAVE_BAND_HZ
    return float(np.clip(f0, low + config.fm_deviation_hz, high - config.fm_deviation_hz))


@trace_function
def synth_fwaves(config: AfEcgConfig) -> Signal:
    """
    a(t) = sum_m (2A / (m pi)) sin(2 pi m phi(t)),  phi'(t) = f0 + df sin(2 pi f_fm t)

    The track is rescaled so its peak-to-peak equals 2 * fwave_amplitude_uV (in mV).
    """
    count = config.sample_count
    if config.fwave_amplitude_uV == 0:
        return Signal(np.zeros(count), config.sample_rate_hz)

    rng = config.rng(FWAVE_STREAM)
    rng.normal()  # first draw belongs to the fundamental
    start_phase = float(rng.uniform(0.0, 1.0))

    f0 = fwave_fundamental(config)
    t = np.arange(count) / config.sample_rate_hz
    phase = start_phase + f0 * t + (config.fm_deviation_hz / (2.0 * math.pi * config.fm_rate_hz)) * (
        1.0 - np.cos(2.0 * math.pi * config.fm_rate_hz * t)
    )

    track = np.zeros(count)
    for m in range(1, config.fwave_harmonics + 1):
        track += (2.0 / (m * math.pi)) * np.sin(2.0 * math.pi * m * phase)

    peak_to_peak = float(track.max() - track.min())
    target = 2.0 * config.fwave_amplitude_uV * 1e-3
    if peak_to_peak > 0:
        track *= target / peak_to_peak
    logger.debug("f-waves at %.2f Hz, %d harmonics, %.0f uV", f0, config.fwave_harmonics, config.fwave_amplitude_uV)
    return Signal(track, config.sample_rate_hz)
