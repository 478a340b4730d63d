"""
R-Peak Detector
Derivative-energy QRS detection: band-pass 5-25 Hz, squared derivative,
moving-window integration, adaptive threshold with refractory period
"""

import logging
from collections import deque

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks

from core.errors import EvaluationError
from core.signal import Signal
from notch.butterworth import design_bandpass, filter_signal

logger = logging.getLogger(__name__)

BAND_HZ = (5.0, 25.0)
INTEGRATION_MS = 150.0
REFRACTORY_MS = 250.0
REFINE_MS = 40.0
LEARNING_S = 2.0
THRESHOLD_FRACTION = 0.4
RUNNING_PEAKS = 8
NOISE_FLOOR_FACTOR = 3.0


def _samples(ms: float, sample_rate_hz: float) -> int:
    return max(1, int(round(ms * sample_rate_hz / 1000.0)))


def integrated_energy(signal: Signal) -> np.ndarray:
    """Band-passed, differentiated, squared and window-integrated record"""
    bandpass = design_bandpass(*BAND_HZ, sample_rate_hz=signal.sample_rate_hz)
    filtered = filter_signal(bandpass, signal, zero_phase=True).samples
    slope = np.diff(filtered, prepend=filtered[0]) * signal.sample_rate_hz
    window = _samples(INTEGRATION_MS, signal.sample_rate_hz)
    return uniform_filter1d(slope ** 2, size=window, mode="nearest")


def detect_r_peaks(signal: Signal) -> np.ndarray:
    """
    R-peak sample indices of an ECG record of at least 2 s

    A candidate is accepted when it exceeds both 0.4x the mean of the last
    eight accepted peaks and 3x the median integrated energy; accepted
    positions are moved to the raw maximum within +/-40 ms.

    Raises:
        EvaluationError: record too short or no peak accepted
    """
    fs = signal.sample_rate_hz
    if signal.duration_s < LEARNING_S:
        raise EvaluationError(f"detector needs at least {LEARNING_S:g} s, got {signal.duration_s:.3g} s")

    energy = integrated_energy(signal)
    floor = NOISE_FLOOR_FACTOR * float(np.median(energy))
    candidates, properties = find_peaks(energy, distance=_samples(REFRACTORY_MS, fs), height=0.0)
    heights = properties["peak_heights"]

    learning = energy[: int(LEARNING_S * fs)]
    running = deque([float(learning.max())], maxlen=RUNNING_PEAKS)
    accepted = []
    for index, height in zip(candidates, heights):
        threshold = max(THRESHOLD_FRACTION * float(np.mean(running)), floor)
        if height >= threshold:
            accepted.append(int(index))
            running.append(float(height))

    if not accepted:
        raise EvaluationError("no R-peaks detected")

    reach = _samples(REFINE_MS, fs)
    raw = signal.samples
    refined = []
    for index in accepted:
        low, high = max(0, index - reach), min(raw.size, index + reach + 1)
        refined.append(low + int(np.argmax(raw[low:high])))
    peaks = np.unique(np.asarray(refined, dtype=np.int64))
    logger.debug("Detected %d R-peaks in %.1f s", peaks.size, signal.duration_s)
    return peaks
