"""
Power-Line Interference
Fundamental plus harmonics 2-5 with slow clipped random-walk wander of
frequency and amplitude, interharmonics as small sinusoidal FM, and the
amplitude-varying / frequency-deviation scenarios
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import ConfigurationError
from core.signal import Signal
from monitoring.tracing import trace_function
from synthesis.config import PLI_STREAM, PliConfig, PliScenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PliRealization:
    """One draw of the interference with its ground-truth tracks"""

    signal: Signal
    frequency_track: Signal
    frequency_offset_hz: float
    am_rate_hz: float
    onset_sample: int


def random_walk(
    rng: np.random.Generator, bound: float, duration_s: float, update_hz: float,
    step_fraction: float, t: np.ndarray,
) -> np.ndarray:
    """Clipped random walk in [-bound, bound] updated at update_hz, linearly interpolated onto t"""
    if bound == 0:
        return np.zeros(t.size)
    knots = int(math.ceil(duration_s * update_hz)) + 2
    values = np.empty(knots)
    values[0] = rng.uniform(-bound, bound)
    steps = rng.normal(0.0, step_fraction * bound, size=knots - 1)
    for index in range(1, knots):
        values[index] = np.clip(values[index - 1] + steps[index - 1], -bound, bound)
    return np.interp(t, np.arange(knots) / update_hz, values)


def _component_powers(config: PliConfig) -> Tuple[float, ...]:
    return (1.0,) + tuple(config.harmonic_power_fractions)


@trace_function
def realize_pli(config: PliConfig, duration_s: float = 60.0, sample_rate_hz: float = 1000.0) -> PliRealization:
    """
    Generate the interference and its ground-truth tracks

    Random draws come from one generator seeded by (seed, PLI stream) in a
    fixed order, so the result depends on the config alone.
    """
    if not duration_s > 0 or not sample_rate_hz > 0:
        raise ConfigurationError(f"invalid PLI duration {duration_s} s / rate {sample_rate_hz} Hz")
    if config.scenario is PliScenario.AMP_VARYING and config.onset_s >= duration_s:
        raise ConfigurationError(f"onset {config.onset_s} s is not before the end ({duration_s} s)")

    rng = config.rng(PLI_STREAM)
    count = int(round(duration_s * sample_rate_hz))
    t = np.arange(count) / sample_rate_hz

    offset = 0.0
    if config.scenario is PliScenario.FREQ_DEV:
        # fixed magnitude, random sign; the supply wander rides on top
        offset = config.freq_deviation_hz * (1.0 if rng.uniform() < 0.5 else -1.0)
    am_rate = 0.0
    if config.scenario is PliScenario.AMP_VARYING:
        am_rate = float(rng.uniform(config.am_rate_min_hz, config.am_rate_max_hz))

    walk = dict(duration_s=duration_s, update_hz=config.walk_update_hz,
                step_fraction=config.walk_step_fraction, t=t)
    # the supply frequency wanders; harmonics stay locked to it
    frequency_wander = random_walk(rng, config.max_freq_fraction, **walk)
    carrier = (config.fundamental_hz + offset) * (1.0 + frequency_wander)

    fm_rate = config.interharmonic_rate_hz if config.interharmonic_fm_deviation_hz > 0 else 0.0
    samples = np.zeros(count)
    for harmonic, power_fraction in enumerate(_component_powers(config), start=1):
        amplitude_wander = random_walk(rng, config.max_amp_fraction, **walk)
        start_phase, fm_phase = rng.uniform(0.0, 2.0 * np.pi, size=2)
        if power_fraction == 0 or harmonic * float(carrier.max()) >= sample_rate_hz / 2.0:
            continue
        frequency = harmonic * carrier
        if fm_rate:
            frequency = frequency + config.interharmonic_fm_deviation_hz * np.sin(
                2.0 * np.pi * fm_rate * t + fm_phase
            )
        phase = start_phase + 2.0 * np.pi * (np.cumsum(frequency) - frequency[0]) / sample_rate_hz
        samples += math.sqrt(power_fraction) * (1.0 + amplitude_wander) * np.sin(phase)

    onset_sample = 0
    if config.scenario is PliScenario.AMP_VARYING:
        onset_sample = min(count, int(round(config.onset_s * sample_rate_hz)))
        envelope = 1.0 + config.am_depth * np.sin(2.0 * np.pi * am_rate * t)
        envelope[:onset_sample] = 0.0
        samples *= envelope

    logger.debug(
        "PLI %s: offset %+.2f Hz, AM rate %.2f Hz, %d samples",
        config.scenario.value, offset, am_rate, count,
    )
    return PliRealization(
        signal=Signal(samples, sample_rate_hz),
        frequency_track=Signal(carrier, sample_rate_hz),
        frequency_offset_hz=offset,
        am_rate_hz=am_rate,
        onset_sample=onset_sample,
    )


def synth_pli(config: PliConfig, duration_s: float = 60.0, sample_rate_hz: float = 1000.0) -> Signal:
    """Interference track for one scenario (dimensionless; scaled later by SNR mixing)"""
    return realize_pli(config, duration_s, sample_rate_hz).signal


def instantaneous_frequency_track(
    config: PliConfig, duration_s: float = 60.0, sample_rate_hz: float = 1000.0
) -> Signal:
    """Supply (fundamental carrier) frequency per sample, in Hz"""
    return realize_pli(config, duration_s, sample_rate_hz).frequency_track
