"""
Ventricular Activity
Gaussian-event dynamical ECG model (Q, R, S, T events) driven by a
piecewise-linear cardiac phase, integrated with fixed-step RK4
"""

import configparser
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Tuple

import numpy as np
from scipy.signal import lfilter

from core.errors import ConfigurationError, SynthesisError
from core.signal import Signal
from monitoring.tracing import trace_function
from synthesis.config import RR_STREAM, AfEcgConfig

logger = logging.getLogger(__name__)

MODEL_PATH = Path(__file__).with_name("ventricular_model.ini")
ANGLE_SCALINGS = ("none", "hr", "sqrt_hr")


@dataclass(frozen=True)
class GaussianEvent:
    name: str
    angle_deg: float
    amplitude: float
    width_rad: float
    angle_scaling: str


@dataclass(frozen=True)
class VentricularModel:
    """Event table plus output scaling of the ventricular generator"""

    events: Tuple[GaussianEvent, ...]
    output_min_mv: float = -0.4
    output_max_mv: float = 1.2
    peak_search_ms: float = 10.0

    def event_arrays(self, heart_rate_bpm: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Angles (rad), amplitudes and widths adjusted to the mean heart rate"""
        hr_factor = math.sqrt(heart_rate_bpm / 60.0)
        angle_factor = {"none": 1.0, "hr": hr_factor, "sqrt_hr": math.sqrt(hr_factor)}
        angles = np.array([
            math.radians(event.angle_deg) * angle_factor[event.angle_scaling] for event in self.events
        ])
        amplitudes = np.array([event.amplitude for event in self.events])
        widths = np.array([event.width_rad * hr_factor for event in self.events])
        return angles, amplitudes, widths


@lru_cache(maxsize=4)
def load_model(path: Path = MODEL_PATH) -> VentricularModel:
    """Read the event table from its INI file"""
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigurationError(f"ventricular model file not found: {path}")
    try:
        events = []
        for name in parser.sections():
            if name == "model":
                continue
            section = parser[name]
            scaling = section.get("angle_scaling", "none").strip()
            if scaling not in ANGLE_SCALINGS:
                raise ConfigurationError(f"[{name}] angle_scaling must be one of {ANGLE_SCALINGS}")
            events.append(GaussianEvent(
                name=name,
                angle_deg=section.getfloat("angle_deg"),
                amplitude=section.getfloat("amplitude"),
                width_rad=section.getfloat("width_rad"),
                angle_scaling=scaling,
            ))
        model = parser["model"] if parser.has_section("model") else {}
        return VentricularModel(
            events=tuple(events),
            output_min_mv=float(model.get("output_min_mv", -0.4)),
            output_max_mv=float(model.get("output_max_mv", 1.2)),
            peak_search_ms=float(model.get("peak_search_ms", 10.0)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid ventricular model {path}: {e}") from e


def draw_rr_intervals(config: AfEcgConfig, count: int) -> np.ndarray:
    """Per-beat RR periods: mean * (1 + U(-v, v))"""
    rng = config.rng(RR_STREAM)
    deviation = rng.uniform(-1.0, 1.0, size=count) * config.rr_variability_fraction
    return config.mean_rr_s * (1.0 + deviation)


def _phase_knots(config: AfEcgConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Knot times and unwrapped phases: phase -pi at t=0, R events (phase 2*pi*k)
    half an RR in and then every RR_k
    """
    span = config.duration_s + 2.0 / config.sample_rate_hz
    shortest = config.mean_rr_s * (1.0 - config.rr_variability_fraction)
    count = int(math.ceil(span / shortest)) + 2
    rr = draw_rr_intervals(config, count)
    r_times = rr[0] / 2.0 + np.concatenate(([0.0], np.cumsum(rr[1:])))
    times = np.concatenate(([0.0], r_times))
    phases = np.concatenate(([-np.pi], 2.0 * np.pi * np.arange(r_times.size)))
    return times, phases


def _forcing(theta: np.ndarray, angles: np.ndarray, amplitudes: np.ndarray, widths: np.ndarray) -> np.ndarray:
    """-sum_i a_i * dtheta_i * exp(-dtheta_i^2 / (2 b_i^2)) with dtheta wrapped to [-pi, pi)"""
    delta = np.mod(theta[:, None] - angles[None, :] + np.pi, 2.0 * np.pi) - np.pi
    return -np.sum(amplitudes * delta * np.exp(-0.5 * (delta / widths) ** 2), axis=1)


def _integrate_rk4(forcing_start, forcing_mid, forcing_end, step: float) -> np.ndarray:
    """
    Classic RK4 for z' = F(t) - z from z(0) = 0

    For this linear equation every RK4 step collapses to
    z[n+1] = A * z[n] + B[n], evaluated as a first-order recursive filter.
    """
    h = step
    decay = 1.0 - h + h ** 2 / 2.0 - h ** 3 / 6.0 + h ** 4 / 24.0
    drive = (h / 6.0) * (
        (1.0 - h + h ** 2 / 2.0 - h ** 3 / 4.0) * forcing_start
        + (4.0 - 2.0 * h + h ** 2 / 2.0) * forcing_mid
        + forcing_end
    )
    advanced = lfilter([1.0], [1.0, -decay], drive)
    return np.concatenate(([0.0], advanced[:-1]))


def _refine_peaks(trace: np.ndarray, knot_times: np.ndarray, sample_rate_hz: float, search_ms: float) -> np.ndarray:
    reach = max(1, int(round(search_ms * sample_rate_hz / 1000.0)))
    peaks = []
    for index in np.rint(knot_times * sample_rate_hz).astype(np.int64):
        if index < 0 or index >= trace.size:
            continue
        low, high = max(0, index - reach), min(trace.size, index + reach + 1)
        peaks.append(low + int(np.argmax(trace[low:high])))
    return np.unique(np.asarray(peaks, dtype=np.int64))


@trace_function
def synth_ventricular(config: AfEcgConfig, model: VentricularModel = None) -> Tuple[Signal, np.ndarray]:
    """
    Quasi-periodic QRST trace without P waves

    Args:
        config: Generator configuration (heart rate, RR variability, seed)
        model: Event table; the shipped defaults when omitted

    Returns:
        (ventricular track in mV carrying R-peak annotations, R-peak indices)
    """
    model = model or load_model()
    fs = config.sample_rate_hz
    count = config.sample_count
    step = 1.0 / fs

    knot_times, knot_phases = _phase_knots(config)
    angles, amplitudes, widths = model.event_arrays(config.heart_rate_bpm)
    t = np.arange(count) * step

    def forcing_at(times):
        return _forcing(np.interp(times, knot_times, knot_phases), angles, amplitudes, widths)

    z = _integrate_rk4(forcing_at(t), forcing_at(t + step / 2.0), forcing_at(t + step), step)
    if not np.all(np.isfinite(z)):
        raise SynthesisError(f"ventricular integration diverged for config {config.to_mapping()}")

    span = float(z.max() - z.min())
    if span <= 0:
        raise SynthesisError(f"flat ventricular trace for config {config.to_mapping()}")
    trace = (z - z.min()) / span * (model.output_max_mv - model.output_min_mv) + model.output_min_mv

    r_peaks = _refine_peaks(trace, knot_times[1:], fs, model.peak_search_ms)
    logger.debug(
        "Ventricular track: %d samples, %d beats at %.1f bpm (v=%.2f)",
        count, r_peaks.size, config.heart_rate_bpm, config.rr_variability_fraction,
    )
    return Signal(trace, fs, r_peaks), r_peaks
