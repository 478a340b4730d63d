"""
Butterworth Biquad Cascades
Fixed-bandwidth band-stop notch around the mains frequency, the band-pass
used by the R-peak detector, and causal / zero-phase application
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import signal as sps

from core.errors import ConfigurationError, SignalError
from core.signal import Signal

logger = logging.getLogger(__name__)

MAINS_HZ = 50.0
HALF_BANDWIDTH_HZ = 1.0


@dataclass(frozen=True)
class BiquadCascade:
    """
    Second-order sections (b0, b1, b2, a1, a2) with a0 normalised to 1

    Attributes:
        sections: One row per biquad
        sample_rate_hz: Rate the design is valid for
        center_hz: Band centre (notch frequency or band-pass centre)
        bandwidth_hz: Width between the -3 dB edges
        kind: bandstop or bandpass
    """

    sections: Tuple[Tuple[float, float, float, float, float], ...]
    sample_rate_hz: float
    center_hz: float
    bandwidth_hz: float
    kind: str = "bandstop"

    def __post_init__(self):
        if not self.sections:
            raise ConfigurationError("cascade needs at least one section")
        unstable = [index for index, radius in enumerate(self.pole_radii()) if radius >= 1.0]
        if unstable:
            raise ConfigurationError(f"unstable sections {unstable} in {self.kind} design")

    @classmethod
    def from_sos(cls, sos: np.ndarray, sample_rate_hz: float, center_hz: float,
                 bandwidth_hz: float, kind: str) -> "BiquadCascade":
        sos = np.atleast_2d(np.asarray(sos, dtype=float))
        sections = tuple(
            (row[0] / row[3], row[1] / row[3], row[2] / row[3], row[4] / row[3], row[5] / row[3])
            for row in sos
        )
        return cls(sections, float(sample_rate_hz), float(center_hz), float(bandwidth_hz), kind)

    @property
    def sos(self) -> np.ndarray:
        """scipy second-order-section layout [b0 b1 b2 1 a1 a2]"""
        return np.array([[b0, b1, b2, 1.0, a1, a2] for b0, b1, b2, a1, a2 in self.sections])

    def poles(self) -> np.ndarray:
        return np.concatenate([np.roots([1.0, a1, a2]) for _, _, _, a1, a2 in self.sections])

    def pole_radii(self) -> np.ndarray:
        return np.abs(self.poles())

    @property
    def is_stable(self) -> bool:
        return bool(np.all(self.pole_radii() < 1.0))

    def response(self, frequencies_hz: Sequence[float]) -> np.ndarray:
        """Complex frequency response at the given frequencies"""
        frequencies = np.atleast_1d(np.asarray(frequencies_hz, dtype=float))
        _, response = sps.sosfreqz(self.sos, worN=frequencies, fs=self.sample_rate_hz)
        return response

    def magnitude_db(self, frequencies_hz: Sequence[float]) -> np.ndarray:
        magnitude = np.abs(self.response(frequencies_hz))
        return 20.0 * np.log10(np.maximum(magnitude, 1e-300))

    def group_delay_samples(self, frequency_hz: float) -> float:
        """
        Group delay of the causal cascade at one frequency, in samples

        Annotations are not shifted on the notch paths; this is the delay
        they would need.
        """
        total = 0.0
        for b0, b1, b2, a1, a2 in self.sections:
            _, delay = sps.group_delay(
                ([b0, b1, b2], [1.0, a1, a2]), w=[float(frequency_hz)], fs=self.sample_rate_hz
            )
            total += float(delay[0])
        return total

    def to_text(self) -> str:
        """Coefficient dump, one section per line"""
        lines = [
            f"# {self.kind} center_hz={self.center_hz:g} bandwidth_hz={self.bandwidth_hz:g} "
            f"sample_rate_hz={self.sample_rate_hz:g}",
            "# b0 b1 b2 a1 a2",
        ]
        for section in self.sections:
            lines.append(" ".join(f"{value:.17g}" for value in section))
        return "\n".join(lines) + "\n"


def _check_band(low_hz: float, high_hz: float, sample_rate_hz: float) -> None:
    if not sample_rate_hz > 0:
        raise ConfigurationError(f"sample rate must be positive, got {sample_rate_hz}")
    if not 0 < low_hz < high_hz < sample_rate_hz / 2.0:
        raise ConfigurationError(
            f"band {low_hz:g}-{high_hz:g} Hz does not fit inside (0, {sample_rate_hz / 2.0:g}) Hz"
        )


def design_butterworth_notch(
    center_hz: float = MAINS_HZ,
    half_bandwidth_hz: float = HALF_BANDWIDTH_HZ,
    sample_rate_hz: float = 1000.0,
) -> BiquadCascade:
    """
    Second-order Butterworth band-stop with -3 dB edges at center +/- half_bandwidth

    A first-order band transformation yields a single biquad; the edges are
    prewarped so they land on the requested frequencies.
    """
    low, high = center_hz - half_bandwidth_hz, center_hz + half_bandwidth_hz
    _check_band(low, high, sample_rate_hz)
    sos = sps.butter(1, [low, high], btype="bandstop", fs=sample_rate_hz, output="sos")
    cascade = BiquadCascade.from_sos(sos, sample_rate_hz, center_hz, 2.0 * half_bandwidth_hz, "bandstop")
    logger.debug("Designed %g Hz notch (+/-%g Hz) at %g Hz", center_hz, half_bandwidth_hz, sample_rate_hz)
    return cascade


def design_bandpass(
    low_hz: float, high_hz: float, sample_rate_hz: float, order: int = 2
) -> BiquadCascade:
    """Butterworth band-pass cascade (2*order poles)"""
    _check_band(low_hz, high_hz, sample_rate_hz)
    if order < 1:
        raise ConfigurationError(f"filter order must be >= 1, got {order}")
    sos = sps.butter(order, [low_hz, high_hz], btype="bandpass", fs=sample_rate_hz, output="sos")
    return BiquadCascade.from_sos(
        sos, sample_rate_hz, float(np.sqrt(low_hz * high_hz)), high_hz - low_hz, "bandpass"
    )


def filter_signal(cascade: BiquadCascade, signal: Signal, zero_phase: bool = False) -> Signal:
    """
    Apply a cascade to a record

    Causal direct-form filtering from zero initial conditions unless
    zero_phase asks for a forward-backward pass.
    """
    if cascade.sample_rate_hz != signal.sample_rate_hz:
        raise SignalError(
            f"cascade designed for {cascade.sample_rate_hz:g} Hz, "
            f"signal sampled at {signal.sample_rate_hz:g} Hz"
        )
    if zero_phase:
        filtered = sps.sosfiltfilt(cascade.sos, signal.samples)
    else:
        filtered = sps.sosfilt(cascade.sos, signal.samples)
    return signal.with_samples(filtered)


def notch_fixed(signal: Signal, cascade: Optional[BiquadCascade] = None) -> Signal:
    """Fixed notch baseline at the mains frequency"""
    cascade = cascade or design_butterworth_notch(sample_rate_hz=signal.sample_rate_hz)
    return filter_signal(cascade, signal)
