"""
Stationary Wavelet Transform
Undecimated (a trous) decomposition and exact inverse with periodic boundaries.

Level-j filters are the base filters upsampled by 2**(j-1). Each dilated
filter is centred on its middle tap, so coefficient n at every scale refers
to signal sample n. Circular convolution is carried out in the frequency
domain; synthesis uses the conjugate responses, which is the time-reversed
reconstruction filter bank of an orthogonal wavelet.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from core.errors import TransformError
from core.signal import Signal
from monitoring.tracing import trace_function
from wavelets.filters import WaveletFilters

logger = logging.getLogger(__name__)

MIN_LEVELS = 1
MAX_LEVELS = 8
DEFAULT_LEVELS = 4
REFERENCE_RATE_HZ = 1000.0


@dataclass(frozen=True)
class SwtDecomposition:
    """Approximation at the deepest scale plus one detail sequence per scale

    details[0] holds scale 1 (highest band), details[-1] the deepest scale.
    """

    approximation: np.ndarray
    details: Tuple[np.ndarray, ...]
    sample_rate_hz: float
    wavelet: str

    def __post_init__(self):
        if len(self.details) < MIN_LEVELS:
            raise TransformError("decomposition needs at least one detail scale")
        lengths = {np.shape(self.approximation)[0]} | {np.shape(d)[0] for d in self.details}
        if len(lengths) != 1:
            raise TransformError(f"coefficient sequences differ in length: {sorted(lengths)}")
        length = lengths.pop()
        if length % (2 ** len(self.details)):
            raise TransformError(
                f"length {length} not divisible by 2**{len(self.details)}"
            )

    @property
    def levels(self) -> int:
        return len(self.details)

    def __len__(self) -> int:
        return int(np.shape(self.approximation)[0])

    def detail(self, scale: int) -> np.ndarray:
        if not 1 <= scale <= self.levels:
            raise TransformError(f"scale {scale} outside 1..{self.levels}")
        return self.details[scale - 1]

    def with_details(self, details: Sequence[np.ndarray]) -> "SwtDecomposition":
        """Replace the detail sequences, keeping the approximation object untouched"""
        return SwtDecomposition(
            approximation=self.approximation,
            details=tuple(np.asarray(d, dtype=float) for d in details),
            sample_rate_hz=self.sample_rate_hz,
            wavelet=self.wavelet,
        )


def levels_for_rate(sample_rate_hz: float) -> int:
    """Level count that keeps the 50 Hz fundamental in the deepest detail band"""
    if sample_rate_hz == REFERENCE_RATE_HZ:
        return DEFAULT_LEVELS
    levels = round(math.log2(sample_rate_hz / 62.5))
    return int(min(6, max(3, levels)))


def band_of_scale(scale: int, sample_rate_hz: float, levels: int = DEFAULT_LEVELS) -> Tuple[float, float]:
    """Nominal dyadic band (low_hz, high_hz) of detail scale j"""
    if not 1 <= scale <= levels:
        raise TransformError(f"scale {scale} outside 1..{levels}")
    return sample_rate_hz / 2 ** (scale + 1), sample_rate_hz / 2 ** scale


def band_of_approximation(sample_rate_hz: float, levels: int = DEFAULT_LEVELS) -> Tuple[float, float]:
    """Nominal band of the approximation at the deepest scale"""
    if levels < MIN_LEVELS:
        raise TransformError(f"levels must be >= {MIN_LEVELS}")
    return 0.0, sample_rate_hz / 2 ** (levels + 1)


@lru_cache(maxsize=128)
def _dilated_response(taps: Tuple[float, ...], level: int, length: int) -> np.ndarray:
    """rfft of a zero-phase, 2**(level-1)-dilated periodic kernel"""
    dilation = 2 ** (level - 1)
    centre = ((len(taps) - 1) * dilation) // 2
    kernel = np.zeros(length)
    positions = (np.arange(len(taps)) * dilation - centre) % length
    np.add.at(kernel, positions, np.asarray(taps))
    # correlation with the taps: index k of the kernel multiplies x[n + k]
    response = np.conj(np.fft.rfft(kernel))
    response.setflags(write=False)
    return response


def _check_levels(levels: int) -> None:
    if not MIN_LEVELS <= levels <= MAX_LEVELS:
        raise TransformError(f"levels must lie in [{MIN_LEVELS}, {MAX_LEVELS}], got {levels}")


@trace_function
def swt_decompose(signal: Signal, filters: WaveletFilters, levels: int = DEFAULT_LEVELS) -> SwtDecomposition:
    """
    Undecimated decomposition with periodic boundaries

    Args:
        signal: Input whose length is divisible by 2**levels (pad first)
        filters: Orthogonal filter bank
        levels: Number of detail scales, 1..8

    Returns:
        SwtDecomposition with signal-length sequences
    """
    _check_levels(levels)
    length = len(signal)
    if length == 0 or length % (2 ** levels):
        raise TransformError(
            f"signal length {length} is not a multiple of 2**{levels}; "
            "pad it with core.signal.pad_symmetric first"
        )

    spectrum = np.fft.rfft(signal.samples)
    details = []
    for level in range(1, levels + 1):
        lowpass = _dilated_response(filters.decomposition_lowpass, level, length)
        highpass = _dilated_response(filters.decomposition_highpass, level, length)
        details.append(np.fft.irfft(spectrum * highpass, n=length))
        spectrum = spectrum * lowpass
    approximation = np.fft.irfft(spectrum, n=length)

    return SwtDecomposition(
        approximation=approximation,
        details=tuple(details),
        sample_rate_hz=signal.sample_rate_hz,
        wavelet=filters.name,
    )


@trace_function
def swt_reconstruct(decomposition: SwtDecomposition, filters: WaveletFilters) -> Signal:
    """Exact inverse of swt_decompose for unmodified coefficients"""
    length = len(decomposition)
    for index, detail in enumerate(decomposition.details, start=1):
        if np.shape(detail)[0] != length:
            raise TransformError(f"scale {index} has {np.shape(detail)[0]} coefficients, expected {length}")

    spectrum = np.fft.rfft(decomposition.approximation)
    for level in range(decomposition.levels, 0, -1):
        lowpass = _dilated_response(filters.decomposition_lowpass, level, length)
        highpass = _dilated_response(filters.decomposition_highpass, level, length)
        detail_spectrum = np.fft.rfft(decomposition.detail(level))
        spectrum = (np.conj(lowpass) * spectrum + np.conj(highpass) * detail_spectrum) / 2.0
    samples = np.fft.irfft(spectrum, n=length)
    return Signal(samples, decomposition.sample_rate_hz)
