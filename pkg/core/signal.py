"""
Signal Core
Immutable sampled signal, power measurement, SNR-calibrated mixing,
band-limited resampling and pad/trim plumbing for the wavelet transform
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import signal as sps

from core.errors import SignalError

logger = logging.getLogger(__name__)

# Kaiser design for the polyphase resampler (about 80 dB stopband)
RESAMPLE_TAPS_PER_PHASE = 64
RESAMPLE_CUTOFF_FRACTION = 0.45
RESAMPLE_KAISER_BETA = 7.857
RATE_RATIO_MAX_DENOMINATOR = 1000
RATE_RATIO_TOLERANCE = 1e-9

SNR_LIMIT_DB = 60.0


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True).reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled single-channel record

    Samples are stored as a read-only float array; annotations are sorted
    sample indices (R-peaks for ECG) that travel with the samples.
    """

    samples: np.ndarray
    sample_rate_hz: float
    annotations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        samples = _frozen_array(self.samples, np.float64)
        annotations = _frozen_array(self.annotations, np.int64)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "annotations", annotations)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

        if not self.sample_rate_hz > 0 or not math.isfinite(self.sample_rate_hz):
            raise SignalError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if annotations.size:
            if annotations[0] < 0 or annotations[-1] >= samples.size:
                raise SignalError(
                    f"annotation outside [0, {samples.size}): "
                    f"{int(annotations.min())}..{int(annotations.max())}"
                )
            if np.any(np.diff(annotations) <= 0):
                raise SignalError("annotations must be strictly increasing")

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    @property
    def time_s(self) -> np.ndarray:
        return np.arange(len(self)) / self.sample_rate_hz

    def with_samples(self, samples, keep_annotations: bool = True) -> "Signal":
        """Same rate (and annotations), new samples"""
        annotations = self.annotations if keep_annotations else np.zeros(0, dtype=np.int64)
        return Signal(samples, self.sample_rate_hz, annotations)

    def with_annotations(self, annotations) -> "Signal":
        return Signal(self.samples, self.sample_rate_hz, annotations)

    def scaled(self, factor: float) -> "Signal":
        return self.with_samples(self.samples * factor)

    def __add__(self, other: "Signal") -> "Signal":
        require_aligned(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "Signal") -> "Signal":
        require_aligned(self, other)
        return self.with_samples(self.samples - other.samples)


@dataclass(frozen=True)
class SnrDb:
    """Signal-to-noise ratio in decibels; +inf means no noise"""

    value: float

    def __post_init__(self):
        value = float(self.value)
        object.__setattr__(self, "value", value)
        if math.isnan(value) or value == -math.inf:
            raise SignalError(f"invalid SNR: {value}")
        if math.isfinite(value) and abs(value) > SNR_LIMIT_DB:
            raise SignalError(f"SNR {value} dB outside [-{SNR_LIMIT_DB}, {SNR_LIMIT_DB}] dB")

    @classmethod
    def infinite(cls) -> "SnrDb":
        return cls(math.inf)

    @classmethod
    def coerce(cls, value: Union["SnrDb", float, str]) -> "SnrDb":
        if isinstance(value, SnrDb):
            return value
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinite", "+inf"):
            return cls.infinite()
        return cls(float(value))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else f"{self.value:g}"


def require_aligned(first: Signal, second: Signal) -> None:
    """Raise unless both signals share length and sample rate"""
    if len(first) != len(second):
        raise SignalError(f"length mismatch: {len(first)} vs {len(second)}")
    if first.sample_rate_hz != second.sample_rate_hz:
        raise SignalError(
            f"sample rate mismatch: {first.sample_rate_hz} vs {second.sample_rate_hz} Hz"
        )


def power(signal: Union[Signal, np.ndarray]) -> float:
    """Biased mean-square power over the whole record"""
    samples = signal.samples if isinstance(signal, Signal) else np.asarray(signal, dtype=float)
    if samples.size == 0:
        raise SignalError("empty signal")
    return float(np.mean(np.square(samples)))


def snr_db(reference: Union[Signal, np.ndarray], noise: Union[Signal, np.ndarray]) -> float:
    """10*log10 of the power ratio reference/noise"""
    return 10.0 * math.log10(power(reference) / power(noise))


def mix_at_snr(
    clean: Signal,
    noise: Signal,
    snr_in: Union[SnrDb, float, str],
    calibration: Optional[slice] = None,
) -> Tuple[Signal, Signal]:
    """
    Scale noise to reach a target SNR against the clean record and add it

    Args:
        clean: Noise-free record
        noise: Interference track, same length and rate
        snr_in: Target SNR in dB (inf leaves the record clean)
        calibration: Optional sample slice over which both powers are measured
            (the amplitude-varying scenario calibrates after its onset)

    Returns:
        (noisy, scaled_noise); noisy keeps the clean annotations
    """
    require_aligned(clean, noise)
    target = SnrDb.coerce(snr_in)
    window = calibration if calibration is not None else slice(None)

    if target.is_infinite:
        scaled = noise.with_samples(np.zeros(len(noise)), keep_annotations=False)
        return clean.with_samples(clean.samples.copy()), scaled

    clean_power = power(clean.samples[window])
    noise_power = power(noise.samples[window])
    if clean_power == 0:
        raise SignalError("clean signal has zero power")
    if noise_power == 0:
        raise SignalError("noise has zero power; finite SNR cannot be reached")

    gain = math.sqrt(clean_power / (noise_power * 10.0 ** (target.value / 10.0)))
    scaled = noise.with_samples(noise.samples * gain, keep_annotations=False)
    noisy = clean.with_samples(clean.samples + scaled.samples)
    logger.debug("Mixed noise at %s dB with gain %.6g", target, gain)
    return noisy, scaled


def _rate_ratio(source_hz: float, target_hz: float) -> Fraction:
    """
    up/down with denominator at most 1000

    Rate pairs without such a ratio (e.g. 1000 -> 1001.3 Hz) are approximated
    and logged; the caller labels the output with the rate actually reached.
    """
    exact = target_hz / source_hz
    ratio = Fraction(exact).limit_denominator(RATE_RATIO_MAX_DENOMINATOR)
    if abs(float(ratio) - exact) > RATE_RATIO_TOLERANCE * exact:
        logger.warning(
            "Rate ratio %.6g -> %.6g Hz has no exact up/down form; using %d/%d (%.9g Hz)",
            source_hz, target_hz, ratio.numerator, ratio.denominator, source_hz * float(ratio),
        )
    return ratio


def _resampling_prototype(up: int, down: int) -> np.ndarray:
    """Kaiser windowed-sinc lowpass with every polyphase branch at unit DC gain"""
    widest = max(up, down)
    numtaps = RESAMPLE_TAPS_PER_PHASE * widest + 1
    taps = sps.firwin(
        numtaps,
        2.0 * RESAMPLE_CUTOFF_FRACTION / widest,
        window=("kaiser", RESAMPLE_KAISER_BETA),
    )
    # resample_poly multiplies by `up`; each branch must sum to 1/up for exact DC
    for phase in range(up):
        branch_sum = taps[phase::up].sum()
        if branch_sum != 0:
            taps[phase::up] /= branch_sum * up
    return taps


def resample(signal: Signal, target_rate_hz: float) -> Signal:
    """
    Polyphase windowed-sinc resampling

    Cutoff sits at 0.45 of the lower of the two rates, so content below
    0.4 of that rate passes essentially unchanged. Annotations are mapped
    proportionally (index * new / old, rounded). Ratios that need a
    denominator above 1000 are approximated with a warning and the output
    carries the rate actually reached.
    """
    if not target_rate_hz > 0:
        raise SignalError(f"target rate must be positive, got {target_rate_hz}")
    if target_rate_hz == signal.sample_rate_hz:
        return signal

    ratio = _rate_ratio(signal.sample_rate_hz, target_rate_hz)
    up, down = ratio.numerator, ratio.denominator
    prototype = _resampling_prototype(up, down)
    samples = sps.resample_poly(signal.samples, up, down, window=prototype)
    reached_rate_hz = signal.sample_rate_hz * up / down
    if math.isclose(reached_rate_hz, target_rate_hz, rel_tol=RATE_RATIO_TOLERANCE):
        reached_rate_hz = float(target_rate_hz)

    annotations = scale_annotations(
        signal.annotations, signal.sample_rate_hz, reached_rate_hz, len(samples)
    )
    logger.debug(
        "Resampled %d samples %.6g->%.6g Hz (up=%d, down=%d)",
        len(signal), signal.sample_rate_hz, reached_rate_hz, up, down,
    )
    return Signal(samples, reached_rate_hz, annotations)


def scale_annotations(
    annotations: Sequence[int], source_hz: float, target_hz: float, length: int
) -> np.ndarray:
    """Map sample indices between rates, dropping any that fall off the end"""
    mapped = np.rint(np.asarray(annotations, dtype=float) * target_hz / source_hz).astype(np.int64)
    mapped = mapped[(mapped >= 0) & (mapped < length)]
    return np.unique(mapped)


def pad_symmetric(signal: Signal, multiple: int) -> Tuple[Signal, int]:
    """Mirror-extend the tail to the next multiple of `multiple` samples"""
    if multiple < 1:
        raise SignalError(f"multiple must be >= 1, got {multiple}")
    original_length = len(signal)
    padded_length = -(-original_length // multiple) * multiple
    extra = padded_length - original_length
    if extra == 0 or original_length == 0:
        return signal, original_length
    samples = np.pad(signal.samples, (0, extra), mode="symmetric")
    return signal.with_samples(samples), original_length


def trim(signal: Signal, original_length: int) -> Signal:
    """Keep the first original_length samples"""
    if original_length > len(signal) or original_length < 0:
        raise SignalError(
            f"cannot trim {len(signal)} samples to {original_length}"
        )
    if original_length == len(signal):
        return signal
    annotations = signal.annotations[signal.annotations < original_length]
    return Signal(signal.samples[:original_length], signal.sample_rate_hz, annotations)
