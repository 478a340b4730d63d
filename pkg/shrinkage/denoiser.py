"""
SWT Shrinkage Denoisers
pad -> decompose -> threshold every detail scale -> reconstruct -> trim.
The approximation is passed to reconstruction untouched.
"""

import logging
import time
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from core.errors import ConfigurationError
from core.signal import Signal, pad_symmetric, trim
from monitoring.tracing import trace_function
from shrinkage.rules import DEFAULT_GATE_FACTOR, RULES, hybrid_shrink
from shrinkage.thresholds import ThresholdTrack, minimax_threshold, moving_median_threshold, qrs_gate
from wavelets.filters import DEFAULT_WAVELET, load_wavelet
from wavelets.swt import SwtDecomposition, levels_for_rate, swt_decompose, swt_reconstruct

logger = logging.getLogger(__name__)


class DenoiserMethod(str, Enum):
    """Wavelet shrinkage methods"""
    PROPOSED_HYBRID = "proposed-hybrid"
    HARD_MINIMAX = "hard-minimax"
    SOFT_MINIMAX = "soft-minimax"
    HYPERBOLIC_MINIMAX = "hyperbolic-minimax"

    @property
    def rule(self) -> str:
        return self.value.split("-")[0]


class DenoiserSpec(BaseModel):
    """Wavelet denoiser configuration (serialisable as plain key-value pairs)"""

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=False)

    method: DenoiserMethod = DenoiserMethod.PROPOSED_HYBRID
    wavelet: str = DEFAULT_WAVELET
    levels: Optional[int] = Field(default=None, ge=1, le=8)
    window_ms: float = Field(default=200.0, gt=0)
    qrs_gate_factor: float = Field(default=DEFAULT_GATE_FACTOR, gt=1)
    # multiplies the moving median; 1 is the plain median of |detail|
    threshold_scale: float = Field(default=1.0, gt=0)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "DenoiserSpec":
        """Build from a key-value section; unknown method names are rejected"""
        values = {key.strip().replace("-", "_"): value for key, value in mapping.items()}
        if values.get("levels") in ("", "auto", None):
            values.pop("levels", None)
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigurationError(f"invalid denoiser config: {e}") from e

    def to_mapping(self) -> Dict[str, str]:
        return {
            "method": self.method.value,
            "wavelet": self.wavelet,
            "levels": "auto" if self.levels is None else str(self.levels),
            "window_ms": f"{self.window_ms:g}",
            "qrs_gate_factor": f"{self.qrs_gate_factor:g}",
            "threshold_scale": f"{self.threshold_scale:g}",
        }

    def levels_for(self, sample_rate_hz: float) -> int:
        return self.levels if self.levels is not None else levels_for_rate(sample_rate_hz)


@dataclass(frozen=True)
class DenoiseResult:
    """Denoised record plus per-scale diagnostics"""

    signal: Signal
    decomposition: SwtDecomposition
    shrunk: SwtDecomposition
    thresholds: Tuple[ThresholdTrack, ...]
    gates: Tuple[Optional[np.ndarray], ...]


def _shrink_scale(
    detail: np.ndarray, scale: int, spec: DenoiserSpec, sample_rate_hz: float
) -> Tuple[np.ndarray, ThresholdTrack, Optional[np.ndarray]]:
    if spec.method is DenoiserMethod.PROPOSED_HYBRID:
        track = moving_median_threshold(detail, spec.window_ms, sample_rate_hz, scale)
        if spec.threshold_scale != 1.0:
            track = track.scaled(spec.threshold_scale)
        gate = qrs_gate(detail, track, spec.qrs_gate_factor)
        return hybrid_shrink(detail, track.values, spec.qrs_gate_factor), track, gate

    level = minimax_threshold(detail)
    track = ThresholdTrack.constant(level, detail.size, scale)
    return RULES[spec.method.rule](detail, level), track, None


@trace_function
def denoise_with_diagnostics(signal: Signal, spec: DenoiserSpec) -> DenoiseResult:
    """
    Run a wavelet shrinkage denoiser and keep its intermediate products

    Args:
        signal: Noisy record (1 kHz nominal; other rates adjust the level count)
        spec: Denoiser configuration

    Returns:
        DenoiseResult whose signal carries the input annotations
    """
    if not isinstance(spec.method, DenoiserMethod):
        raise ConfigurationError(f"unsupported denoiser method {spec.method!r}")
    started = time.perf_counter()
    filters = load_wavelet(spec.wavelet)
    levels = spec.levels_for(signal.sample_rate_hz)

    padded, original_length = pad_symmetric(signal, 2 ** levels)
    decomposition = swt_decompose(padded, filters, levels)

    shrunk_details: List[np.ndarray] = []
    thresholds: List[ThresholdTrack] = []
    gates: List[Optional[np.ndarray]] = []
    for scale, detail in enumerate(decomposition.details, start=1):
        shrunk, track, gate = _shrink_scale(detail, scale, spec, signal.sample_rate_hz)
        shrunk_details.append(shrunk)
        thresholds.append(track)
        gates.append(gate)

    shrunk = decomposition.with_details(shrunk_details)
    reconstructed = trim(swt_reconstruct(shrunk, filters), original_length)
    output = Signal(reconstructed.samples, signal.sample_rate_hz, signal.annotations)

    logger.debug(
        "Denoised %d samples with %s (%s, %d levels) in %.3fs",
        len(signal), spec.method.value, filters.name, levels, time.perf_counter() - started,
    )
    return DenoiseResult(output, decomposition, shrunk, tuple(thresholds), tuple(gates))


def denoise(signal: Signal, spec: DenoiserSpec) -> Signal:
    """Denoised record only"""
    return denoise_with_diagnostics(signal, spec).signal
