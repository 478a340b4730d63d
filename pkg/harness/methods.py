"""
Denoising Method Registry
Maps method ids to callables Signal -> Signal
"""

from functools import partial
from typing import Callable, Optional

from pydantic import BaseModel, ConfigDict, Field

from core.errors import ConfigurationError
from core.signal import Signal
from notch.adaptive import adaptive_notch
from notch.butterworth import design_butterworth_notch, filter_signal
from shrinkage.denoiser import DenoiserMethod, DenoiserSpec, denoise

NOTCH_FIXED = "notch-fixed"
NOTCH_ADAPTIVE = "notch-adaptive"
NOTCH_ADAPTIVE_FUNDAMENTAL = "notch-adaptive-fundamental"
WAVELET_METHODS = tuple(method.value for method in DenoiserMethod)
NOTCH_METHODS = (NOTCH_FIXED, NOTCH_ADAPTIVE, NOTCH_ADAPTIVE_FUNDAMENTAL)
METHOD_NAMES = WAVELET_METHODS + NOTCH_METHODS


class NotchSettings(BaseModel):
    """Parameters shared by the notch baselines"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fundamental_hz: float = Field(default=50.0, gt=0)
    half_bandwidth_hz: float = Field(default=1.0, gt=0)
    step_size: float = Field(default=0.1, gt=0, lt=1)
    bandwidth_hz: float = Field(default=2.0, gt=0)


def _fixed_notch(signal: Signal, settings: NotchSettings) -> Signal:
    cascade = design_butterworth_notch(
        settings.fundamental_hz, settings.half_bandwidth_hz, signal.sample_rate_hz
    )
    return filter_signal(cascade, signal)


def _adaptive(signal: Signal, settings: NotchSettings, harmonics: bool) -> Signal:
    return adaptive_notch(
        signal,
        mu=settings.step_size,
        harmonics=harmonics,
        bandwidth_hz=settings.bandwidth_hz,
        fundamental_hz=settings.fundamental_hz,
    )


def build_method(
    name: str,
    denoiser: Optional[DenoiserSpec] = None,
    notch: Optional[NotchSettings] = None,
) -> Callable[[Signal], Signal]:
    """
    Resolve a method id

    Args:
        name: One of METHOD_NAMES
        denoiser: Shared wavelet settings (window, gate, wavelet, levels); method is replaced
        notch: Notch baseline settings
    """
    notch = notch or NotchSettings()
    if name in WAVELET_METHODS:
        spec = (denoiser or DenoiserSpec()).model_copy(update={"method": DenoiserMethod(name)})
        return partial(denoise, spec=spec)
    if name == NOTCH_FIXED:
        return partial(_fixed_notch, settings=notch)
    if name == NOTCH_ADAPTIVE:
        return partial(_adaptive, settings=notch, harmonics=True)
    if name == NOTCH_ADAPTIVE_FUNDAMENTAL:
        return partial(_adaptive, settings=notch, harmonics=False)
    raise ConfigurationError(f"unknown method {name!r}; available: {', '.join(METHOD_NAMES)}")
