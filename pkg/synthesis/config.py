"""
Generator Configuration
Seeded, validated configurations for the synthetic AF ECG and the PLI scenarios
"""

from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.errors import ConfigurationError

# independent random streams per generator, keyed with the config seed
RR_STREAM = 1
FWAVE_STREAM = 2
PLI_STREAM = 3

FWAVE_BAND_HZ = (3.0, 9.0)


def _normalise_keys(mapping: Mapping[str, object]) -> Dict[str, object]:
    values = {}
    for key, value in mapping.items():
        if isinstance(value, str) and value.strip().lower() in ("", "none", "auto"):
            continue
        values[key.strip().replace("-", "_")] = value
    return values


class _GeneratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=0, ge=0)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object], **overrides):
        """Build from an INI section; blank / auto values fall back to defaults"""
        values = _normalise_keys(mapping)
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigurationError(f"invalid {cls.__name__}: {e}") from e

    def to_mapping(self) -> Dict[str, str]:
        """Flat echo of every field for `#` comment headers"""
        echo = {}
        for key, value in self.model_dump(mode="json").items():
            if isinstance(value, (list, tuple)):
                value = ", ".join(f"{item:g}" for item in value)
            echo[key] = "auto" if value is None else str(value)
        return echo

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])


class AfEcgConfig(_GeneratorConfig):
    """Synthetic AF ECG: ventricular model plus sawtooth f-waves"""

    duration_s: float = Field(default=60.0, gt=0)
    sample_rate_hz: float = Field(default=1000.0, gt=0)
    heart_rate_bpm: float = Field(default=80.0, ge=30, le=220)
    rr_variability_fraction: float = Field(default=0.0, ge=0, le=0.25)
    fwave_amplitude_uV: float = Field(default=75.0, ge=0)
    fwave_fundamental_hz: Optional[float] = Field(default=None, gt=0)
    fwave_harmonics: int = Field(default=3, ge=1, le=20)
    fm_deviation_hz: float = Field(default=0.2, ge=0, le=1)
    fm_rate_hz: float = Field(default=0.1, gt=0)

    @property
    def mean_rr_s(self) -> float:
        return 60.0 / self.heart_rate_bpm

    @property
    def sample_count(self) -> int:
        return int(round(self.duration_s * self.sample_rate_hz))


class PliScenario(str, Enum):
    """Interference scenarios"""
    COMMON = "common"
    AMP_VARYING = "amp-varying"
    FREQ_DEV = "freq-dev"


class PliConfig(_GeneratorConfig):
    """Power-line interference with slow frequency/amplitude wander, harmonics and interharmonic FM"""

    scenario: PliScenario = PliScenario.COMMON
    fundamental_hz: float = Field(default=50.0, gt=0)
    max_freq_fraction: float = Field(default=0.01, ge=0, le=1)
    max_amp_fraction: float = Field(default=0.10, ge=0, le=1)
    harmonic_power_fractions: Tuple[float, ...] = (0.02, 0.05, 0.01, 0.06)
    interharmonic_fm_deviation_hz: float = Field(default=0.5, ge=0)
    interharmonic_power_fraction: float = Field(default=0.002, gt=0, le=1)
    walk_update_hz: float = Field(default=1.0, gt=0)
    walk_step_fraction: float = Field(default=0.1, gt=0, le=1)
    onset_s: float = Field(default=10.0, ge=0)
    am_depth: float = Field(default=0.5, ge=0, le=1)
    am_rate_min_hz: float = Field(default=0.5, gt=0)
    am_rate_max_hz: float = Field(default=2.0, gt=0)
    freq_deviation_hz: float = Field(default=3.0, ge=0)

    @field_validator("harmonic_power_fractions", mode="before")
    @classmethod
    def _split_fractions(cls, value):
        if isinstance(value, str):
            return tuple(float(item) for item in value.replace(";", ",").split(",") if item.strip())
        return value

    @field_validator("harmonic_power_fractions")
    @classmethod
    def _fractions_in_range(cls, value):
        if any(not 0 <= fraction <= 1 for fraction in value):
            raise ValueError("harmonic power fractions must lie in [0, 1]")
        return value

    @model_validator(mode="after")
    def _am_rate_order(self):
        if self.am_rate_min_hz > self.am_rate_max_hz:
            raise ValueError("am_rate_min_hz exceeds am_rate_max_hz")
        return self

    @property
    def interharmonic_rate_hz(self) -> float:
        """FM rate putting the first sideband pair at interharmonic_power_fraction of the carrier"""
        return self.interharmonic_fm_deviation_hz / np.sqrt(2.0 * self.interharmonic_power_fraction)

    def quiet(self) -> "PliConfig":
        """Same scenario with every random fluctuation and harmonic switched off"""
        return self.model_copy(update={
            "max_freq_fraction": 0.0,
            "max_amp_fraction": 0.0,
            "harmonic_power_fractions": (),
            "interharmonic_fm_deviation_hz": 0.0,
        })
