"""
Experiment Plans
Validated plan model and its INI loader
"""

import configparser
import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from core.errors import ConfigurationError
from core.signal import SnrDb
from evaluation.metrics import BETA_SCOPES, DEFAULT_BETA_FRACTION
from harness.methods import METHOD_NAMES, NotchSettings
from shrinkage.denoiser import DenoiserSpec
from synthesis.config import AfEcgConfig, PliConfig, PliScenario

logger = logging.getLogger(__name__)

SYNTHETIC_SOURCE = "synthetic"
SWEEP_PARAMETERS = ("heart_rate_bpm", "rr_variability_fraction", "fwave_amplitude_uV")
DEFAULT_SNR_IN_DB = (15.0, 10.0, 5.0, 0.0, -5.0, -10.0)
PLAN_SECTIONS = ("plan", "ecg", "pli", "denoiser", "notch", "evaluation", "sweep")


def _split_list(value):
    if isinstance(value, str):
        return tuple(item.strip() for item in value.replace(";", ",").split(",") if item.strip())
    return value


class EvaluationSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    beta_fraction: float = Field(default=DEFAULT_BETA_FRACTION, gt=0)
    beta_scope: str = "record"
    drop_edge_beats: bool = True

    @field_validator("beta_scope")
    @classmethod
    def _known_scope(cls, value):
        if value not in BETA_SCOPES:
            raise ValueError(f"beta_scope must be one of {BETA_SCOPES}")
        return value


class HeartRateDraw(BaseModel):
    """Per-trial heart rate drawn from N(mean, std) bpm"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mean_bpm: float = Field(gt=0)
    std_bpm: float = Field(ge=0)

    @classmethod
    def parse(cls, text: str) -> "HeartRateDraw":
        """normal:<mean>:<std>"""
        parts = [part.strip() for part in text.split(":")]
        if len(parts) != 3 or parts[0] != "normal":
            raise ValueError(f"heart_rate_draw must look like normal:100:10, got {text!r}")
        return cls(mean_bpm=float(parts[1]), std_bpm=float(parts[2]))

    def __str__(self) -> str:
        return f"normal:{self.mean_bpm:g}:{self.std_bpm:g}"


class ExperimentPlan(BaseModel):
    """Methods x scenarios x SNRs x trials (x sweep values) over one record source"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "plan"
    methods: Tuple[str, ...] = METHOD_NAMES
    scenarios: Tuple[PliScenario, ...] = (PliScenario.COMMON,)
    snr_in_db: Tuple[float, ...] = DEFAULT_SNR_IN_DB
    trials: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0)
    source: str = SYNTHETIC_SOURCE
    source_sample_rate_hz: Optional[float] = Field(default=None, gt=0)
    resample_to_hz: float = Field(default=1000.0, gt=0)
    ecg: AfEcgConfig = AfEcgConfig()
    pli: PliConfig = PliConfig()
    denoiser: DenoiserSpec = DenoiserSpec()
    notch: NotchSettings = NotchSettings()
    evaluation: EvaluationSettings = EvaluationSettings()
    sweep_parameter: Optional[str] = None
    sweep_values: Tuple[float, ...] = ()
    heart_rate_draw: Optional[HeartRateDraw] = None

    @field_validator("methods", "scenarios", "sweep_values", mode="before")
    @classmethod
    def _lists(cls, value):
        return _split_list(value)

    @field_validator("snr_in_db", mode="before")
    @classmethod
    def _snr_values(cls, value):
        return tuple(SnrDb.coerce(item).value for item in _split_list(value))

    @field_validator("heart_rate_draw", mode="before")
    @classmethod
    def _draw(cls, value):
        if isinstance(value, str):
            return HeartRateDraw.parse(value) if value.strip() else None
        return value

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, value):
        unknown = [name for name in value if name not in METHOD_NAMES]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; available: {', '.join(METHOD_NAMES)}")
        return value

    @model_validator(mode="after")
    def _consistent(self):
        for name in ("methods", "scenarios", "snr_in_db"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        if self.sweep_parameter is not None:
            if self.sweep_parameter not in SWEEP_PARAMETERS:
                raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMETERS}")
            if not self.sweep_values:
                raise ValueError("sweep needs at least one value")
            if self.sweep_parameter == "heart_rate_bpm" and self.heart_rate_draw is not None:
                raise ValueError("heart_rate_draw conflicts with a heart-rate sweep")
            for value in self.sweep_values:
                AfEcgConfig(**{**self.ecg.model_dump(), self.sweep_parameter: value})
        if not self.is_synthetic and self.source_sample_rate_hz is None:
            raise ValueError("ingested sources need source_sample_rate_hz")
        return self

    @property
    def is_synthetic(self) -> bool:
        return self.source == SYNTHETIC_SOURCE

    @property
    def sweep_points(self) -> Tuple[Optional[float], ...]:
        return self.sweep_values if self.sweep_parameter else (None,)

    def with_seed(self, seed: Optional[int]) -> "ExperimentPlan":
        if seed is None:
            return self
        if seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {seed}")
        return self.model_copy(update={"seed": int(seed)})

    def echo(self) -> Dict[str, str]:
        """Flat key/value description for `#` comment headers"""
        echo = {
            "plan.name": self.name,
            "plan.methods": ", ".join(self.methods),
            "plan.scenarios": ", ".join(scenario.value for scenario in self.scenarios),
            "plan.snr_in_db": ", ".join(str(SnrDb(value)) for value in self.snr_in_db),
            "plan.trials": str(self.trials),
            "plan.seed": str(self.seed),
            "plan.source": self.source,
        }
        if not self.is_synthetic:
            echo["plan.source_sample_rate_hz"] = f"{self.source_sample_rate_hz:g}"
            echo["plan.resample_to_hz"] = f"{self.resample_to_hz:g}"
        if self.sweep_parameter:
            echo["sweep.parameter"] = self.sweep_parameter
            echo["sweep.values"] = ", ".join(f"{value:g}" for value in self.sweep_values)
        if self.heart_rate_draw is not None:
            echo["sweep.heart_rate_draw"] = str(self.heart_rate_draw)
        echo.update({f"ecg.{key}": value for key, value in self.ecg.to_mapping().items() if key != "seed"})
        echo.update({f"pli.{key}": value for key, value in self.pli.to_mapping().items() if key not in ("seed", "scenario")})
        echo.update({f"denoiser.{key}": value for key, value in self.denoiser.to_mapping().items() if key != "method"})
        echo.update({f"notch.{key}": f"{value:g}" for key, value in self.notch.model_dump().items()})
        echo.update({f"evaluation.{key}": str(value) for key, value in self.evaluation.model_dump().items()})
        return echo


def read_sections(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """INI file -> {section: {key: value}}"""
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        if not parser.read(path):
            raise ConfigurationError(f"config file not found: {path}")
    except configparser.Error as e:
        raise ConfigurationError(f"cannot parse {path}: {e}") from e
    unknown = [name for name in parser.sections() if name not in PLAN_SECTIONS]
    if unknown:
        raise ConfigurationError(f"{path}: unknown sections {unknown}; expected {PLAN_SECTIONS}")
    return {name: dict(parser[name]) for name in parser.sections()}


def plan_from_sections(sections: Mapping[str, Mapping[str, str]]) -> ExperimentPlan:
    """Assemble a plan from INI sections; every failure surfaces as ConfigurationError"""
    values: Dict[str, object] = dict(sections.get("plan", {}))
    values["ecg"] = AfEcgConfig.from_mapping(sections.get("ecg", {}))
    values["pli"] = PliConfig.from_mapping(sections.get("pli", {}))
    values["denoiser"] = DenoiserSpec.from_mapping(sections.get("denoiser", {}))
    try:
        values["notch"] = NotchSettings(**sections.get("notch", {}))
        values["evaluation"] = EvaluationSettings(**sections.get("evaluation", {}))
        sweep = dict(sections.get("sweep", {}))
        if "parameter" in sweep:
            values["sweep_parameter"] = sweep.pop("parameter")
        if "values" in sweep:
            values["sweep_values"] = sweep.pop("values")
        if "heart_rate_draw" in sweep:
            values["heart_rate_draw"] = sweep.pop("heart_rate_draw")
        if sweep:
            raise ConfigurationError(f"unknown [sweep] keys {sorted(sweep)}")
        return ExperimentPlan(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid experiment plan: {e}") from e


def load_plan(path: Union[str, Path], seed: Optional[int] = None) -> ExperimentPlan:
    """Read a plan file; a seed given here overrides the file's"""
    plan = plan_from_sections(read_sections(path)).with_seed(seed)
    logger.info(f"Loaded plan {plan.name} from {path}")
    return plan
