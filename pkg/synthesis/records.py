"""
Generated Records
Synthetic AF ECG records, clean/noisy pairs at a target SNR and CSV export
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from core.io import annotation_sidecar, write_annotations, write_columns
from core.signal import Signal, SnrDb, mix_at_snr
from monitoring.tracing import trace_function
from synthesis.atrial import fwave_fundamental, synth_fwaves
from synthesis.config import AfEcgConfig, PliConfig, PliScenario
from synthesis.pli import realize_pli
from synthesis.ventricular import synth_ventricular

logger = logging.getLogger(__name__)

COMPONENT_NAMES = ("ventricular", "atrial", "noise")


@dataclass(frozen=True)
class GeneratedRecord:
    """
    Composite record with its additive component tracks

    Attributes:
        composite: Sum of the components, annotated with the R-peaks
        components: ventricular, atrial and noise tracks (mV)
        r_peaks: Ground-truth R-peak sample indices
        config_echo: Flat key/value description of the generating configs
    """

    composite: Signal
    components: Mapping[str, np.ndarray]
    r_peaks: np.ndarray
    config_echo: Mapping[str, str] = field(default_factory=dict)

    @property
    def sample_rate_hz(self) -> float:
        return self.composite.sample_rate_hz

    def __len__(self) -> int:
        return len(self.composite)

    def component(self, name: str) -> Signal:
        return Signal(self.components[name], self.sample_rate_hz)


def _echo(prefix: str, mapping: Mapping[str, str]) -> Dict[str, str]:
    return {f"{prefix}.{key}": value for key, value in mapping.items()}


@trace_function
def synth_af_ecg(config: AfEcgConfig) -> GeneratedRecord:
    """Ventricular + atrial activity; the noise component is zero"""
    ventricular, r_peaks = synth_ventricular(config)
    atrial = synth_fwaves(config)
    noise = np.zeros(len(ventricular))
    composite = Signal(ventricular.samples + atrial.samples + noise, config.sample_rate_hz, r_peaks)

    echo = _echo("ecg", config.to_mapping())
    echo["ecg.fwave_fundamental_effective_hz"] = f"{fwave_fundamental(config):.6g}"
    return GeneratedRecord(
        composite=composite,
        components={"ventricular": ventricular.samples, "atrial": atrial.samples, "noise": noise},
        r_peaks=r_peaks,
        config_echo=echo,
    )


def synth_noise_free_pair(
    af_config: AfEcgConfig,
    pli_config: PliConfig,
    snr_in: Union[SnrDb, float, str],
    clean: Optional[GeneratedRecord] = None,
) -> Tuple[GeneratedRecord, GeneratedRecord]:
    """
    Clean record and its PLI-contaminated copy at snr_in

    The amplitude-varying scenario calibrates the SNR after its onset only.

    Args:
        af_config: ECG generator configuration
        pli_config: Interference configuration
        snr_in: Target input SNR in dB ("inf" for no interference)
        clean: Previously generated clean record for af_config, reused when given

    Returns:
        (clean, noisy), aligned sample for sample
    """
    clean = clean or synth_af_ecg(af_config)
    realization = realize_pli(pli_config, af_config.duration_s, af_config.sample_rate_hz)
    calibration = None
    if pli_config.scenario is PliScenario.AMP_VARYING:
        calibration = slice(realization.onset_sample, None)

    noisy_signal, scaled_noise = mix_at_snr(clean.composite, realization.signal, snr_in, calibration)
    echo = dict(clean.config_echo)
    echo.update(_echo("pli", pli_config.to_mapping()))
    echo["snr_in_db"] = str(SnrDb.coerce(snr_in))
    noisy = GeneratedRecord(
        composite=noisy_signal,
        components={
            "ventricular": clean.components["ventricular"],
            "atrial": clean.components["atrial"],
            "noise": scaled_noise.samples,
        },
        r_peaks=clean.r_peaks,
        config_echo=echo,
    )
    return clean, noisy


def write_record(record: GeneratedRecord, path: Union[str, Path]) -> Tuple[Path, Path]:
    """Multi-column CSV (time, composite, components) plus an R-peak sidecar"""
    columns = {"composite": record.composite.samples}
    columns.update({name: record.components[name] for name in COMPONENT_NAMES})
    written = write_columns(path, columns, record.sample_rate_hz, record.config_echo)
    sidecar = write_annotations(annotation_sidecar(written), record.r_peaks)
    logger.info(f"Record written to {written} ({len(record)} samples, {record.r_peaks.size} R-peaks)")
    return written, sidecar
