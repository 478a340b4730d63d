"""
Wavelet Filter Catalogue
Loads orthogonal filter banks named in wavelets.txt and validates them
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pywt

from core.errors import ConfigurationError

logger = logging.getLogger(__name__)

CATALOGUE_PATH = Path(__file__).with_name("wavelets.txt")
DEFAULT_WAVELET = "db6"
TOLERANCE = 1e-10

ALIASES = {
    "daubechies6": "db6",
    "sixth-order-daubechies": "db6",
}


@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    family: str
    order: int
    taps: int


@dataclass(frozen=True)
class WaveletFilters:
    """Orthogonal analysis/synthesis filter bank"""

    name: str
    decomposition_lowpass: Tuple[float, ...]
    decomposition_highpass: Tuple[float, ...]
    reconstruction_lowpass: Tuple[float, ...]
    reconstruction_highpass: Tuple[float, ...]

    def __post_init__(self):
        lengths = {
            len(self.decomposition_lowpass),
            len(self.decomposition_highpass),
            len(self.reconstruction_lowpass),
            len(self.reconstruction_highpass),
        }
        if len(lengths) != 1:
            raise ConfigurationError(f"{self.name}: filters differ in length {sorted(lengths)}")

        lowpass = np.asarray(self.decomposition_lowpass)
        highpass = np.asarray(self.decomposition_highpass)
        if abs(lowpass.sum() - math.sqrt(2.0)) > TOLERANCE:
            raise ConfigurationError(f"{self.name}: lowpass taps do not sum to sqrt(2)")
        if abs(np.square(lowpass).sum() - 1.0) > TOLERANCE:
            raise ConfigurationError(f"{self.name}: lowpass taps are not unit energy")

        alternating = (-1.0) ** np.arange(lowpass.size)
        mirrored = alternating * lowpass[::-1]
        if not (np.allclose(highpass, mirrored, rtol=0, atol=TOLERANCE)
                or np.allclose(highpass, -mirrored, rtol=0, atol=TOLERANCE)):
            raise ConfigurationError(f"{self.name}: highpass is not the quadrature mirror of the lowpass")
        if not np.allclose(self.reconstruction_lowpass, lowpass[::-1], rtol=0, atol=TOLERANCE):
            raise ConfigurationError(f"{self.name}: reconstruction lowpass is not the time reverse")
        if not np.allclose(self.reconstruction_highpass, highpass[::-1], rtol=0, atol=TOLERANCE):
            raise ConfigurationError(f"{self.name}: reconstruction highpass is not the time reverse")

    @property
    def length(self) -> int:
        return len(self.decomposition_lowpass)

    def to_text(self) -> str:
        """Plain-text tap dump for cross-checking against other tools"""
        lines = [f"# wavelet {self.name} ({self.length} taps)"]
        banks = (
            ("dec_lo", self.decomposition_lowpass),
            ("dec_hi", self.decomposition_highpass),
            ("rec_lo", self.reconstruction_lowpass),
            ("rec_hi", self.reconstruction_highpass),
        )
        for label, taps in banks:
            lines.append(label + " " + " ".join(f"{tap:.17g}" for tap in taps))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=1)
def catalogue() -> Dict[str, CatalogueEntry]:
    """Parse the shipped catalogue file"""
    entries: Dict[str, CatalogueEntry] = {}
    for line in CATALOGUE_PATH.read_text().splitlines():
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        name, family, order, taps = text.split()
        entries[name] = CatalogueEntry(name, family, int(order), int(taps))
    return entries


def reference_taps(name: str = DEFAULT_WAVELET) -> List[float]:
    """Reference reconstruction lowpass recorded in the catalogue comments"""
    taps: List[float] = []
    for line in CATALOGUE_PATH.read_text().splitlines():
        parts = line.lstrip("#").split()
        if len(parts) > 2 and parts[0] == "reference" and parts[1] == name:
            taps.extend(float(value) for value in parts[2:])
    return taps


def available_wavelets() -> List[str]:
    return list(catalogue())


def load_wavelet(name: str = DEFAULT_WAVELET) -> WaveletFilters:
    """
    Load a filter bank from the shipped catalogue

    Args:
        name: Catalogue name (e.g. "db6", "haar", "sym5")

    Returns:
        Validated WaveletFilters
    """
    key = ALIASES.get(name.strip().lower(), name.strip().lower())
    entries = catalogue()
    if key not in entries:
        raise ConfigurationError(
            f"unknown wavelet {name!r}; available: {', '.join(available_wavelets())}"
        )
    dec_lo, dec_hi, rec_lo, rec_hi = pywt.Wavelet(key).filter_bank
    filters = WaveletFilters(
        name=key,
        decomposition_lowpass=tuple(float(tap) for tap in dec_lo),
        decomposition_highpass=tuple(float(tap) for tap in dec_hi),
        reconstruction_lowpass=tuple(float(tap) for tap in rec_lo),
        reconstruction_highpass=tuple(float(tap) for tap in rec_hi),
    )
    if filters.length != entries[key].taps:
        raise ConfigurationError(
            f"{key}: expected {entries[key].taps} taps, PyWavelets returned {filters.length}"
        )
    return filters
