"""
Dataset Ingestion
Externally exported CSV records (plus optional .ann sidecars), resampled to
the analysis rate
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

from core.errors import DataError, PliToolkitError
from core.io import read_signal
from core.signal import Signal, resample
from monitoring.logging_config import log_error

logger = logging.getLogger(__name__)

DENOISED_SUFFIX = ".denoised"


@dataclass(frozen=True)
class IngestedRecord:
    name: str
    signal: Signal

    @property
    def has_annotations(self) -> bool:
        return bool(self.signal.annotations.size)


def ingest_directory(
    path: Union[str, Path], sample_rate_hz: float, resample_to: float = 1000.0
) -> List[IngestedRecord]:
    """
    Load every CSV record of a directory

    Malformed files are logged and skipped. Annotations from the sidecar
    are mapped to the new rate (index * new / old, rounded).

    Raises:
        DataError: the directory does not exist
    """
    directory = Path(path)
    if not directory.is_dir():
        raise DataError(f"record directory not found: {directory}")

    files = sorted(
        candidate for candidate in directory.glob("*.csv")
        if not candidate.stem.endswith(DENOISED_SUFFIX)
    )
    if not files:
        logger.warning(f"No CSV records in {directory}")
        return []

    records = []
    for file in files:
        try:
            signal = resample(read_signal(file, sample_rate_hz), resample_to)
        except PliToolkitError as e:
            log_error(logger, e, {"file": str(file)})
            continue
        records.append(IngestedRecord(file.stem, signal))
    logger.info(f"Ingested {len(records)} of {len(files)} records from {directory}")
    return records
