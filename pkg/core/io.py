"""
Record IO
CSV ingestion (one or more amplitude columns, optional time column and header,
comma or semicolon delimited), annotation sidecars and CSV export with
`#`-prefixed config echo headers
"""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from core.errors import DataError
from core.signal import Signal

logger = logging.getLogger(__name__)

ANNOTATION_SUFFIX = ".ann"
TIME_COLUMN_NAMES = {"time", "t", "time_s", "seconds", "sec"}
PREFERRED_AMPLITUDE_COLUMNS = ("composite", "amplitude", "ecg", "mv")
FLOAT_FORMAT = "%.10g"


def _looks_numeric(values: Sequence[str]) -> bool:
    try:
        [float(value) for value in values]
    except (TypeError, ValueError):
        return False
    return True


def _is_time_axis(column: np.ndarray) -> bool:
    if column.size < 3:
        return False
    steps = np.diff(column)
    if np.any(steps <= 0):
        return False
    return bool(np.allclose(steps, steps[0], rtol=1e-3, atol=1e-9))


def _sniff_delimiter(path: Path) -> str:
    try:
        with path.open() as handle:
            for line in handle:
                text = line.strip()
                if text and not text.startswith("#"):
                    return ";" if ";" in text else ","
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e
    raise DataError(f"{path} holds no samples")


def read_csv_columns(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """
    Read amplitude columns from a CSV file

    Args:
        path: CSV file; `#` lines are comments

    Returns:
        Ordered mapping column name -> float samples (time column removed)
    """
    path = Path(path)
    try:
        frame = pd.read_csv(
            path, sep=_sniff_delimiter(path), header=None, comment="#", dtype=str,
            skipinitialspace=True,
        )
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e

    if frame.empty:
        raise DataError(f"{path} holds no samples")

    first_row = [str(value).strip() for value in frame.iloc[0].tolist()]
    if _looks_numeric(first_row):
        names = [f"column{index}" for index in range(frame.shape[1])]
        body = frame
    else:
        names = [name.lower() for name in first_row]
        body = frame.iloc[1:]

    try:
        values = body.apply(pd.to_numeric, errors="raise").to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise DataError(f"non-numeric sample in {path}: {e}") from e
    if values.shape[0] == 0:
        raise DataError(f"{path} holds no samples")
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path} contains missing or non-finite samples")

    columns = dict(zip(names, values.T))
    if len(columns) > 1:
        first_name = names[0]
        if first_name in TIME_COLUMN_NAMES or (
            first_name.startswith("column") and _is_time_axis(columns[first_name])
        ):
            columns.pop(first_name)
    if not columns:
        raise DataError(f"{path} has no amplitude column")
    for preferred in PREFERRED_AMPLITUDE_COLUMNS:
        if preferred in columns:
            return {preferred: columns[preferred]}
    return columns


def read_annotations(path: Union[str, Path]) -> np.ndarray:
    """One integer sample index per line; blank and `#` lines ignored"""
    path = Path(path)
    indices: List[int] = []
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise DataError(f"cannot read annotations {path}: {e}") from e
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            indices.append(int(text))
        except ValueError as e:
            raise DataError(f"{path}:{number}: not an integer sample index: {text!r}") from e
    return np.unique(np.asarray(indices, dtype=np.int64))


def annotation_sidecar(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_suffix(ANNOTATION_SUFFIX)


def read_signal(
    path: Union[str, Path], sample_rate_hz: float, annotations: Optional[Union[str, Path]] = None
) -> Signal:
    """Load the first amplitude column of a CSV file as a Signal"""
    columns = read_csv_columns(path)
    samples = next(iter(columns.values()))
    sidecar = Path(annotations) if annotations else annotation_sidecar(path)
    marks = read_annotations(sidecar) if sidecar.exists() else np.zeros(0, dtype=np.int64)
    marks = marks[marks < samples.size]
    return Signal(samples, sample_rate_hz, marks)


def _comment_block(echo: Optional[Mapping[str, object]]) -> str:
    if not echo:
        return ""
    return "".join(f"# {key} = {value}\n" for key, value in echo.items())


def write_columns(
    path: Union[str, Path],
    columns: Mapping[str, np.ndarray],
    sample_rate_hz: Optional[float] = None,
    echo: Optional[Mapping[str, object]] = None,
) -> Path:
    """
    Write sample columns to CSV, optionally prefixed with a time column

    Args:
        path: Destination CSV
        columns: Ordered name -> samples mapping, equal lengths
        sample_rate_hz: When given, a leading `time` column in seconds is added
        echo: Config echo written as `# key = value` header lines
    """
    path = Path(path)
    frame = pd.DataFrame({name: np.asarray(values, dtype=float) for name, values in columns.items()})
    if sample_rate_hz is not None:
        frame.insert(0, "time", np.arange(len(frame)) / sample_rate_hz)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            handle.write(_comment_block(echo))
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e
    return path


def write_annotations(
    path: Union[str, Path], annotations: Sequence[int], echo: Optional[Mapping[str, object]] = None
) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        body = "".join(f"{int(index)}\n" for index in annotations)
        path.write_text(_comment_block(echo) + body)
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e
    return path


def write_signal(
    path: Union[str, Path],
    signal: Signal,
    column: str = "amplitude",
    echo: Optional[Mapping[str, object]] = None,
) -> Tuple[Path, Optional[Path]]:
    """Write a single-column record plus its annotation sidecar when annotated"""
    written = write_columns(path, {column: signal.samples}, signal.sample_rate_hz, echo)
    sidecar = None
    if signal.annotations.size:
        sidecar = write_annotations(annotation_sidecar(written), signal.annotations)
    return written, sidecar
