"""
Results Tables
Per-trial result rows, per-cell aggregates and CSV / JSON / long exports
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np
import pandas as pd

from core.errors import DataError

logger = logging.getLogger(__name__)

RESULTS_SCHEMA_VERSION = 1
CELL_COLUMNS = ("record", "sweep_parameter", "sweep_value", "method", "scenario", "snr_in_db")
TRIAL_COLUMNS = ("trial", "seed", "heart_rate_bpm")
METRIC_COLUMNS = ("snr_out_db", "asci_global_pct", "asci_tq_pct", "asci_qrst_pct", "beat_count")
RESULT_COLUMNS = CELL_COLUMNS + TRIAL_COLUMNS + METRIC_COLUMNS + ("error",)
EXPORT_FORMATS = ("csv", "json", "long")
FLOAT_FORMAT = "%.12g"


def _comment_block(echo: Mapping[str, str]) -> str:
    lines = [f"# schema_version = {RESULTS_SCHEMA_VERSION}\n"]
    lines.extend(f"# {key} = {value}\n" for key, value in echo.items() if key != "schema_version")
    return "".join(lines)


@dataclass
class ResultsTable:
    """One row per (record, sweep value, method, scenario, snr, trial)"""

    rows: pd.DataFrame
    echo: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[str, object]], echo: Mapping[str, str] = None) -> "ResultsTable":
        frame = pd.DataFrame(list(rows), columns=list(RESULT_COLUMNS))
        return cls(frame, dict(echo or {}))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def failures(self) -> pd.DataFrame:
        errors = self.rows["error"]
        return self.rows[errors.notna() & (errors.astype(str) != "")]

    def summary(self) -> pd.DataFrame:
        """Mean and sample std (ddof=1) of every metric per cell, plus trial / error counts"""
        columns = [f"{metric}_{stat}" for metric in METRIC_COLUMNS for stat in ("mean", "std")]
        if self.rows.empty:
            return pd.DataFrame(columns=list(CELL_COLUMNS) + columns + ["trials", "errors"])

        frame = self.rows.copy()
        frame["failed"] = frame["error"].notna() & (frame["error"].astype(str) != "")
        grouped = frame.groupby(list(CELL_COLUMNS), dropna=False, sort=False)
        stats = grouped[list(METRIC_COLUMNS)].agg(["mean", "std"])
        stats.columns = [f"{metric}_{stat}" for metric, stat in stats.columns]
        stats["trials"] = grouped.size()
        stats["errors"] = grouped["failed"].sum().astype(int)
        return stats.reset_index()[list(CELL_COLUMNS) + columns + ["trials", "errors"]]

    def long(self) -> pd.DataFrame:
        """One metric value per row, for plotting"""
        return self.rows.melt(
            id_vars=list(CELL_COLUMNS + TRIAL_COLUMNS),
            value_vars=list(METRIC_COLUMNS),
            var_name="metric",
            value_name="value",
        )


def _write_csv(frame: pd.DataFrame, path: Path, echo: Mapping[str, str]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            handle.write(_comment_block(echo))
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise DataError(f"cannot write results to {path}: {e}") from e
    return path


def _json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


def _records(frame: pd.DataFrame) -> List[Dict[str, object]]:
    return [
        {column: _json_value(value) for column, value in row.items()}
        for row in frame.to_dict(orient="records")
    ]


def export_results(
    table: ResultsTable, path: Union[str, Path], format: str = "csv"
) -> Path:
    """
    Write a results table

    Args:
        table: Rows to export
        path: Destination file
        format: csv (wide rows), json (same rows plus echo) or long (one metric per row)
    """
    path = Path(path)
    if format not in EXPORT_FORMATS:
        raise DataError(f"unknown export format {format!r}; expected one of {EXPORT_FORMATS}")
    if format == "csv":
        written = _write_csv(table.rows, path, table.echo)
    elif format == "long":
        written = _write_csv(table.long(), path, table.echo)
    else:
        document = {
            "schema_version": RESULTS_SCHEMA_VERSION,
            "columns": list(RESULT_COLUMNS),
            "echo": table.echo,
            "rows": _records(table.rows),
        }
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(document, indent=2) + "\n")
        except OSError as e:
            raise DataError(f"cannot write results to {path}: {e}") from e
        written = path
    logger.info(f"Results written to {written} ({len(table)} rows, {format})")
    return written


def export_summary(table: ResultsTable, path: Union[str, Path]) -> Path:
    return _write_csv(table.summary(), Path(path), table.echo)


def _read_echo(path: Path) -> Tuple[Dict[str, str], int]:
    echo: Dict[str, str] = {}
    skipped = 0
    with path.open() as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            skipped += 1
            text = line[1:].rstrip("\n")
            key, _, value = text[1:].partition(" = ") if text.startswith(" ") else text.partition(" = ")
            echo[key] = value
    echo.pop("schema_version", None)
    return echo, skipped


def read_results(path: Union[str, Path]) -> ResultsTable:
    """Parse a wide CSV written by export_results"""
    path = Path(path)
    try:
        echo, skipped = _read_echo(path)
        frame = pd.read_csv(path, skiprows=skipped)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot read results {path}: {e}") from e
    missing = [column for column in RESULT_COLUMNS if column not in frame.columns]
    if missing:
        raise DataError(f"{path} lacks result columns {missing}")
    return ResultsTable(frame[list(RESULT_COLUMNS)], echo)
