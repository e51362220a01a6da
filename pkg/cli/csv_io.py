"""
Result files: CSV with a mandatory header row and 17-significant-digit floats,
plus a JSON run summary.
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ..core.state import CSV_COLUMNS, MetricsRow
from ..exceptions import InputFileError

PathLike = Union[str, Path]

STAGES_COLUMNS: List[str] = ["s", "T_s", "eta_s", "F_avg", "moreau_grad_sq", "weighted_avg"]

COMPARE_COLUMNS: List[str] = [
    "config",
    "variant",
    "compressor",
    "q",
    "final_F",
    "final_grad_norm",
    "max_transform_residual",
    "max_mem_norm",
    "mem_bound",
    "total_sent",
    "identical",
]


def fmt(value: float) -> str:
    """Shortest text that parses back to the same float64."""
    return format(float(value), ".17g")


def _write_rows(path: PathLike, header: Sequence[str], rows: Sequence[Sequence[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_metrics_csv(path: PathLike, rows: Sequence[MetricsRow]) -> Path:
    """Write metrics rows with the fixed column order."""
    return _write_rows(path, CSV_COLUMNS, [row.to_csv_fields() for row in rows])


def read_metrics_csv(path: PathLike) -> List[MetricsRow]:
    """
    Read a metrics file written by ``write_metrics_csv``.

    Raises:
        InputFileError: If the file is missing, has the wrong header or a bad row
    """
    try:
        with Path(path).open(newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != CSV_COLUMNS:
                raise InputFileError(f"'{path}' does not have the metrics header {CSV_COLUMNS}")
            rows = []
            for line_no, fields in enumerate(reader, start=2):
                try:
                    rows.append(MetricsRow.from_csv_fields(fields))
                except ValueError as e:
                    raise InputFileError(f"'{path}' line {line_no}: {e}") from e
    except OSError as e:
        raise InputFileError(f"Cannot read '{path}': {e}") from e
    if not rows:
        raise InputFileError(f"'{path}' has no data rows")
    return rows


def write_vector_csv(path: PathLike, w: np.ndarray) -> Path:
    """One row per coordinate: index, value."""
    return _write_rows(path, ["index", "value"], [[str(i), fmt(v)] for i, v in enumerate(w)])


def write_stages_csv(path: PathLike, reports) -> Path:
    rows = [
        [str(r.s), str(r.T_s), fmt(r.eta_s), fmt(r.F_avg), fmt(r.moreau_grad_sq), fmt(r.weighted_avg)]
        for r in reports
    ]
    return _write_rows(path, STAGES_COLUMNS, rows)


def write_compare_csv(path: PathLike, records: Sequence[Dict[str, Any]]) -> Path:
    rows = []
    for record in records:
        row = []
        for column in COMPARE_COLUMNS:
            value = record[column]
            if isinstance(value, bool):
                row.append("true" if value else "false")
            elif isinstance(value, float):
                row.append(fmt(value))
            else:
                row.append(str(value))
        rows.append(row)
    return _write_rows(path, COMPARE_COLUMNS, rows)


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Deterministic JSON (sorted keys, trailing newline)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise InputFileError(f"Cannot read '{path}': {e}") from e
