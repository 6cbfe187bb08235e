"""
Path: app/repositories/results_repository.py
Description: Persistence of experiment results
Purpose: Writes results.csv, summary.csv, the optional per-user finite-K table and
config.echo.json into the output directory with a fixed column order and float format
"""

import csv
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from app.schemas.experiment import (
    FINITE_K_COLUMNS,
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    FiniteKRow,
    ResultRow,
    SummaryRow,
)
from app.logging_config import get_logger

logger = get_logger(__name__)

SIGNIFICANT_DIGITS = 9


def format_value(value) -> str:
    """Render one CSV cell: floats with 9 significant digits, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


class ResultsRepository:
    """Repository for the files of one experiment run"""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)

    def _write(self, name: str, columns: Sequence[str], records: Iterable) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / name
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for record in records:
                writer.writerow([format_value(getattr(record, column)) for column in columns])
        logger.info(f"wrote {path}")
        return path

    def save_results(self, rows: List[ResultRow]) -> Path:
        ordered = sorted(rows, key=lambda r: (r.sweep_value is not None, r.sweep_value or 0.0, r.seed))
        return self._write("results.csv", RESULT_COLUMNS, ordered)

    def save_summary(self, rows: List[SummaryRow]) -> Path:
        return self._write("summary.csv", SUMMARY_COLUMNS, rows)

    def save_finite_k(self, rows: List[FiniteKRow]) -> Optional[Path]:
        if not rows:
            return None
        return self._write("finite_k.csv", FINITE_K_COLUMNS, rows)

    def save_config(self, config: ExperimentConfig) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / "config.echo.json"
        path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
        logger.info(f"wrote {path}")
        return path

