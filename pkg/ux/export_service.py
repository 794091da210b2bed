"""
Machine-readable output: JSON for single records, CSV for sweeps.

JSON floats use Python's shortest round-trip repr (up to 17 significant digits),
so a solution printed by `solve` reads back bit-for-bit in `verify`.
"""

import csv
import io
import json
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from schemas.run_record import SWEEP_COLUMNS, SweepRow
from utils.errors import ExportError
from utils.flow_logger import function_logger


class ExportService:
    """Serialize command results."""

    @staticmethod
    def export_json(record: BaseModel, pretty: bool = False) -> str:
        """One JSON object, keys in model field order, λ as "lambda"."""
        data = record.model_dump(mode="json", by_alias=True)
        if pretty:
            return json.dumps(data, indent=2)
        return json.dumps(data)

    @staticmethod
    def export_csv(rows: Iterable[SweepRow], columns: Sequence[str] = SWEEP_COLUMNS) -> str:
        """Header plus one line per row, in the given order."""
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            data = row.model_dump(by_alias=True)
            writer.writerow({key: _csv_value(data[key]) for key in columns})
        return buffer.getvalue()

    @staticmethod
    @function_logger("Write sweep CSV")
    def write_csv(rows: Iterable[SweepRow], path: Union[str, Path]) -> Path:
        """
        Write the sweep table after checking it reads back.

        Raises:
            ExportError: the text does not parse as the fixed sweep layout
        """
        text = ExportService.export_csv(rows)
        is_valid, error = ExportService.validate_export(text)
        if not is_valid:
            raise ExportError(error)
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    @staticmethod
    def validate_export(data: str, columns: Sequence[str] = SWEEP_COLUMNS) -> Tuple[bool, Optional[str]]:
        """
        Check exported CSV parses back with the expected header and row width.

        Returns: (is_valid, error_message)
        """
        lines: List[List[str]] = list(csv.reader(io.StringIO(data)))
        if not lines:
            return False, "CSV output has no header"
        if lines[0] != list(columns):
            return False, f"Unexpected CSV header: {lines[0]}"
        bad = [k for k, line in enumerate(lines[1:], 1) if len(line) != len(columns)]
        if bad:
            return False, f"CSV rows with wrong column count: {bad}"
        return True, None


def _csv_value(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return value
