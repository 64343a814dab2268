"""
Report writers. Numbers go through ``format_sig`` so identical runs give identical files.
"""

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from hapq.utils.helpers import format_sig

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if isinstance(value, (int, float)):
        return format_sig(value)
    return str(value)


def prepare_directory(path: str | Path) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a CSV report.

    Args:
        path: Output file
        header: Column names
        rows: Row values; numbers are written with six significant digits

    Returns:
        The written path
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.debug("Wrote %s", path)
    return path


def write_json(path: str | Path, payload: dict[str, Any] | str) -> Path:
    """Write a JSON document (full precision, sorted keys). A string payload is written as-is."""
    path = Path(path)
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    logger.debug("Wrote %s", path)
    return path


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    logger.debug("Wrote %s", path)
    return path
