"""
File operation utilities for kmsdyn.
Report writers; every failure surfaces as an OutputError.
"""

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

from colorama import Fore

from ..errors import OutputError
from .logging import get_logger

logger = get_logger("kmsdyn_file_ops")


def dumps_json(data: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, UTF-8 symbols kept, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def _write(filename: str | Path, payload: bytes) -> Path:
    path = Path(filename)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        error_msg = f"Error writing to {path}: {str(e)}"
        print(f"{Fore.RED}{error_msg}", file=sys.stderr)
        logger.error(error_msg, exc_info=True)
        raise OutputError(error_msg) from e

    msg = f"Data written to {path}"
    print(f"{Fore.LIGHTGREEN_EX}{msg}", file=sys.stderr)
    logger.info(msg)
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], preamble: Sequence[str] = ()) -> str:
    """CSV with ``# key=value`` comment lines ahead of the header row."""
    buffer = io.StringIO()
    for line in preamble:
        buffer.write(f"# {line}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(value) for value in row])
    return buffer.getvalue()


def _csv_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_bytes(payload: bytes, filename: str | Path) -> Path:
    return _write(filename, payload)
