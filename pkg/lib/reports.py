"""
Reports Library

Every CLI command builds a CommandReport; this module turns it into JSON,
CSV or a rich text table. Renderings are pure functions of the report, so
identical inputs give byte-identical output.

    JSON  schema_version 1, rationals as "p/q" strings, floats as numbers
    CSV   comma separated, header row, LF endings, floats to 17 digits
    text  rich Table on a fixed-width console without color
"""

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from loguru import logger
from rich.console import Console
from rich.table import Table

SCHEMA_VERSION = 1
OUTPUT_FORMATS = ("json", "csv", "text")
TEXT_WIDTH = 120


@dataclass
class CommandReport:
    command: str
    payload: Dict[str, Any]
    columns: List[str] = field(default_factory=list)
    rows: List[List[Any]] = field(default_factory=list)
    title: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"schema_version": SCHEMA_VERSION, "command": self.command, **self.payload}


# =============================================================================
# SCALAR FORMATTING
# =============================================================================

def to_jsonable(value: Any) -> Any:
    """Recursively map library values onto JSON types."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def format_cell(value: Any) -> str:
    """One table/CSV cell: rationals as p/q, floats with 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple)):
        return " ".join(format_cell(v) for v in value)
    return str(value)


def _summary_rows(payload: Dict[str, Any]) -> List[List[str]]:
    """Top-level scalars and flat lists; nested structures only appear in JSON."""
    return [[key, format_cell(value)] for key, value in payload.items() if _is_flat(value)]


def _is_flat(value: Any) -> bool:
    if isinstance(value, dict):
        return False
    if isinstance(value, (list, tuple)):
        return all(not isinstance(v, (dict, list, tuple)) for v in value)
    return True


# =============================================================================
# RENDERERS
# =============================================================================

def render_json(report: CommandReport) -> str:
    return json.dumps(to_jsonable(report.to_dict()), indent=2, ensure_ascii=False) + "\n"


def render_csv(report: CommandReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if report.columns:
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([format_cell(v) for v in row])
    else:
        writer.writerow(["field", "value"])
        writer.writerows(_summary_rows(report.payload))
    return buffer.getvalue()


def render_text(report: CommandReport) -> str:
    buffer = io.StringIO()
    console = Console(file=buffer, width=TEXT_WIDTH, color_system=None, highlight=False, force_terminal=False)

    summary = Table(title=report.title or report.command, show_header=True)
    summary.add_column("Field", style="bold")
    summary.add_column("Value", justify="right")
    for key, value in _summary_rows(report.payload):
        summary.add_row(key, value)
    console.print(summary)

    if report.columns:
        table = Table(show_header=True)
        for name in report.columns:
            table.add_column(name, justify="right")
        for row in report.rows:
            table.add_row(*[format_cell(v) for v in row])
        console.print(table)
    return buffer.getvalue()


RENDERERS = {
    "json": render_json,
    "csv": render_csv,
    "text": render_text,
}


def render(report: CommandReport, output_format: str) -> str:
    if output_format not in RENDERERS:
        raise ValueError(f"unknown output format '{output_format}'")
    return RENDERERS[output_format](report)


def write_report(report: CommandReport, output_format: str, out: Optional[Path] = None, stream=None):
    """Write the rendering to `out` if given, else to stdout."""
    text = render(report, output_format)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8", newline="\n")
        logger.info(f"[CLI] Report written to {out}")
        return
    (stream or sys.stdout).write(text)
