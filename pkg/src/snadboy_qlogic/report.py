"""Report serialization: text summary, CSV checks, joint table and trial records."""

import csv
import io
from pathlib import Path
from typing import List

from .exceptions import OutputError
from .measurement import Ensemble, format_ensemble
from .models import Report
from .utils import format_number

FORMATS = ("text", "csv")
CSV_HEADER = ["check_name", "exact", "empirical", "tolerance", "pass"]
TABLE_HEADER = ["n", "j", "exact", "empirical", "stderr"]


def _csv(rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerows(rows)
    return buffer.getvalue()


def emit_csv(report: Report) -> str:
    """One row per check; ``pass`` holds pass, fail or skipped."""
    rows = [CSV_HEADER]
    for check in report.checks:
        rows.append(
            [
                check.name,
                format_number(check.exact),
                format_number(check.empirical),
                format_number(check.tolerance),
                check.status.value,
            ]
        )
    return _csv(rows)


def emit_text(report: Report) -> str:
    lines = [
        f"scenario: {report.scenario}",
        f"config digest: {report.config_digest}",
        f"seed: {report.seed}",
        f"trials: {report.trials}",
        "",
    ]
    columns = [["check", "exact", "empirical", "tolerance", "status"]]
    for check in report.checks:
        columns.append(
            [
                check.name,
                format_number(check.exact) or "-",
                format_number(check.empirical) or "-",
                format_number(check.tolerance) or "-",
                check.status.value.upper() if check.failed else check.status.value,
            ]
        )
    widths = [max(len(row[i]) for row in columns) for i in range(len(columns[0]))]
    for index, row in enumerate(columns):
        marker = "!" if index and report.checks[index - 1].failed else " "
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append(f"{marker} " + "  ".join(cells))
    if report.notes:
        lines.append("")
        lines.append("notes:")
        lines.extend(f"  - {note}" for note in report.notes)
    lines.append("")
    lines.append(f"verdict: {report.verdict}")
    return "\n".join(lines) + "\n"


def emit(report: Report, format: str = "text") -> str:
    """Serialize a report as ``text`` or ``csv``.

    Raises:
        ValueError: If the format is unknown
    """
    if format == "csv":
        return emit_csv(report)
    if format == "text":
        return emit_text(report)
    raise ValueError(f"Unknown report format '{format}' (known: {', '.join(FORMATS)})")


def emit_table(report: Report) -> str:
    """Joint-distribution cells as CSV: n, j, exact, empirical, stderr."""
    rows = [TABLE_HEADER]
    for cell in report.table:
        rows.append(
            [
                str(cell.n),
                str(cell.j),
                format_number(cell.exact),
                format_number(cell.empirical),
                format_number(cell.stderr),
            ]
        )
    return _csv(rows)


def emit_records(ensemble: Ensemble) -> str:
    """Trial records, headed by the selection that produced them."""
    return f"# selector: {ensemble.selector}\n" + format_ensemble(ensemble)


def write_output(text: str, path: Path) -> None:
    """Write serialized output, creating no directories.

    Raises:
        OutputError: If the file cannot be written
    """
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e.strerror or e}")
