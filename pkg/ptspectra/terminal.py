"""Terminal output: a call-record sink for stderr and summary tables for ``--show``.

Tables render through ``rich`` when it is installed and fall back to
aligned plain text otherwise.
"""

from __future__ import annotations

import sys
import threading
from typing import Any, Optional, Sequence, TextIO

from ptspectra.models import CallRecord
from ptspectra.sinks import Sink

try:
    from rich.console import Console
    from rich.table import Table

    HAS_RICH = True
except ImportError:  # pragma: no cover - depends on optional extra
    HAS_RICH = False


class TerminalSink(Sink):
    """One line per call record on stderr, optionally ANSI coloured."""

    LEVEL_COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[41m",
    }
    RESET = "\033[0m"

    def __init__(self, format: str = "ascii", stream: Optional[TextIO] = None) -> None:
        self._format = format
        self._stream = stream or sys.stderr
        self._lock = threading.Lock()

    @property
    def format(self) -> str:
        return self._format

    def render(self, record: CallRecord) -> str:
        ts = record.timestamp.strftime("%H:%M:%S")
        line = f"{ts} | {record.level:7} | {record.function_name}()"
        if record.return_summary is not None:
            line += f" -> {record.return_summary}"
        if record.exception:
            line += f" | {record.exception_type}: {record.exception}"
        if record.duration_ms is not None:
            line += f" [{record.duration_ms:.1f}ms]"
        if self._format == "color":
            color = self.LEVEL_COLORS.get(record.level, "")
            line = f"{color}{line}{self.RESET}"
        return line

    def write(self, record: CallRecord) -> None:
        with self._lock:
            self._stream.write(self.render(record) + "\n")
            self._stream.flush()

    def close(self) -> None:
        pass


def _plain_table(title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(c) for c in columns]] + [[str(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    lines = [title]
    for n, row in enumerate(cells):
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def show_table(
    title: str,
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    stream: Optional[TextIO] = None,
) -> None:
    """Print a summary table to *stream* (stderr by default)."""
    stream = stream or sys.stderr
    if HAS_RICH:
        table = Table(title=title)
        for col in columns:
            table.add_column(str(col))
        for row in rows:
            table.add_row(*(str(v) for v in row))
        Console(file=stream).print(table)
    else:
        stream.write(_plain_table(title, columns, rows) + "\n")


def format_complex(z: complex, digits: int = 10) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}g} {sign} {abs(z.imag):.{digits}g}i"

