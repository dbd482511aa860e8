"""Sinks.

Call-record sinks receive :class:`~ptspectra.models.CallRecord` objects from
the logger. Result sinks write what an operation computed: trajectories as
long-format CSV and reports as one JSON document. Both kinds serialise
writes behind a lock.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ptspectra.errors import InvalidInputError
from ptspectra.models import CallRecord, Label, Trajectory, format_label, parse_label


class Sink(ABC):
    """Base class for all call-record sinks."""

    @abstractmethod
    def write(self, record: CallRecord) -> None:
        ...

    @abstractmethod
    def close(self) -> None:
        ...


class MemorySink(Sink):
    """Keep records in a list. Handy for tests and notebooks."""

    def __init__(self) -> None:
        self.records: List[CallRecord] = []
        self._lock = threading.Lock()

    def write(self, record: CallRecord) -> None:
        with self._lock:
            self.records.append(record)

    def names(self) -> List[str]:
        return [r.function_name for r in self.records]

    def close(self) -> None:
        pass


class RunLogSink(Sink):
    """Append call records to a JSON Lines run log, one object per line.

    Args:
        file_path: target ``.jsonl`` file; parent directories are created.
        delegate: optional downstream sink that receives every record too.
    """

    def __init__(
        self,
        file_path: str | Path = "ptspectra-run.jsonl",
        *,
        delegate: Optional[Sink] = None,
    ) -> None:
        self.file_path = str(file_path)
        self.delegate = delegate
        self._lock = threading.Lock()
        parent = os.path.dirname(self.file_path)
        if parent:
            os.makedirs(parent, exist_ok=True)

    def write(self, record: CallRecord) -> None:
        line = json.dumps(record.as_dict(), ensure_ascii=False, default=str, sort_keys=True)
        with self._lock:
            with open(self.file_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        if self.delegate:
            self.delegate.write(record)

    def close(self) -> None:
        if self.delegate:
            self.delegate.close()


# ---------------------------------------------------------------------------
# Result sinks
# ---------------------------------------------------------------------------

PathLike = Union[str, Path]


def header_lines(header: Mapping[str, Any]) -> List[str]:
    """``key=value`` lines of a resolved configuration, keys sorted."""
    return [f"{key}={_header_value(header[key])}" for key in sorted(header)]


def _header_value(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


class ResultSink(ABC):
    """Writes one result document to *path* (``"-"`` is stdout)."""

    def __init__(self, path: PathLike = "-", header: Optional[Mapping[str, Any]] = None) -> None:
        self.path = str(path)
        self.header = dict(header or {})
        self._lock = threading.Lock()

    @abstractmethod
    def render(self, payload: Any) -> str:
        ...

    def write(self, payload: Any) -> None:
        text = self.render(payload)
        with self._lock:
            if self.path == "-":
                sys.stdout.write(text)
                sys.stdout.flush()
                return
            parent = os.path.dirname(self.path)
            try:
                if parent:
                    os.makedirs(parent, exist_ok=True)
                with open(self.path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise InvalidInputError(f"cannot write {self.path}: {exc.strerror or exc}") from exc

    def close(self) -> None:
        pass


@dataclass(frozen=True)
class TrajectoryRow:
    label: Label
    eps: float
    re_lambda: float
    im_lambda: float
    residual: float
    real_flag: bool
    trunc: Tuple[int, ...]

    def cells(self) -> List[str]:
        return [
            format_label(self.label),
            repr(float(self.eps)),
            repr(float(self.re_lambda)),
            repr(float(self.im_lambda)),
            repr(float(self.residual)),
            "true" if self.real_flag else "false",
            "x".join(str(n) for n in self.trunc),
        ]


def trajectory_rows(trajectories: Iterable[Trajectory]) -> List[TrajectoryRow]:
    rows = [
        TrajectoryRow(
            label=tuple(t.label),
            eps=p.eps,
            re_lambda=complex(p.value).real,
            im_lambda=complex(p.value).imag,
            residual=p.residual,
            real_flag=p.real_flag,
            trunc=tuple(t.truncation),
        )
        for t in trajectories
        for p in t.points
    ]
    rows.sort(key=lambda r: (r.label, r.eps))
    return rows


class TrajectoryCSVSink(ResultSink):
    """Long-format trajectory CSV: ``#`` header lines, a column line, one row
    per (trajectory, coupling), sorted by label then coupling."""

    COLUMNS = ("label", "eps", "re_lambda", "im_lambda", "residual", "real_flag", "trunc")

    def render(self, payload: Union[Sequence[Trajectory], Sequence[TrajectoryRow]]) -> str:
        items = list(payload)
        rows = items if items and isinstance(items[0], TrajectoryRow) else trajectory_rows(items)
        return render_trajectory_csv(header_lines(self.header), rows)


def render_trajectory_csv(comments: Sequence[str], rows: Sequence[TrajectoryRow]) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TrajectoryCSVSink.COLUMNS)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def read_trajectory_csv(source: Union[PathLike, io.TextIOBase]) -> Tuple[List[str], List[TrajectoryRow]]:
    """Parse a trajectory CSV back into ``(comment lines, rows)``.

    ``render_trajectory_csv(*read_trajectory_csv(f))`` reproduces the file.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = text.splitlines()
    comments = [line[2:] if line.startswith("# ") else line[1:] for line in lines if line.startswith("#")]
    body = [line for line in lines if not line.startswith("#")]
    reader = csv.reader(body)
    columns = next(reader, None)
    if columns is None or tuple(columns) != TrajectoryCSVSink.COLUMNS:
        raise InvalidInputError(f"not a trajectory CSV: columns {columns!r}")
    rows = []
    for cells in reader:
        if not cells:
            continue
        label, eps, re_l, im_l, residual, flag, trunc = cells
        rows.append(
            TrajectoryRow(
                label=parse_label(label),
                eps=float(eps),
                re_lambda=float(re_l),
                im_lambda=float(im_l),
                residual=float(residual),
                real_flag=flag == "true",
                trunc=tuple(int(n) for n in trunc.split("x")),
            )
        )
    return comments, rows


class JSONReportSink(ResultSink):
    """One UTF-8 JSON document, ``indent=2``, sorted keys, with the resolved
    configuration under ``_header``."""

    def render(self, payload: Mapping[str, Any]) -> str:
        document = {"_header": self.header, **dict(payload)}
        return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False, default=str) + "\n"
