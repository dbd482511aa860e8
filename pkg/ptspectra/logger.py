"""Central logger that dispatches call records to configured sinks."""

from __future__ import annotations

import logging
import sys
from typing import List, Optional

from ptspectra.models import CallRecord
from ptspectra.sinks import Sink

_LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40, "CRITICAL": 50}


def level_value(level: str) -> int:
    from ptspectra.errors import InvalidInputError

    try:
        return _LEVELS[level.upper()]
    except KeyError:
        raise InvalidInputError(
            f"Unknown log level '{level}'. Supported: {', '.join(_LEVELS)}"
        ) from None


class Logger:
    """
    Central logger instance.

    Collects :class:`CallRecord` objects from :func:`~ptspectra.decorators.log_call`
    and sends every record at or above ``level`` to each registered
    :class:`Sink`. It can also forward a one-line rendering to the
    standard-library ``logging`` module so messages reach stderr.
    """

    def __init__(
        self,
        name: str = "ptspectra",
        level: str = "WARNING",
        sinks: Optional[List[Sink]] = None,
        propagate_stdlib: bool = True,
    ) -> None:
        self.name = name
        self.level = level.upper()
        self._threshold = level_value(self.level)
        self._sinks: List[Sink] = list(sinks) if sinks else []
        self._stdlib_logger: Optional[logging.Logger] = None

        if propagate_stdlib:
            self._stdlib_logger = logging.getLogger(name)
            self._stdlib_logger.setLevel(getattr(logging, self.level, logging.WARNING))
            self._stdlib_logger.propagate = False
            if not self._stdlib_logger.handlers:
                handler = logging.StreamHandler(sys.stderr)
                handler.setFormatter(
                    logging.Formatter(
                        "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
                    )
                )
                self._stdlib_logger.addHandler(handler)

    # -- sink management -----------------------------------------------------

    @property
    def sinks(self) -> List[Sink]:
        return list(self._sinks)

    def add_sink(self, sink: Sink) -> "Logger":
        """Register a new sink and return *self* for chaining."""
        self._sinks.append(sink)
        return self

    def remove_sink(self, sink: Sink) -> None:
        self._sinks.remove(sink)

    # -- dispatching ---------------------------------------------------------

    def enabled_for(self, level: str) -> bool:
        return _LEVELS.get(level.upper(), 0) >= self._threshold

    def emit(self, record: CallRecord) -> None:
        """Send a record to all sinks and (optionally) stdlib."""
        if not self.enabled_for(record.level):
            return
        for sink in self._sinks:
            sink.write(record)

        if self._stdlib_logger:
            lvl = getattr(logging, record.level.upper(), logging.DEBUG)
            self._stdlib_logger.log(lvl, self._format_stdlib(record))

    @staticmethod
    def _format_stdlib(record: CallRecord) -> str:
        parts = [f"{record.function_name}()"]
        if record.args:
            parts.append(f"args=({', '.join(record.args)})")
        if record.kwargs:
            parts.append("kwargs={" + ", ".join(f"{k}={v}" for k, v in record.kwargs.items()) + "}")
        if record.return_summary is not None:
            parts.append(f"-> {record.return_summary}")
        if record.exception:
            parts.append(f"EXCEPTION {record.exception_type}: {record.exception}")
        if record.duration_ms is not None:
            parts.append(f"[{record.duration_ms:.2f}ms]")
        return " | ".join(parts)

    def close(self) -> None:
        """Close all sinks."""
        for sink in self._sinks:
            sink.close()


# ---------------------------------------------------------------------------
# Module-level default logger (lazy-initialised)
# ---------------------------------------------------------------------------

_default_logger: Optional[Logger] = None


def get_default_logger() -> Logger:
    global _default_logger
    if _default_logger is None:
        _default_logger = Logger()
    return _default_logger


def set_default_logger(logger: Optional[Logger]) -> None:
    """Replace the module-level default logger used by :func:`log_call`."""
    global _default_logger
    _default_logger = logger


def get_logger() -> logging.Logger:
    """Standard-library logger for free-form warnings (non-resonance, degeneracy)."""
    return logging.getLogger("ptspectra")
