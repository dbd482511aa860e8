"""
Run-log configuration for ptspectra.

`configure()` sets up the logger used by every decorated operation, with
environment overrides so batch jobs can turn on a JSON Lines run log
without touching code:

- ``PT_SPECTRA_LEVEL``     minimum level (DEBUG/INFO/WARNING/ERROR)
- ``PT_SPECTRA_LOG_SINKS`` comma-separated sink specs, e.g.
  ``jsonl:run.jsonl,terminal:color``
"""

from __future__ import annotations

import os
from typing import List, Optional, Sequence, Tuple, Union

from ptspectra.errors import InvalidInputError
from ptspectra.logger import Logger, set_default_logger
from ptspectra.sinks import MemorySink, RunLogSink, Sink

DEFAULT_ENV_PREFIX = "PT_SPECTRA_"

_configured = False
_last_logger: Optional[Logger] = None


def _parse_sink_spec(spec: str) -> Sink:
    """Parse a sink specification like ``jsonl:run.jsonl`` or ``terminal:color``."""
    if ":" not in spec:
        raise InvalidInputError(
            f"Invalid sink spec '{spec}'. Use format 'type:path' "
            f"(e.g. 'jsonl:run.jsonl', 'terminal:ascii')"
        )
    sink_type, path = spec.split(":", 1)
    sink_type = sink_type.strip().lower()
    path = path.strip()

    if sink_type in ("jsonl", "json"):
        if not path:
            raise InvalidInputError(f"Sink spec '{spec}' needs a file path")
        return RunLogSink(file_path=path)
    if sink_type == "terminal":
        from ptspectra.terminal import TerminalSink

        return TerminalSink(format=path if path in ("ascii", "color") else "ascii")
    if sink_type == "memory":
        return MemorySink()
    raise InvalidInputError(
        f"Unknown sink type '{sink_type}'. Supported: jsonl, terminal, memory"
    )


def _read_env_config(env_prefix: str, level: Optional[str]) -> Tuple[str, Optional[str]]:
    """Return ``(level, sink specs)``; the environment fills in a level left as None."""
    if level is None:
        level = os.environ.get(f"{env_prefix}LEVEL") or "WARNING"
    level = level.upper()
    return level, os.environ.get(f"{env_prefix}LOG_SINKS")


def _resolve_sinks(
    sinks: Optional[Sequence[Union[str, Sink]]],
    env_sinks: Optional[str],
) -> List[Sink]:
    resolved: List[Sink] = []
    if sinks is not None:
        for s in sinks:
            resolved.append(_parse_sink_spec(s) if isinstance(s, str) else s)
    elif env_sinks:
        for spec in env_sinks.split(","):
            spec = spec.strip()
            if spec:
                resolved.append(_parse_sink_spec(spec))
    return resolved


def configure(
    *,
    name: str = "ptspectra",
    level: Optional[str] = None,
    sinks: Optional[Sequence[Union[str, Sink]]] = None,
    propagate_stdlib: bool = True,
    env_prefix: str = DEFAULT_ENV_PREFIX,
    force: bool = False,
) -> Logger:
    """
    Configure the run log for the whole process.

    Args:
        level: minimum record level; ``PT_SPECTRA_LEVEL`` when None,
            else WARNING.
        sinks: sink specs (``"jsonl:run.jsonl"``) or :class:`Sink` instances.
            When ``None``, ``PT_SPECTRA_LOG_SINKS`` is consulted.
        propagate_stdlib: also forward records to stdlib ``logging``.
        force: re-configure even if already configured.

    Returns:
        The :class:`Logger` now used by every decorated operation.
    """
    global _configured, _last_logger

    if _configured and not force and _last_logger is not None:
        return _last_logger

    level, env_sinks = _read_env_config(env_prefix, level)
    logger = Logger(
        name=name,
        level=level,
        sinks=_resolve_sinks(sinks, env_sinks),
        propagate_stdlib=propagate_stdlib,
    )
    set_default_logger(logger)
    _configured = True
    _last_logger = logger
    return logger


def reset() -> None:
    """Forget the current configuration (used by tests)."""
    global _configured, _last_logger
    if _last_logger is not None:
        _last_logger.close()
    _configured = False
    _last_logger = None
    set_default_logger(None)
