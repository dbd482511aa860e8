"""Run configuration for the command line.

A :class:`RunConfig` is what one CLI invocation resolved to after merging
the flat ``key=value`` config file, environment and flags. ``validate()``
runs every range check before anything is computed, and
``resolved_header()`` is stamped at the top of every output file.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ptspectra.errors import InvalidInputError
from ptspectra.scan import ScanConfig

COMMANDS = ("scan-h3", "scan-h2", "matrix2x2", "rspe", "converge", "threshold", "certify")
FORMATS = ("csv", "json")

GRID_DECIMALS = 12


def parse_grid(text: str) -> List[float]:
    """Couplings from ``start:stop:step`` or a comma-separated list.

    A range includes ``stop`` when it lies within half a step of the last
    point; values are rounded to 12 decimals so ``0:0.5:0.05`` lands on
    ``0.05, 0.1, ...`` exactly.
    """
    text = str(text).strip()
    if not text:
        raise InvalidInputError("empty eps grid")
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise InvalidInputError(f"grid range must be start:stop:step, got {text!r}")
            start, stop, step = parts
            if not all(math.isfinite(v) for v in parts):
                raise InvalidInputError(f"grid range has non-finite values: {text!r}")
            if step == 0 or (stop - start) * step < 0:
                raise InvalidInputError(f"grid step {step!r} does not lead from {start!r} to {stop!r}")
            count = int(math.floor((stop - start) / step + 0.5))
            values = [round(start + k * step, GRID_DECIMALS) for k in range(count + 1)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse eps grid {text!r}: {exc}") from None
    if not values:
        raise InvalidInputError("empty eps grid")
    return values


def parse_size(text: Union[str, int, Tuple[int, int]]) -> Union[int, Tuple[int, int]]:
    """``"128"`` -> 128, ``"24x32"`` -> (24, 32)."""
    if isinstance(text, (int, tuple)):
        return text
    text = str(text).strip().lower()
    try:
        if "x" in text:
            a, b = text.split("x", 1)
            return (int(a), int(b))
        return int(text)
    except ValueError:
        raise InvalidInputError(f"truncation must be N or AxB, got {text!r}") from None


def parse_sizes(text: str) -> list:
    return [parse_size(part) for part in str(text).split(",") if part.strip()]


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Flat ``key=value`` file; ``#`` comments and blank lines are skipped and
    ``-`` in keys is read as ``_``."""
    values: Dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{path}:{number}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip().lstrip("-").replace("-", "_")
        if not key:
            raise InvalidInputError(f"{path}:{number}: empty key")
        values[key] = value.strip()
    return values


def _positive(params: Dict[str, Any], *names: str) -> None:
    for name in names:
        value = params.get(name)
        if value is None:
            continue
        if not (math.isfinite(value) and value > 0):
            raise InvalidInputError(f"{name} must be positive, got {value!r}")


def _finite(params: Dict[str, Any], *names: str) -> None:
    for name in names:
        value = params.get(name)
        if value is not None and not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass
class RunConfig:
    """One resolved CLI invocation.

    ``variant`` picks the model inside a command (``gain``/``detuned`` for
    ``matrix2x2``, ``two-level``/``lambda-pm``/``h2`` for ``rspe``, a model
    name for ``converge``, ``threshold`` and ``certify``). ``params`` holds
    model parameters and command arguments; ``scan`` the continuation knobs.
    """

    command: str
    variant: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: str = "-"
    format: str = "csv"
    threads: int = 0

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise InvalidInputError(f"format must be one of {', '.join(FORMATS)}")
        if self.threads < 0:
            raise InvalidInputError("threads must be >= 0")
        p = self.params
        _positive(p, "omega1", "omega2", "tol")
        _finite(p, "e1", "e2", "e", "b", "eps", "real_end", "complex_end")
        for name in ("r", "s"):
            if name in p and (int(p[name]) != p[name] or p[name] < 1):
                raise InvalidInputError(f"{name} must be a positive integer, got {p[name]!r}")
        if "r" in p and "s" in p and p["r"] % 2 == 0 and p["s"] % 2 == 0:
            raise InvalidInputError("r and s must not both be even")
        if "order" in p and (int(p["order"]) != p["order"] or p["order"] < 1):
            raise InvalidInputError(f"order must be a positive integer, got {p['order']!r}")
        if self.variant == "h3" or self.command == "scan-h3":
            from ptspectra.hamiltonians import validate_h3_eps

            for e in list(self.scan.eps_grid) + [p[k] for k in ("eps", "real_end", "complex_end") if k in p]:
                validate_h3_eps(e)
        self.scan.validate()
        return self

    def resolved_header(self) -> Dict[str, Any]:
        from ptspectra import __version__

        header: Dict[str, Any] = {
            "ptspectra_version": __version__,
            "command": self.command if self.variant is None else f"{self.command} {self.variant}",
            "format": self.format,
        }
        for key, value in self.params.items():
            header[key] = value
        for key, value in asdict(self.scan).items():
            if key == "workers":
                continue
            if key == "eps_grid":
                value = [repr(float(v)) for v in value]
            header[f"scan.{key}"] = "default" if value is None else value
        return header
