"""Data models: call records for the run log and the result records every
module hands back (spectra, truncated Hamiltonians, trajectories, reports)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

DEFAULT_MAX_REPR_LENGTH = 256

Label = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Value summaries for call records
# ---------------------------------------------------------------------------

def _truncate_text(text: str, max_length: Optional[int]) -> str:
    if max_length is None or max_length <= 0 or len(text) <= max_length:
        return text
    omitted = len(text) - max_length
    return f"{text[:max_length]}... [truncated {omitted} chars]"


def summarize(value: Any, max_length: Optional[int] = DEFAULT_MAX_REPR_LENGTH) -> str:
    """Short text form of *value* for a call record.

    Arrays are never dumped: they become ``ndarray(shape=.., dtype=.., norm=..)``.
    Objects exposing ``summary()`` use it.
    """
    if isinstance(value, np.ndarray):
        norm = float(np.linalg.norm(value)) if value.size and value.dtype.kind in "biufc" else 0.0
        return f"ndarray(shape={value.shape}, dtype={value.dtype}, norm={norm:.6g})"
    summary = getattr(value, "summary", None)
    if callable(summary):
        try:
            return _truncate_text(str(summary()), max_length)
        except Exception:  # pragma: no cover
            pass
    try:
        rendered = repr(value)
    except Exception as exc:  # pragma: no cover
        rendered = f"<repr failed: {type(exc).__name__}: {exc}>"
    return _truncate_text(rendered, max_length)


@dataclass
class CallRecord:
    """One logged call of a decorated operation."""

    timestamp: datetime
    level: str
    function_name: str
    module: str
    args: List[str] = field(default_factory=list)
    kwargs: Dict[str, str] = field(default_factory=dict)
    return_summary: Optional[str] = None
    exception: Optional[str] = None
    exception_type: Optional[str] = None
    traceback: Optional[str] = None
    duration_ms: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def now() -> datetime:
        return datetime.now(timezone.utc)

    def as_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "timestamp": self.timestamp.isoformat(),
            "level": self.level,
            "function_name": self.function_name,
            "module": self.module,
            "args": list(self.args),
            "kwargs": dict(self.kwargs),
            "duration_ms": self.duration_ms,
        }
        if self.return_summary is not None:
            d["return"] = self.return_summary
        if self.exception:
            d["exception"] = self.exception
            d["exception_type"] = self.exception_type or ""
            d["traceback"] = self.traceback or ""
        if self.extra:
            d["extra"] = dict(self.extra)
        return d


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def complex_as_dict(z: complex) -> Dict[str, float]:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _finite_or_text(x: float) -> Any:
    return float(x) if math.isfinite(x) else ("inf" if x > 0 else "-inf")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues sorted by (real part, imaginary part), with optional
    per-eigenvalue residuals aligned index by index."""

    eigenvalues: np.ndarray
    residuals: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.residuals is not None and len(self.residuals) != len(self.eigenvalues):
            from ptspectra.errors import InvalidInputError

            raise InvalidInputError("residuals must align with eigenvalues")

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def summary(self) -> str:
        return f"Spectrum(n={len(self)}, max_residual={self.max_residual():.3g})"

    def max_residual(self) -> float:
        if self.residuals is None or not len(self.residuals):
            return float("nan")
        return float(np.max(self.residuals))

    def as_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"eigenvalues": [complex_as_dict(z) for z in self.eigenvalues]}
        if self.residuals is not None:
            d["residuals"] = [float(r) for r in self.residuals]
        return d


# ---------------------------------------------------------------------------
# Truncated Hamiltonians
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedHamiltonian:
    """A finite matrix representation together with what it was built from.

    ``parity`` holds the diagonal of the parity operator in the same basis,
    ``unperturbed`` the diagonal of the coupling-free Hamiltonian, ``basis``
    the oscillator bases (empty for two-level models) and ``params`` the
    model parameters needed to rebuild the kinetic part.
    """

    matrix: np.ndarray
    parity: np.ndarray
    model: str
    eps: float
    unperturbed: np.ndarray
    basis: Tuple[Any, ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def truncation(self) -> Tuple[int, ...]:
        if self.basis:
            return tuple(b.size for b in self.basis)
        return (self.size,)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def summary(self) -> str:
        return f"TruncatedHamiltonian(model={self.model}, eps={self.eps!r}, trunc={self.truncation})"


# ---------------------------------------------------------------------------
# Continuation results
# ---------------------------------------------------------------------------

def format_label(label: Label) -> str:
    return ",".join(str(n) for n in label)


def parse_label(text: str) -> Label:
    return tuple(int(part) for part in text.split(","))


@dataclass(frozen=True)
class TrajectoryPoint:
    eps: float
    value: complex
    residual: float
    real_flag: bool
    conjugation_defect: float = 0.0


@dataclass
class Trajectory:
    """One level followed through the coupling grid."""

    label: Label
    truncation: Tuple[int, ...]
    points: List[TrajectoryPoint] = field(default_factory=list)

    @property
    def eps(self) -> np.ndarray:
        return np.array([p.eps for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points], dtype=complex)

    @property
    def reality_flags(self) -> List[bool]:
        return [p.real_flag for p in self.points]

    def at(self, eps: float) -> TrajectoryPoint:
        for p in self.points:
            if p.eps == eps:
                return p
        raise KeyError(eps)

    def summary(self) -> str:
        return f"Trajectory(label={format_label(self.label)}, points={len(self.points)})"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "label": format_label(self.label),
            "truncation": list(self.truncation),
            "points": [
                {
                    "eps": p.eps,
                    "value": complex_as_dict(p.value),
                    "residual": p.residual,
                    "real_flag": p.real_flag,
                    "conjugation_defect": p.conjugation_defect,
                }
                for p in self.points
            ],
        }


@dataclass
class ThresholdReport:
    """Location of a reality-breaking threshold for a pair of levels."""

    pair: Tuple[Label, Label]
    eps_star: float
    uncertainty: float
    side: int
    min_gap: float
    max_imag: float
    truncation: Tuple[int, ...]
    gap_history: List[Tuple[float, float]] = field(default_factory=list)

    def summary(self) -> str:
        return f"ThresholdReport(eps_star={self.eps_star:.10g} +/- {self.uncertainty:.2g})"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "pair": [format_label(self.pair[0]), format_label(self.pair[1])],
            "eps_star": self.eps_star,
            "uncertainty": self.uncertainty,
            "side": self.side,
            "evidence": {
                "min_gap_real_side": self.min_gap,
                "max_imag_complex_side": self.max_imag,
                "gap_history": [[e, g] for e, g in self.gap_history],
            },
            "truncation": list(self.truncation),
        }


@dataclass
class RspeSeries:
    """Taylor coefficients of one eigenvalue in powers of the coupling."""

    level: str
    coefficients: np.ndarray
    radius_estimate: Optional[float] = None

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def summary(self) -> str:
        return f"RspeSeries(level={self.level}, order={self.order})"

    def as_dict(self) -> Dict[str, Any]:
        coeffs = np.asarray(self.coefficients)
        if np.iscomplexobj(coeffs) and np.any(coeffs.imag != 0):
            rendered: List[Any] = [complex_as_dict(c) for c in coeffs]
        else:
            rendered = [float(np.real(c)) for c in coeffs]
        return {
            "level": self.level,
            "order": self.order,
            "coefficients": rendered,
            "radius_estimate": None if self.radius_estimate is None else _finite_or_text(self.radius_estimate),
        }


@dataclass
class ConvergenceTable:
    """Eigenvalues of the lowest levels at increasing truncations."""

    eps: float
    sizes: List[Tuple[int, ...]]
    values: Dict[Label, List[complex]]

    def differences(self, label: Label) -> List[float]:
        vals = self.values[label]
        return [abs(b - a) for a, b in zip(vals, vals[1:])]

    def non_monotone(self) -> List[Label]:
        """Labels whose successive differences grow somewhere."""
        flagged = []
        for label in self.values:
            diffs = self.differences(label)
            if any(later > earlier for earlier, later in zip(diffs, diffs[1:])):
                flagged.append(label)
        return flagged

    def as_dict(self) -> Dict[str, Any]:
        return {
            "eps": self.eps,
            "sizes": [list(s) for s in self.sizes],
            "levels": {
                format_label(label): {
                    "values": [complex_as_dict(v) for v in vals],
                    "differences": self.differences(label),
                }
                for label, vals in self.values.items()
            },
            "non_monotone": [format_label(label) for label in self.non_monotone()],
        }


@dataclass
class RealityCertificate:
    """Evidence for (or against) reality of one level at one coupling."""

    label: Label
    eps: float
    value: complex
    reference_value: complex
    truncation: Tuple[int, ...]
    reference_truncation: Tuple[int, ...]
    tolerance: float
    real: bool
    residual: float

    @property
    def im_part(self) -> float:
        return complex(self.value).imag

    @property
    def doubling_shift(self) -> float:
        return abs(self.value - self.reference_value)

    def summary(self) -> str:
        return f"RealityCertificate(label={format_label(self.label)}, eps={self.eps!r}, real={self.real})"

    def as_dict(self) -> Dict[str, Any]:
        return {
            "label": format_label(self.label),
            "eps": self.eps,
            "value": complex_as_dict(self.value),
            "reference_value": complex_as_dict(self.reference_value),
            "truncation": list(self.truncation),
            "reference_truncation": list(self.reference_truncation),
            "tolerance": self.tolerance,
            "im_part": self.im_part,
            "doubling_shift": self.doubling_shift,
            "residual": self.residual,
            "real": self.real,
        }
