"""Exception hierarchy for ptspectra.

Two families matter to callers:

- :class:`InvalidInputError` for anything the caller got wrong (bad shapes,
  out-of-range parameters, malformed grids). The CLI maps it to exit code 1.
- :class:`NumericalError` for numerical trouble found at run time. Each one
  carries the coupling ``eps`` and the truncation it happened at, so a scan
  that fails at one grid point can say which point. The CLI maps it to
  exit code 2.
"""

from __future__ import annotations

from typing import Any, Optional


class PTSpectraError(Exception):
    """Base class for every error raised by ptspectra."""


class InvalidInputError(PTSpectraError, ValueError):
    """Caller-supplied input violates a precondition."""


class BracketError(InvalidInputError):
    """Threshold bracket ends do not straddle a reality change."""


class SeriesError(InvalidInputError):
    """A perturbation series cannot be built or analysed for these inputs."""


class NumericalError(PTSpectraError):
    """Numerical failure with the ``(eps, truncation)`` it occurred at."""

    def __init__(
        self,
        message: str,
        *,
        eps: Optional[float] = None,
        truncation: Any = None,
    ) -> None:
        super().__init__(message)
        self.eps = eps
        self.truncation = truncation

    def context(self) -> str:
        """``eps=.. trunc=..`` suffix used in CLI diagnostics."""
        parts = []
        if self.eps is not None:
            parts.append(f"eps={self.eps!r}")
        if self.truncation is not None:
            parts.append(f"trunc={self.truncation}")
        return " ".join(parts)

    def __str__(self) -> str:
        base = super().__str__()
        ctx = self.context()
        return f"{base} ({ctx})" if ctx else base


class ConvergenceError(NumericalError):
    """QR iteration or truncation doubling failed to settle."""


class QuadratureError(NumericalError):
    """Quadrature order cap reached before matrix entries stabilised."""


class MatchingAmbiguityError(NumericalError):
    """Eigenvalue continuation could not assign levels unambiguously."""


class DegenerateLevelError(NumericalError):
    """Perturbation expansion requested around a degenerate level."""
