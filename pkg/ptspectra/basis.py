"""Matrix elements in the eigenbasis of ``p^2 + w^2 x^2``.

Conventions: basis energies are ``(2n+1) w`` and the position operator has
``<n|x|n+1> = sqrt((n+1) / (2w))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ptspectra.decorators import log_call
from ptspectra.errors import InvalidInputError
from ptspectra.quadrature import power_moments


@dataclass(frozen=True)
class BasisSpec:
    """Oscillator frequency and truncation size."""

    frequency: float = 1.0
    size: int = 1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise InvalidInputError(f"basis frequency must be positive, got {self.frequency!r}")
        if int(self.size) != self.size or self.size < 1:
            raise InvalidInputError(f"basis size must be a positive integer, got {self.size!r}")

    def padded(self, extra: int) -> "BasisSpec":
        return BasisSpec(self.frequency, self.size + extra)


def oscillator_energies(b: BasisSpec) -> np.ndarray:
    return (2.0 * np.arange(b.size) + 1.0) * b.frequency


def parity_signs(size: int) -> np.ndarray:
    """Diagonal of the parity operator ``x -> -x``: ``(-1)^n``."""
    return np.where(np.arange(size) % 2 == 0, 1.0, -1.0)


def position_matrix(b: BasisSpec) -> np.ndarray:
    off = np.sqrt(np.arange(1, b.size) / (2.0 * b.frequency))
    return np.diagflat(off, 1) + np.diagflat(off, -1)


def _parity_mask(size: int, odd: bool) -> np.ndarray:
    n = np.arange(size)
    return ((n[:, None] + n[None, :]) % 2 == 1) == odd


@log_call
def monomial_matrix(b: BasisSpec, r: int) -> np.ndarray:
    """Exact projection of ``x^r`` onto the first ``b.size`` basis states.

    Built as a power of the position matrix on a basis padded by *r* states,
    so truncation never leaks into the kept block. Entries with
    ``|m-n| > r`` or ``m-n-r`` odd are exactly zero.
    """
    if int(r) != r or r < 0:
        raise InvalidInputError(f"monomial degree must be a non-negative integer, got {r!r}")
    r = int(r)
    if r == 0:
        return np.eye(b.size)
    X = position_matrix(b.padded(r))
    P = np.linalg.matrix_power(X, r)[: b.size, : b.size].copy()
    P[_parity_mask(b.size, odd=(r % 2 == 0))] = 0.0
    return P


def _is_integer(s: float) -> bool:
    return float(s).is_integer()


@log_call
def abs_power_matrix(b: BasisSpec, s: float, quad_order: int | None = None) -> np.ndarray:
    """Matrix of ``|x|^s``: real symmetric, zero between states of opposite
    parity. Even integer *s* uses the exact monomial."""
    if _is_integer(s) and int(s) % 2 == 0 and s > 0:
        return monomial_matrix(b, int(s))
    moments, _ = power_moments(b.size, s, quad_order)
    A = np.where(_parity_mask(b.size, odd=False), moments, 0.0)
    return A * b.frequency ** (-0.5 * s)


@log_call
def signed_abs_power_matrix(b: BasisSpec, s: float, quad_order: int | None = None) -> np.ndarray:
    """Matrix of ``sign(x)|x|^s``: real symmetric, zero between states of
    equal parity. Odd integer *s* uses the exact monomial."""
    if _is_integer(s) and int(s) % 2 == 1:
        return monomial_matrix(b, int(s))
    moments, _ = power_moments(b.size, s, quad_order)
    S = np.where(_parity_mask(b.size, odd=True), moments, 0.0)
    return S * b.frequency ** (-0.5 * s)


@log_call
def momentum_squared_matrix(b: BasisSpec) -> np.ndarray:
    """Exact projection of ``p^2``: ``diag((2n+1) w) - w^2 X^2``."""
    return np.diag(oscillator_energies(b)) - b.frequency ** 2 * monomial_matrix(b, 2)
