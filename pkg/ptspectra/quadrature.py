"""Gaussian quadrature from Jacobi matrices, and matrix elements of
``|x|^s`` and ``sign(x)|x|^s`` between Hermite functions.

Hermite rules come from the eigenvectors of the symmetric tridiagonal
Jacobi matrix. Matrix elements of non-polynomial powers are integrated on
a half line with a Gauss-Jacobi rule whose weight absorbs ``y^s``, so the
cusp at the origin is integrated exactly and only the smooth Hermite
product is sampled.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.special import gammaln

from ptspectra.decorators import log_call
from ptspectra.errors import InvalidInputError, QuadratureError

ENTRY_TOL = 1e-10
TAIL_MARGIN = 8.0
MIN_ORDER = 64
MAX_ORDER_FLOOR = 1024


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights; ``integrate(f) = sum(w * f(nodes))``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def golub_welsch(diagonal: np.ndarray, off_diagonal: np.ndarray, mu0: float) -> QuadratureRule:
    """Rule from the Jacobi matrix: nodes are its eigenvalues and weights
    ``mu0`` times the squared first eigenvector components."""
    diagonal = np.asarray(diagonal, dtype=float)
    if len(diagonal) == 1:
        return QuadratureRule(nodes=diagonal.copy(), weights=np.array([float(mu0)]))
    nodes, vecs = eigh_tridiagonal(diagonal, np.asarray(off_diagonal, dtype=float))
    return QuadratureRule(nodes=nodes, weights=mu0 * vecs[0, :] ** 2)


@log_call
def gauss_hermite(n: int) -> QuadratureRule:
    """n-point rule for ``integral exp(-x^2) f(x) dx`` over the real line.

    Exact for polynomials of degree <= 2n-1. Nodes are strictly increasing
    and symmetric about 0; weights mirror the nodes.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f"quadrature order must be a positive integer, got {n!r}")
    n = int(n)
    rule = golub_welsch(np.zeros(n), np.sqrt(np.arange(1, n) / 2.0), math.sqrt(math.pi))
    nodes = 0.5 * (rule.nodes - rule.nodes[::-1])
    weights = 0.5 * (rule.weights + rule.weights[::-1])
    if n % 2 == 1:
        nodes[n // 2] = 0.0
    return QuadratureRule(nodes=nodes, weights=weights)


def gauss_jacobi_nodes_weights(n: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Rule for ``integral (1-x)^alpha (1+x)^beta f(x) dx`` on [-1, 1].

    Nodes from the Jacobi matrix eigenvalues, weights as Christoffel numbers
    ``1 / sum_j p_j(x)^2`` over the orthonormal polynomials, which needs
    O(n) memory instead of the full eigenvector matrix.
    """
    if n < 1:
        raise InvalidInputError("quadrature order must be >= 1")
    ab = alpha + beta
    k = np.arange(n, dtype=float)
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (beta ** 2 - alpha ** 2) / ((2 * kk + ab) * (2 * kk + ab + 2.0))
    kk = np.arange(1, n, dtype=float)
    off = np.sqrt(
        4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
        / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1.0) * (2 * kk + ab - 1.0))
    )
    log_mu0 = (
        (ab + 1.0) * math.log(2.0)
        + gammaln(alpha + 1.0) + gammaln(beta + 1.0) - gammaln(ab + 2.0)
    )
    mu0 = math.exp(log_mu0)
    nodes = diag.copy() if n == 1 else eigvalsh_tridiagonal(diag, off)

    p_prev = np.zeros(n)
    p = np.full(n, 1.0 / math.sqrt(mu0))
    total = p * p
    for j in range(n - 1):
        b_prev = off[j - 1] if j > 0 else 0.0
        p_next = ((nodes - diag[j]) * p - b_prev * p_prev) / off[j]
        p_prev, p = p, p_next
        total += p * p
    return nodes, 1.0 / total


def half_line_rule(n: int, s: float, length: float) -> QuadratureRule:
    """Rule for ``integral_0^length y^s f(y) dy``; the weights include ``y^s``."""
    x, w = gauss_jacobi_nodes_weights(n, 0.0, s)
    half = 0.5 * length
    return QuadratureRule(nodes=half * (1.0 + x), weights=half ** (s + 1.0) * w)


def hermite_functions(size: int, y: np.ndarray) -> np.ndarray:
    """Unit-frequency Hermite functions ``psi_0 .. psi_{size-1}`` on *y*.

    Row ``n`` holds ``psi_n(y)``; the three-term recurrence keeps values
    bounded without forming factorials.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((size, len(y)))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * y * y)
    if size > 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for n in range(1, size - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * y * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def default_order(size: int) -> int:
    return max(4 * size, MIN_ORDER)


def max_order(size: int) -> int:
    return max(64 * size, MAX_ORDER_FLOOR)


def _moments_at(size: int, s: float, order: int) -> np.ndarray:
    length = math.sqrt(2.0 * size + 1.0) + TAIL_MARGIN
    rule = half_line_rule(order, s, length)
    psi = hermite_functions(size, rule.nodes)
    return 2.0 * (psi * rule.weights) @ psi.T


@functools.lru_cache(maxsize=128)
def _power_moments(size: int, s: float, order: Optional[int]) -> Tuple[np.ndarray, int]:
    start = order or default_order(size)
    cap = max(max_order(size), start)
    current = _moments_at(size, s, start)
    q = start
    while True:
        if 2 * q > cap:
            raise QuadratureError(
                f"|x|^{s} matrix elements did not stabilise up to quadrature order {cap}",
                truncation=size,
            )
        refined = _moments_at(size, s, 2 * q)
        scale = max(1.0, float(np.max(np.abs(refined))))
        if float(np.max(np.abs(refined - current))) <= ENTRY_TOL * scale:
            refined.setflags(write=False)
            return refined, 2 * q
        current, q = refined, 2 * q


def power_moments(size: int, s: float, order: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """``2 * integral_0^inf y^s psi_m psi_n dy`` for all ``m, n < size``.

    Same-parity entries are the matrix of ``|y|^s``; opposite-parity entries
    are the matrix of ``sign(y)|y|^s``. Returns the read-only matrix and the
    quadrature order that passed the doubling check.

    Raises:
        QuadratureError: entries still move by more than the tolerance when
            the order reaches its cap.
    """
    if size < 1:
        raise InvalidInputError("basis size must be >= 1")
    if not (s > 0 and math.isfinite(s)):
        raise InvalidInputError(f"power must be positive and finite, got {s!r}")
    if order is not None and order < 1:
        raise InvalidInputError("quadrature order must be >= 1")
    return _power_moments(int(size), float(s), None if order is None else int(order))
