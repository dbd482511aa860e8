"""Rayleigh-Schrodinger series of eigenvalues of ``H0 + eps W``.

``rspe_matrix`` runs the nondegenerate recursion with intermediate
normalisation on any finite matrix family with diagonal ``H0``. The closed
forms of the coupled-oscillator pair get their own binomial series, and
``radius_estimate`` reads the convergence radius off the decay of the even
coefficients.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ptspectra.decorators import log_call
from ptspectra.errors import DegenerateLevelError, InvalidInputError, SeriesError
from ptspectra.hamiltonians import ModelH2, build_h2
from ptspectra.linalg import as_dense
from ptspectra.logger import get_logger
from ptspectra.models import RspeSeries

log = get_logger()

DEGENERACY_GAP = 1e-12
MIN_NONZERO = 6
MIN_EVEN_POINTS = 3


def _check_order(K: int) -> int:
    if int(K) != K or K < 1:
        raise InvalidInputError(f"series order must be a positive integer, got {K!r}")
    return int(K)


@log_call(level="INFO")
def rspe_matrix(
    h0_diag: Sequence[float],
    w: object,
    level: int,
    K: int,
    *,
    name: Optional[str] = None,
) -> RspeSeries:
    """Coefficients ``c_0..c_K`` of the eigenvalue of ``diag(h0_diag) + eps w``
    that starts at ``h0_diag[level]``.

    Raises:
        DegenerateLevelError: another diagonal entry lies within 1e-12 of the level.
    """
    K = _check_order(K)
    h0 = np.asarray(h0_diag, dtype=float)
    W = as_dense(w, name="w")
    n = len(h0)
    if h0.ndim != 1 or W.shape != (n, n):
        raise InvalidInputError(f"h0 has {n} entries but w is {W.shape}")
    if not np.all(np.isfinite(h0)):
        raise InvalidInputError("h0 has non-finite entries")
    if int(level) != level or not 0 <= level < n:
        raise InvalidInputError(f"level {level!r} outside 0..{n - 1}")
    level = int(level)

    e0 = h0[level]
    gaps = np.abs(h0 - e0)
    gaps[level] = np.inf
    if n > 1 and float(np.min(gaps)) < DEGENERACY_GAP:
        raise DegenerateLevelError(
            f"level {level} at {e0!r} is degenerate (gap {float(np.min(gaps)):.3g})"
        )
    with np.errstate(divide="ignore"):
        resolvent = 1.0 / (e0 - h0)
    resolvent[level] = 0.0

    energies = np.zeros(K + 1, dtype=complex)
    energies[0] = e0
    states = [np.zeros(n, dtype=complex)]
    states[0][level] = 1.0
    for k in range(1, K + 1):
        w_prev = W @ states[k - 1]
        energies[k] = w_prev[level]
        rhs = w_prev.copy()
        for j in range(1, k + 1):
            rhs -= energies[j] * states[k - j]
        states.append(resolvent * rhs)

    series = RspeSeries(level=name or str(level), coefficients=energies)
    return _with_radius(series)


def _with_radius(series: RspeSeries) -> RspeSeries:
    try:
        series.radius_estimate = radius_estimate(series)
    except SeriesError as exc:
        log.debug("no radius estimate for %s: %s", series.level, exc)
    return series


def two_level_perturbation(e1: float, e2: float) -> Tuple[np.ndarray, np.ndarray]:
    """``(H0 diagonal, W)`` for the gain-coupling pair."""
    return np.array([e1, e2], dtype=float), np.array([[0, 1j], [1j, 0]], dtype=complex)


def h2_perturbation(m: ModelH2, N1: int, N2: int) -> Tuple[np.ndarray, np.ndarray]:
    """``(H0 diagonal, W)`` for the truncated oscillator pair, index ``n1 * N2 + n2``."""
    h = build_h2(m, 1.0, N1, N2)
    W = np.asarray(h.matrix) - np.diag(h.unperturbed)
    return np.asarray(h.unperturbed, dtype=float), W


# ---------------------------------------------------------------------------
# Closed-form series
# ---------------------------------------------------------------------------

def _sqrt_one_minus(K: int, scale: float) -> np.ndarray:
    """Coefficients of ``scale * sqrt(1 - (eps/scale)^2)`` up to ``eps^K``."""
    out = np.zeros(K + 1)
    b = 1.0
    out[0] = scale
    for j in range(1, K // 2 + 1):
        b *= (0.5 - (j - 1)) / j
        out[2 * j] = scale * b * (-1.0) ** j / scale ** (2 * j)
    return out


@log_call
def series_lambda_pm(omega1: float, omega2: float, K: int) -> Tuple[RspeSeries, RspeSeries]:
    """Taylor series of ``w1^2 + w2^2 +- sqrt(D^2 - eps^2)`` with ``D = |w1^2 - w2^2|``.

    Raises:
        SeriesError: equal frequencies (``D = 0``).
    """
    K = _check_order(K)
    for value in (omega1, omega2):
        if not (math.isfinite(value) and value > 0):
            raise InvalidInputError(f"frequencies must be positive, got {value!r}")
    D = abs(omega1 ** 2 - omega2 ** 2)
    if D == 0.0:
        raise SeriesError("equal frequencies: lambda+- are not analytic at eps = 0")
    root = _sqrt_one_minus(K, D)
    total = np.zeros(K + 1)
    total[0] = omega1 ** 2 + omega2 ** 2
    plus = RspeSeries(level="lambda+", coefficients=(total + root).astype(complex))
    minus = RspeSeries(level="lambda-", coefficients=(total - root).astype(complex))
    return _with_radius(plus), _with_radius(minus)


def _series_sqrt(a: np.ndarray) -> np.ndarray:
    g = np.zeros_like(a, dtype=complex)
    g[0] = np.sqrt(complex(a[0]))
    for k in range(1, len(a)):
        g[k] = (a[k] - np.dot(g[1:k], g[k - 1:0:-1])) / (2.0 * g[0])
    return g


@log_call
def series_quantum_level_r1s1(
    omega1: float, omega2: float, n1: int, n2: int, K: int
) -> RspeSeries:
    """Series of ``(2 n1 + 1) sqrt(lambda+/2) + (2 n2 + 1) sqrt(lambda-/2)``."""
    if n1 < 0 or n2 < 0 or int(n1) != n1 or int(n2) != n2:
        raise InvalidInputError("quantum numbers must be non-negative integers")
    plus, minus = series_lambda_pm(omega1, omega2, K)
    coeffs = (2 * n1 + 1) * _series_sqrt(0.5 * plus.coefficients) + (
        2 * n2 + 1
    ) * _series_sqrt(0.5 * minus.coefficients)
    return _with_radius(RspeSeries(level=f"{int(n1)},{int(n2)}", coefficients=coeffs))


# ---------------------------------------------------------------------------
# Analysis
# ---------------------------------------------------------------------------

def radius_estimate(s: RspeSeries) -> float:
    """Root-test radius from the even coefficients.

    Fits ``log|c_2k| ~ a + b (2k) + g log(2k)`` by least squares over the
    last half of the nonzero even orders (``g`` dropped with fewer than four
    points) and returns ``exp(-b)``, or ``inf`` when that overflows. Growing
    coefficients give radii below one.

    Raises:
        SeriesError: fewer than six nonzero coefficients or three usable
            even orders.
    """
    c = np.asarray(s.coefficients, dtype=complex)
    mags = np.abs(c)
    nonzero = np.isfinite(mags) & (mags > 0)
    if int(np.count_nonzero(nonzero)) < MIN_NONZERO:
        raise SeriesError(
            f"radius estimate needs {MIN_NONZERO} nonzero coefficients, "
            f"series {s.level} has {int(np.count_nonzero(nonzero))}"
        )
    orders = np.array([k for k in range(2, len(c), 2) if nonzero[k]], dtype=float)
    if len(orders) < MIN_EVEN_POINTS:
        raise SeriesError(f"series {s.level} has fewer than {MIN_EVEN_POINTS} nonzero even orders")
    keep = max(MIN_EVEN_POINTS, int(math.ceil(len(orders) / 2)))
    orders = orders[-keep:]
    logs = np.log(mags[orders.astype(int)])
    columns = [np.ones_like(orders), orders]
    if len(orders) >= 4:
        columns.append(np.log(orders))
    coef, *_ = np.linalg.lstsq(np.column_stack(columns), logs, rcond=None)
    slope = float(coef[1])
    if -slope > 700.0:
        return math.inf
    return math.exp(-slope)


def partial_sum(series: RspeSeries, eps: complex, K: Optional[int] = None) -> complex:
    """``sum_{k <= K} c_k eps^k``; all coefficients when *K* is None."""
    coeffs = np.asarray(series.coefficients, dtype=complex)
    if K is not None:
        if K < 0:
            raise InvalidInputError("partial-sum order must be >= 0")
        coeffs = coeffs[: K + 1]
    return complex(np.polyval(coeffs[::-1], eps))
