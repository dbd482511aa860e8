"""Closed-form spectra used as oracles: two-level models, classical
normal modes of the coupled oscillator pair and the matching quantum levels
when both coupling exponents equal one.

Square roots take the real branch on the unbroken side and the branch with
positive imaginary part past the threshold, so the "+" member of each pair
is the one moving up the imaginary axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.signal import find_peaks

from ptspectra.decorators import log_call
from ptspectra.errors import InvalidInputError

ComplexPair = Tuple[complex, complex]


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TwoLevelGainCoupling:
    """``[[e1, i eps], [i eps, e2]]``: balanced gain and loss coupling."""

    e1: float
    e2: float
    eps: float

    def __post_init__(self) -> None:
        _require_finite(e1=self.e1, e2=self.e2, eps=self.eps)


@dataclass(frozen=True)
class TwoLevelDetuned:
    """``[[e + i eps, b], [b, e - i eps]]``: detuned pair with gain/loss ``eps``."""

    e: float
    b: float
    eps: float

    def __post_init__(self) -> None:
        _require_finite(e=self.e, b=self.b, eps=self.eps)


@dataclass(frozen=True)
class OscillatorPair:
    """Two oscillators ``p1^2 + p2^2 + w1^2 x1^2 + w2^2 x2^2 + i eps x1 x2``."""

    omega1: float
    omega2: float
    eps: float

    def __post_init__(self) -> None:
        _require_finite(omega1=self.omega1, omega2=self.omega2, eps=self.eps)
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise InvalidInputError("oscillator frequencies must be positive")

    @property
    def detuning(self) -> float:
        """``|w1^2 - w2^2|``, the coupling at which the classical modes merge."""
        return abs(self.omega1 ** 2 - self.omega2 ** 2)


def branch_sqrt(x: float) -> complex:
    """sqrt(x) for real x: real for x >= 0, positive imaginary otherwise."""
    if x >= 0:
        return complex(math.sqrt(x), 0.0)
    return complex(0.0, math.sqrt(-x))


# ---------------------------------------------------------------------------
# Two-level models
# ---------------------------------------------------------------------------

def gain_coupling_matrix(p: TwoLevelGainCoupling) -> np.ndarray:
    return np.array([[p.e1, 1j * p.eps], [1j * p.eps, p.e2]], dtype=np.complex128)


def detuned_matrix(p: TwoLevelDetuned) -> np.ndarray:
    return np.array([[p.e + 1j * p.eps, p.b], [p.b, p.e - 1j * p.eps]], dtype=np.complex128)


@log_call
def eig_gain_coupling(p: TwoLevelGainCoupling) -> ComplexPair:
    """``(e1+e2)/2 +- sqrt((e1-e2)^2 - 4 eps^2) / 2`` as ``("+", "-")``."""
    mean = 0.5 * (p.e1 + p.e2)
    root = 0.5 * branch_sqrt((p.e1 - p.e2) ** 2 - 4.0 * p.eps ** 2)
    return mean + root, mean - root


def threshold_gain_coupling(p: TwoLevelGainCoupling) -> float:
    return 0.5 * abs(p.e1 - p.e2)


@log_call
def eig_detuned(p: TwoLevelDetuned) -> ComplexPair:
    """``e +- sqrt(b^2 - eps^2)`` as ``("+", "-")``."""
    root = branch_sqrt(p.b ** 2 - p.eps ** 2)
    return p.e + root, p.e - root


def threshold_detuned(p: TwoLevelDetuned) -> float:
    return abs(p.b)


# ---------------------------------------------------------------------------
# Coupled oscillators
# ---------------------------------------------------------------------------

@log_call
def classical_lambda_pm(p: OscillatorPair) -> ComplexPair:
    """Eigenvalues of ``[[2 w1^2, i eps], [i eps, 2 w2^2]]``:
    ``w1^2 + w2^2 +- sqrt((w1^2 - w2^2)^2 - eps^2)``."""
    total = p.omega1 ** 2 + p.omega2 ** 2
    root = branch_sqrt((p.omega1 ** 2 - p.omega2 ** 2) ** 2 - p.eps ** 2)
    return total + root, total - root


@log_call
def classical_normal_frequencies(p: OscillatorPair) -> ComplexPair:
    """Normal-mode frequencies ``sqrt(2 lambda_+-)`` (principal branch)."""
    lp, lm = classical_lambda_pm(p)
    return cmath.sqrt(2.0 * lp), cmath.sqrt(2.0 * lm)


@log_call
def quantum_levels_r1s1(p: OscillatorPair, n1: int, n2: int) -> complex:
    """Level ``(n1, n2)`` of the bilinear model: ``(2 n1 + 1) sqrt(lambda_+/2)
    + (2 n2 + 1) sqrt(lambda_-/2)``, principal square roots."""
    if n1 < 0 or n2 < 0 or int(n1) != n1 or int(n2) != n2:
        raise InvalidInputError("quantum numbers must be non-negative integers")
    lp, lm = classical_lambda_pm(p)
    return (2 * n1 + 1) * cmath.sqrt(0.5 * lp) + (2 * n2 + 1) * cmath.sqrt(0.5 * lm)


def threshold_oscillators(p: OscillatorPair) -> float:
    return p.detuning


@log_call
def classical_detuned_frequencies(p: TwoLevelDetuned) -> ComplexPair:
    """Classical analogue of the detuned pair: two oscillators with squared
    frequencies ``2 e`` coupled by ``b`` with gain/loss ``eps``. Returns
    ``sqrt(2 (e +- sqrt(b^2 - eps^2)))``."""
    root = branch_sqrt(p.b ** 2 - p.eps ** 2)
    return cmath.sqrt(2.0 * (p.e + root)), cmath.sqrt(2.0 * (p.e - root))


@log_call
def integrate_classical_modes(
    p: OscillatorPair,
    *,
    t_max: float = 200.0,
    samples: int = 8192,
    x0: Tuple[float, float] = (1.0, 0.5),
) -> Tuple[float, float]:
    """Read the two normal-mode frequencies off a numerical trajectory.

    Integrates ``x'' = -4 W x`` with ``W = [[w1^2, i eps/2], [i eps/2, w2^2]]``
    from rest, then locates the two strongest peaks of the windowed power
    spectrum of both coordinates. Only meaningful on the unbroken side,
    where the motion stays bounded. Returns ``(larger, smaller)``.
    """
    if t_max <= 0 or samples < 16:
        raise InvalidInputError("t_max must be positive and samples >= 16")
    W = np.array(
        [[p.omega1 ** 2, 0.5j * p.eps], [0.5j * p.eps, p.omega2 ** 2]], dtype=np.complex128
    )

    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate([y[2:], -4.0 * (W @ y[:2])])

    t = np.linspace(0.0, t_max, samples, endpoint=False)
    y0 = np.array([x0[0], x0[1], 0.0, 0.0], dtype=np.complex128)
    sol = solve_ivp(rhs, (0.0, t_max), y0, t_eval=t, method="DOP853", rtol=1e-10, atol=1e-12)

    window = np.hanning(samples)
    dt = t[1] - t[0]
    power = sum(np.abs(np.fft.fft(sol.y[k] * window)) ** 2 for k in range(2))
    freqs = 2.0 * np.pi * np.fft.fftfreq(samples, d=dt)
    half = samples // 2
    # fold negative frequencies onto positive ones
    folded = power[1:half] + power[samples - 1:samples - half:-1]
    omega = freqs[1:half]

    peaks, _ = find_peaks(folded)
    if len(peaks) == 0:
        peaks = np.array([int(np.argmax(folded))])
    strongest = sorted(peaks[np.argsort(folded[peaks])[::-1][:2]])
    step = omega[1] - omega[0]
    found = []
    for k in strongest:
        if 0 < k < len(folded) - 1:
            a, b, c = np.log(folded[k - 1:k + 2] + 1e-300)
            shift = 0.5 * (a - c) / (a - 2.0 * b + c) if a - 2.0 * b + c != 0 else 0.0
        else:
            shift = 0.0
        found.append(float(omega[k] + shift * step))
    if len(found) == 1:
        found.append(found[0])
    return max(found), min(found)


# ---------------------------------------------------------------------------
# Perturbative guarantees and resonance
# ---------------------------------------------------------------------------

@log_call
def perturbative_reality_radius(h0_diagonal: np.ndarray, w: np.ndarray) -> float:
    """Couplings below ``delta / ||W||_2`` keep every level of the symmetric
    pencil ``diag(h0) + eps W`` real, where ``delta`` is half the smallest
    gap between unperturbed levels."""
    h0 = np.sort(np.asarray(h0_diagonal, dtype=float))
    W = np.asarray(w, dtype=np.complex128)
    if W.shape != (len(h0), len(h0)):
        raise InvalidInputError("W must be square and match the unperturbed levels")
    if len(h0) < 2:
        return math.inf
    delta = 0.5 * float(np.min(np.diff(h0)))
    norm = float(np.linalg.norm(W, 2))
    if norm == 0.0:
        return math.inf
    return delta / norm


def is_non_resonant(omega1: float, omega2: float, max_denominator: int = 64) -> bool:
    """False when ``omega1/omega2`` equals a fraction with denominator up to
    *max_denominator* to within 1e-9 relative."""
    ratio = omega1 / omega2
    approx = Fraction(ratio).limit_denominator(max_denominator)
    return abs(ratio - float(approx)) > 1e-9 * ratio
