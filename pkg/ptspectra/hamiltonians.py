"""Truncated matrices of the PT-symmetric model Hamiltonians.

- ``H2(eps) = p1^2 + p2^2 + w1^2 x1^2 + w2^2 x2^2 + i eps x1^r x2^s`` in the
  product oscillator basis.
- ``H3(eps) = p^2 + x^2 (i x)^eps`` in the unit oscillator basis, assembled as
  ``p^2 + cos(pi eps/2)|x|^(2+eps) + i sin(pi eps/2) sign(x)|x|^(2+eps)``.
- The two-level gain-coupling and detuned models, with a diagonal parity.

Every builder returns a :class:`~ptspectra.models.TruncatedHamiltonian`
with a read-only matrix and the diagonal of the parity operator ``P`` such
that ``P conj(M) P = M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from ptspectra.basis import (
    BasisSpec,
    abs_power_matrix,
    momentum_squared_matrix,
    monomial_matrix,
    oscillator_energies,
    parity_signs,
    signed_abs_power_matrix,
)
from ptspectra.closed_forms import TwoLevelDetuned, TwoLevelGainCoupling, is_non_resonant
from ptspectra.decorators import log_call
from ptspectra.errors import InvalidInputError
from ptspectra.logger import get_logger
from ptspectra.models import TruncatedHamiltonian

log = get_logger()

H2 = "H2"
H3 = "H3"
GAIN = "gain"
DETUNED = "detuned"


@dataclass(frozen=True)
class ModelH2:
    """Parameters of the coupled-oscillator model. ``r`` and ``s`` must not
    both be even; resonant frequencies are allowed but logged."""

    omega1: float
    omega2: float
    r: int = 1
    s: int = 1

    def __post_init__(self) -> None:
        for name in ("omega1", "omega2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value!r}")
        for name in ("r", "s"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {value!r}")
        if self.r % 2 == 0 and self.s % 2 == 0:
            raise InvalidInputError(f"r and s must not both be even (r={self.r}, s={self.s})")

    @property
    def non_resonant(self) -> bool:
        return is_non_resonant(self.omega1, self.omega2)

    @property
    def odd_total_degree(self) -> bool:
        """True when ``r + s`` is odd (the stronger of the two admissible conditions)."""
        return (self.r + self.s) % 2 == 1

    @property
    def parity_operator(self) -> str:
        """P1 flips x1, P2 flips x2, P3 flips both."""
        if self.r % 2 == 1:
            return "P1"
        if self.s % 2 == 1:
            return "P2"
        return "P3"

    def parity_vector(self, n1: int, n2: int) -> np.ndarray:
        p1 = parity_signs(n1)
        p2 = parity_signs(n2)
        op = self.parity_operator
        if op == "P1":
            return np.kron(p1, np.ones(n2))
        if op == "P2":
            return np.kron(np.ones(n1), p2)
        return np.kron(p1, p2)


@dataclass(frozen=True)
class ModelH3:
    """``p^2 + x^2 (i x)^eps``. The model itself is fixed by the coupling;
    ``quad_order`` is the starting quadrature order of the ``|x|^(2+eps)``
    entries (a size-based default when ``None``)."""

    quad_order: int | None = None

    def __post_init__(self) -> None:
        if self.quad_order is not None and self.quad_order < 1:
            raise InvalidInputError(f"quad_order must be >= 1, got {self.quad_order!r}")

    @staticmethod
    def potential_weights(eps: float) -> tuple[float, float]:
        """``(cos(pi eps/2), sin(pi eps/2))``, the weights of ``|x|^(2+eps)`` and
        ``i sign(x)|x|^(2+eps)``."""
        validate_h3_eps(eps)
        return math.cos(0.5 * math.pi * eps), math.sin(0.5 * math.pi * eps)


def _freeze(M: np.ndarray) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=np.complex128)
    M.setflags(write=False)
    return M


@log_call
def build_h2(m: ModelH2, eps: float, N1: int, N2: int) -> TruncatedHamiltonian:
    """Matrix of ``H2(eps)`` on ``N1 x N2`` product states, index ``n1 * N2 + n2``."""
    if not math.isfinite(eps):
        raise InvalidInputError(f"eps must be finite, got {eps!r}")
    b1 = BasisSpec(m.omega1, N1)
    b2 = BasisSpec(m.omega2, N2)
    if not m.non_resonant:
        log.warning(
            "frequencies %r and %r are resonant; unperturbed levels may be degenerate",
            m.omega1, m.omega2,
        )
    energies = np.add.outer(oscillator_energies(b1), oscillator_energies(b2)).ravel()
    V = np.kron(monomial_matrix(b1, m.r), monomial_matrix(b2, m.s))
    M = np.diag(energies).astype(np.complex128) + (1j * eps) * V
    return TruncatedHamiltonian(
        matrix=_freeze(M),
        parity=m.parity_vector(N1, N2),
        model=H2,
        eps=float(eps),
        unperturbed=energies,
        basis=(b1, b2),
        params={
            "omega1": m.omega1,
            "omega2": m.omega2,
            "r": m.r,
            "s": m.s,
            "parity_operator": m.parity_operator,
            "odd_total_degree": m.odd_total_degree,
            "non_resonant": m.non_resonant,
        },
    )


def validate_h3_eps(eps: float) -> None:
    if not (math.isfinite(eps) and -1.0 < eps < 1.0):
        raise InvalidInputError(f"H3 coupling must satisfy -1 < eps < 1, got {eps!r}")


@log_call
def build_h3(eps: float, N: int = 128, quad_order: int | None = None) -> TruncatedHamiltonian:
    """Matrix of ``H3(eps)`` on the first *N* unit-oscillator states.

    At ``eps == 0`` the matrix is exactly ``diag(2n+1)``.
    """
    cos_w, sin_w = ModelH3(quad_order).potential_weights(eps)
    b = BasisSpec(1.0, N)
    energies = oscillator_energies(b)
    M = np.diag(energies).astype(np.complex128)
    if eps != 0.0:
        s = 2.0 + eps
        kinetic = M.real - monomial_matrix(b, 2)
        even = abs_power_matrix(b, s, quad_order)
        odd = signed_abs_power_matrix(b, s, quad_order)
        M = kinetic + cos_w * even + 1j * sin_w * odd
    return TruncatedHamiltonian(
        matrix=_freeze(M),
        parity=parity_signs(N),
        model=H3,
        eps=float(eps),
        unperturbed=energies,
        basis=(b,),
        params={"quad_order": quad_order},
    )


def _two_level(
    e1: float, e2: float, eps: float, model: str, params: dict
) -> TruncatedHamiltonian:
    M = np.array([[e1, 1j * eps], [1j * eps, e2]], dtype=np.complex128)
    return TruncatedHamiltonian(
        matrix=_freeze(M),
        parity=np.array([1.0, -1.0]),
        model=model,
        eps=float(eps),
        unperturbed=np.array([e1, e2], dtype=float),
        params=params,
    )


@log_call
def build_gain_coupling(m: TwoLevelGainCoupling, eps: float | None = None) -> TruncatedHamiltonian:
    """``[[e1, i eps], [i eps, e2]]`` with parity ``diag(1, -1)``; *eps*
    overrides the coupling stored on *m*."""
    eps = m.eps if eps is None else eps
    return _two_level(m.e1, m.e2, eps, GAIN, {"e1": m.e1, "e2": m.e2})


@log_call
def build_detuned(m: TwoLevelDetuned, eps: float | None = None) -> TruncatedHamiltonian:
    """The detuned pair in the eigenbasis of ``[[e, b], [b, e]]``.

    There the swap parity becomes ``diag(1, -1)`` and the model reads
    ``[[e + b, i eps], [i eps, e - b]]``, with the same spectrum as
    ``[[e + i eps, b], [b, e - i eps]]``.
    """
    eps = m.eps if eps is None else eps
    return _two_level(m.e + m.b, m.e - m.b, eps, DETUNED, {"e": m.e, "b": m.b})


# ---------------------------------------------------------------------------
# Structure checks
# ---------------------------------------------------------------------------

def kinetic_matrix(h: TruncatedHamiltonian) -> np.ndarray:
    """Kinetic part rebuilt from the basis: ``p^2`` for H3, ``p1^2 x I + I x p2^2``
    for H2 and zero for the two-level models."""
    if h.model == H3:
        return momentum_squared_matrix(h.basis[0])
    if h.model == H2:
        b1, b2 = h.basis
        return np.kron(momentum_squared_matrix(b1), np.eye(b2.size)) + np.kron(
            np.eye(b1.size), momentum_squared_matrix(b2)
        )
    return np.zeros((h.size, h.size))


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def skew_part(M: np.ndarray) -> np.ndarray:
    """``(M - M^H) / (2i)``, Hermitian."""
    return (M - M.conj().T) / 2j


@log_call
def form_bound_gap(h: TruncatedHamiltonian, gamma: float = 0.0, a: float = 1.0, b: float = 0.0) -> float:
    """Smallest eigenvalue of ``a (cos g Herm(M) + sin g Skew(M) + b I) - K``.

    Nonnegative exactly when ``<u, p^2 u> <= a (cos g Re<u,Mu> + sin g Im<u,Mu>
    + b |u|^2)`` for every vector ``u`` of the truncated space.
    """
    M = np.asarray(h.matrix)
    form = math.cos(gamma) * hermitian_part(M) + math.sin(gamma) * skew_part(M)
    Q = a * (form + b * np.eye(h.size)) - kinetic_matrix(h)
    Q = hermitian_part(Q)
    return float(eigvalsh(Q, subset_by_index=[0, 0])[0])


def form_positivity_gap(h: TruncatedHamiltonian) -> float:
    """``min eig(Herm(M) - K)``: the gamma=0, a=1, b=0 instance of :func:`form_bound_gap`."""
    return form_bound_gap(h, 0.0, 1.0, 0.0)


def pt_defect(h: TruncatedHamiltonian) -> float:
    """Largest entry of ``|P conj(M) P - M|``."""
    P = np.asarray(h.parity, dtype=float)
    M = np.asarray(h.matrix)
    return float(np.max(np.abs(np.outer(P, P) * M.conj() - M)))
