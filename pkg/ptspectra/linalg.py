"""Dense complex eigenvalue machinery.

Hessenberg reduction by Householder reflections, shifted QR with
deflation (see :mod:`ptspectra._qr_kernel`), residual certificates from an
LU factorisation and greedy spectrum matching. Matrices are numpy
``complex128`` arrays in row-major order.
"""

from __future__ import annotations

import math
import warnings
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from ptspectra._qr_kernel import hessenberg_qr_eigvals
from ptspectra.decorators import log_call
from ptspectra.errors import ConvergenceError, InvalidInputError
from ptspectra.models import Spectrum

DEFLATION_TOL = 1e-14
MAX_SWEEPS_PER_EIGENVALUE = 40


def as_dense(A: object, *, name: str = "matrix") -> np.ndarray:
    """Validate *A* as a finite square matrix and return a complex128 copy."""
    try:
        M = np.array(A, dtype=np.complex128, order="C")
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] == 0:
        raise InvalidInputError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return M


def _householder_hessenberg(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = np.linalg.norm(x[1:])
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x
        v[0] += phase * np.linalg.norm(x)
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _power_of_two_scale(M: np.ndarray) -> float:
    peak = float(np.max(np.abs(M)))
    if peak == 0.0 or not math.isfinite(peak):
        return 1.0
    return math.ldexp(1.0, math.frexp(peak)[1] - 1)


@log_call
def hessenberg_reduce(A: object) -> np.ndarray:
    """Unitarily similar upper Hessenberg form of *A* (zeros below the first
    subdiagonal are exact)."""
    return _householder_hessenberg(as_dense(A))


@log_call
def eigenvalues(
    A: object,
    *,
    with_residuals: bool = False,
    tol: float = DEFLATION_TOL,
    max_iter: int = MAX_SWEEPS_PER_EIGENVALUE,
) -> Spectrum:
    """All eigenvalues of *A*, sorted by (real, imag).

    *A* is divided by a power of two that brings its largest entry into
    [1, 2) before the reduction, and the eigenvalues are scaled back. Tiny
    or huge finite matrices then neither underflow nor overflow inside the
    sweep.

    Raises:
        ConvergenceError: some eigenvalue needed more than *max_iter* sweeps,
            or came out non-finite.
    """
    M = as_dense(A)
    scale = _power_of_two_scale(M)
    H = _householder_hessenberg(M / scale)
    eigs, failed = hessenberg_qr_eigvals(H, float(tol), int(max_iter))
    if failed >= 0:
        raise ConvergenceError(
            f"QR iteration did not converge for eigenvalue {failed} of {M.shape[0]}"
        )
    with np.errstate(over="ignore", invalid="ignore"):
        eigs = eigs * scale
    if not np.all(np.isfinite(eigs)):
        raise ConvergenceError(f"non-finite eigenvalue of a {M.shape[0]}x{M.shape[0]} matrix")
    order = np.lexsort((eigs.imag, eigs.real))
    eigs = eigs[order]
    residuals = None
    if with_residuals:
        residuals = np.array([eigen_residual(M, lam) for lam in eigs])
    return Spectrum(eigenvalues=eigs, residuals=residuals)


def eigen_residual(A: object, lam: complex, iterations: int = 8) -> float:
    """Smallest singular value of ``A - lam I`` divided by the Frobenius norm of *A*.

    The singular value comes from power iteration on ``(B^H B)^-1`` using a
    single LU factorisation of ``B``. An exactly singular ``B`` returns 0.
    """
    M = as_dense(A)
    n = M.shape[0]
    norm = float(np.linalg.norm(M))
    B = M - complex(lam) * np.eye(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(B, check_finite=False)
    if np.min(np.abs(np.diag(lu))) == 0.0:
        return 0.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    growth = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max(1, iterations)):
            y = lu_solve((lu, piv), lu_solve((lu, piv), x, check_finite=False), trans=2, check_finite=False)
            growth = float(np.linalg.norm(y))
            if not np.isfinite(growth):
                return 0.0
            x = y / growth
    sigma_min = 1.0 / np.sqrt(growth)
    return float(sigma_min / norm) if norm > 0 else float(sigma_min)


def lu_determinant(A: object) -> complex:
    """Determinant via LU with partial pivoting."""
    M = as_dense(A)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(M, check_finite=False)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    return complex((-1) ** swaps * np.prod(np.diag(lu)))


def match_spectra(a: Sequence[complex], b: Sequence[complex]) -> List[Tuple[int, int]]:
    """Greedy minimal-distance pairing of two equal-length multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise InvalidInputError(f"spectra differ in length: {a.shape} vs {b.shape}")
    dist = np.abs(a[:, None] - b[None, :])
    used_a = np.zeros(len(a), dtype=bool)
    used_b = np.zeros(len(b), dtype=bool)
    pairs: List[Tuple[int, int]] = []
    for flat in np.argsort(dist, axis=None, kind="stable"):
        i, j = divmod(int(flat), len(b))
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        pairs.append((i, j))
        if len(pairs) == len(a):
            break
    return pairs


def multiset_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest pair distance after greedy matching."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if not len(a):
        return 0.0
    return float(max(abs(a[i] - b[j]) for i, j in match_spectra(a, b)))


def conjugation_defect(eigs: Sequence[complex]) -> float:
    """Distance between a spectrum and its complex conjugate as multisets.

    Zero up to rounding for any matrix with an antilinear symmetry.
    """
    eigs = np.asarray(eigs, dtype=complex)
    return multiset_distance(eigs, eigs.conj())
