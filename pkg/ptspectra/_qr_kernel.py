"""Shifted QR iteration on an upper Hessenberg matrix.

The kernel sticks to slices, scalar complex arithmetic and ``cmath`` so the
same source runs as plain numpy or compiled by numba when the ``fast``
extra is installed.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

try:
    from numba import jit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on optional extra
    HAS_NUMBA = False


def _jit(fn):
    if HAS_NUMBA:
        return jit(nopython=True, nogil=True, cache=True)(fn)
    return fn


@_jit
def two_by_two(a: complex, b: complex, c: complex, d: complex):
    half = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) * (a - d) + b * c)
    big = half + disc
    if abs(half - disc) > abs(big):
        big = half - disc
    if big == 0:
        return big, big
    # small root from the determinant
    small = (a * d - b * c) / big
    return big, small


@_jit
def hessenberg_qr_eigvals(H: np.ndarray, tol: float, max_iter: int):
    """Eigenvalues of the upper Hessenberg matrix *H*, which is overwritten.

    Returns ``(eigenvalues, failed)`` where ``failed`` is -1 on success and
    otherwise the index of the first eigenvalue that did not converge within
    *max_iter* sweeps.
    """
    n = H.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale = max(scale, abs(H[i, j]))

    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            eigs[0] = H[0, 0]
            break

        # deflate on a negligible subdiagonal entry
        lo = hi
        while lo > 0:
            ref = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if ref == 0.0:
                ref = scale
            if abs(H[lo, lo - 1]) <= tol * ref:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1

        if lo == hi:
            eigs[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            big, small = two_by_two(H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi])
            eigs[lo] = big
            eigs[hi] = small
            hi -= 2
            its = 0
            continue
        if its >= max_iter:
            return eigs, hi
        its += 1

        # Wilkinson shift: eigenvalue of the trailing 2x2 closest to its corner
        a = H[hi - 1, hi - 1]
        b = H[hi - 1, hi]
        c = H[hi, hi - 1]
        d = H[hi, hi]
        half = 0.5 * (a + d)
        disc = cmath.sqrt(0.25 * (a - d) * (a - d) + b * c)
        mu = half + disc
        if abs(half - disc - d) < abs(mu - d):
            mu = half - disc
        if its % 10 == 0:
            mu = d + 0.75 * abs(H[hi, hi - 1])

        for k in range(lo, hi + 1):
            H[k, k] -= mu

        m = hi - lo
        cs = np.empty(m, dtype=np.complex128)
        ss = np.empty(m, dtype=np.complex128)
        for k in range(lo, hi):
            x = H[k, k]
            y = H[k + 1, k]
            r = math.hypot(abs(x), abs(y))
            if r == 0.0:
                cr = 1.0 + 0.0j
                sr = 0.0 + 0.0j
            else:
                cr = x / r
                sr = y / r
            cs[k - lo] = cr
            ss[k - lo] = sr
            row_k = H[k, k:hi + 1].copy()
            row_k1 = H[k + 1, k:hi + 1].copy()
            H[k, k:hi + 1] = cr.conjugate() * row_k + sr.conjugate() * row_k1
            H[k + 1, k:hi + 1] = -sr * row_k + cr * row_k1
            H[k + 1, k] = 0.0

        for k in range(lo, hi):
            cr = cs[k - lo]
            sr = ss[k - lo]
            top = min(k + 2, hi) + 1
            col_k = H[lo:top, k].copy()
            col_k1 = H[lo:top, k + 1].copy()
            H[lo:top, k] = col_k * cr + col_k1 * sr
            H[lo:top, k + 1] = -col_k * sr.conjugate() + col_k1 * cr.conjugate()

        for k in range(lo, hi + 1):
            H[k, k] += mu

    return eigs, -1

