"""Kernels for the symmetric-definite tridiagonal pencil ``(A, B)``.

Matrices are passed as (diagonal, off-diagonal) pairs.  Eigenvalues are
bracketed with inertia counts of ``A - sigma*B`` (Sylvester's law, valid
because ``B`` is positive definite) and refined by bisection; eigenvectors
come from inverse iteration.
"""

import numpy as np
from numba import njit
from scipy.linalg import LinAlgError, solve_banded

_TINY = 1e-280


@njit(cache=True, nogil=True)
def sturm_count(ad, ao, bd, bo, sigma):
    """Number of eigenvalues of the pencil strictly below ``sigma``."""
    n = ad.size
    count = 0
    d = ad[0] - sigma * bd[0]
    if d < 0.0:
        count += 1
    for i in range(1, n):
        if d == 0.0:
            d = _TINY
        e = ao[i - 1] - sigma * bo[i - 1]
        d = (ad[i] - sigma * bd[i]) - e * e / d
        if d < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _bisect(ad, ao, bd, bo, first, nwant, lo0, hi0, rtol):
    lo = np.full(nwant, lo0)
    hi = np.full(nwant, hi0)
    out = np.empty(nwant)
    for j in range(nwant):
        a = lo[j]
        b = hi[j]
        while b - a > rtol * max(abs(a), abs(b)) + 1e-300:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            c = sturm_count(ad, ao, bd, bo, m)
            for i in range(j, nwant):
                if c > first + i:
                    if m < hi[i]:
                        hi[i] = m
                else:
                    if m > lo[i]:
                        lo[i] = m
            a = lo[j]
            b = hi[j]
        out[j] = 0.5 * (a + b)
    return out


def upper_bracket(ad, ao, bd, bo, n):
    """A shift with at least ``n`` eigenvalues below it."""
    hi = 1.0
    while sturm_count(ad, ao, bd, bo, hi) < n:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no upper bracket found")
    return hi


def bisect_eigenvalues(ad, ao, bd, bo, n, first=0, rtol=1e-12, lower=0.0):
    """Eigenvalues with 0-based indices ``first .. first+n-1`` by bisection."""
    hi = upper_bracket(ad, ao, bd, bo, first + n)
    lo = lower
    while sturm_count(ad, ao, bd, bo, lo) > first:
        lo = -2.0 * abs(lo) - 1.0
    return _bisect(ad, ao, bd, bo, first, n, lo, hi, rtol)


def matvec(d, o, x):
    y = d * x
    y[:-1] += o * x[1:]
    y[1:] += o * x[:-1]
    return y


def inverse_iteration(ad, ao, bd, bo, sigma, basis=(), iters=3, seed=0):
    """B-normalized eigenvector for the eigenvalue nearest ``sigma``.

    ``basis`` holds already-computed B-orthonormal vectors; the iterate is
    kept B-orthogonal to them.
    """
    n = ad.size
    ab = np.zeros((3, n))
    x = np.random.default_rng(seed).standard_normal(n)
    shift = sigma
    for attempt in range(4):
        ab[1] = ad - shift * bd
        ab[0, 1:] = ao - shift * bo
        ab[2, :-1] = ao - shift * bo
        try:
            for _ in range(iters):
                y = solve_banded((1, 1), ab, matvec(bd, bo, x), check_finite=False)
                for v in basis:
                    y -= (v @ matvec(bd, bo, y)) * v
                x = y / np.sqrt(y @ matvec(bd, bo, y))
            if np.all(np.isfinite(x)):
                return x
        except (LinAlgError, FloatingPointError, ValueError):
            pass
        shift = sigma * (1.0 + 1e-11 * (attempt + 1)) + 1e-14
        x = np.random.default_rng(seed + attempt + 1).standard_normal(n)
    raise ArithmeticError("inverse iteration failed")
