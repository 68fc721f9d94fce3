"""Bessel functions of the first kind and the flat-disc reference spectrum."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ParameterDomainError, RevoluteError

__all__ = [
    "bessel_j",
    "bessel_zero",
    "mcmahon_guess",
    "disc_eigenvalue",
    "disc_spectrum",
    "compute_mu",
    "largest_disc_root",
    "disc_mode_function",
    "DiscReference",
    "NU_MAX",
    "N_MAX",
]

NU_MAX = 50.0
N_MAX = 100


class ConsistencyError(RevoluteError):
    """An identity that must hold for correct Bessel zeros failed."""


def bessel_j(nu, x):
    """J_nu(x) for real nu >= 0 and x >= 0 (vectorized)."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(nu < 0) or np.any(x < 0):
        raise ParameterDomainError("bessel_j needs nu >= 0 and x >= 0")
    out = special.jv(nu, x)
    return float(out) if out.ndim == 0 else out


def _dj(nu, x):
    return 0.5 * (special.jv(nu - 1.0, x) - special.jv(nu + 1.0, x))


def mcmahon_guess(nu: float, n: int) -> float:
    """McMahon's large-zero expansion of j_{nu,n}."""
    mu = 4.0 * nu * nu
    b = (n + 0.5 * nu - 0.25) * math.pi
    return (b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
            - 32 * (mu - 1) * (83 * mu * mu - 982 * mu + 3779) / (15 * (8 * b) ** 5))


_zero_cache: dict = {}
_zero_lock = threading.Lock()


def _sign_change_brackets(nu, upto, lo):
    step = 0.25
    xs = np.arange(lo, upto + step, step)
    vals = special.jv(nu, xs)
    idx = np.flatnonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))
    return xs, idx


def _refine(nu, a, b):
    fa = special.jv(nu, a)
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = special.jv(nu, m)
        if np.signbit(fm) == np.signbit(fa):
            a, fa = m, fm
        else:
            b = m
        if b - a < 1e-6:
            break
    x = 0.5 * (a + b)
    for _ in range(20):
        dx = special.jv(nu, x) / _dj(nu, x)
        x -= dx
        if abs(dx) < 1e-15 * x:
            break
    if not (a - 1e-6 <= x <= b + 1e-6):
        raise ConsistencyError(f"Newton left its bracket for nu={nu}")
    return float(x)


def bessel_zero(nu: float, n: int) -> float:
    """n-th positive zero of J_nu, absolute accuracy about 1e-13.

    The McMahon expansion sets the search window; zeros are counted by sign
    changes on a lattice finer than their spacing (> 2.9 for nu >= 0), so
    the bracket is guaranteed to hold the n-th zero and no other.  Each
    bracket is bisected and then polished with Newton's method.
    """
    nu = float(nu)
    if nu < 0 or nu > NU_MAX:
        raise ParameterDomainError(f"order must lie in [0, {NU_MAX}]")
    if int(n) != n or n < 1 or n > N_MAX:
        raise ParameterDomainError(f"index must be an integer in [1, {N_MAX}]")
    n = int(n)
    key = (nu, n)
    hit = _zero_cache.get(key)
    if hit is not None:
        return hit
    upto = max(mcmahon_guess(nu, n), (n + 0.5 * nu - 0.25) * math.pi) + 2.0
    lo = max(nu, 0.5)
    xs, idx = _sign_change_brackets(nu, upto, lo)
    while idx.size < n:
        upto += 2 * math.pi
        xs, idx = _sign_change_brackets(nu, upto, lo)
    i = idx[n - 1]
    x = _refine(nu, xs[i], xs[i + 1])
    if not x > nu:
        raise ConsistencyError(f"j_{{{nu},{n}}} = {x} is not above the order")
    with _zero_lock:
        _zero_cache[key] = x
    return x


def disc_eigenvalue(R: float, k: int, n: int) -> float:
    """lambda_{k,n} of the flat disc of radius R: (j_{k,n} / R)^2."""
    if not R > 0:
        raise ParameterDomainError("R must be positive")
    return (bessel_zero(k, n) / R) ** 2


def disc_spectrum(R: float, J: int):
    """First J disc eigenvalues with multiplicity: list of (lambda, k, n).

    Entries with k != 0 appear twice.
    """
    if J < 1:
        raise ParameterDomainError("J must be at least 1")
    cand = []
    kmax = 0
    while True:
        cand.extend((disc_eigenvalue(R, kmax, n), kmax, n) for n in range(1, J + 1))
        cand.sort()
        thresh = _expanded(cand)[J - 1][0] if len(_expanded(cand)) >= J else math.inf
        kmax += 1
        if disc_eigenvalue(R, kmax, 1) > thresh:
            break
    return _expanded(sorted(cand))[:J]


def _expanded(entries):
    out = []
    for lam, k, n in entries:
        out.append((lam, k, n))
        if k:
            out.append((lam, k, n))
    return out


def compute_mu(K: int, N: int, R: float):
    """mu = K / sqrt(lambda_{K,N}(disc)) = K R / j_{K,N}, and P = R - mu."""
    if not R > 0:
        raise ParameterDomainError("R must be positive")
    j = bessel_zero(K, N)
    mu = K * R / j
    if not mu < R:
        raise ConsistencyError(f"mu = {mu} is not below R = {R}")
    return mu, R - mu


def largest_disc_root(K: int, N: int, R: float) -> float:
    """Largest root z0 in (0, R) of the disc mode Phi_{K,N}(t) ~ J_K(j_{K,N}(R-t)/R).

    The roots sit at t = R(1 - j_{K,m}/j_{K,N}) for m < N; the largest is
    m = 1.  For N = 1 there is no interior root and the left end 0 is
    returned.
    """
    if N < 1:
        raise ParameterDomainError("N must be positive")
    if N == 1:
        return 0.0
    z0 = R * (1.0 - bessel_zero(K, 1) / bessel_zero(K, N))
    _mu, P = compute_mu(K, N, R) if K > 0 else (0.0, R)
    if K > 0 and not z0 < P:
        raise ConsistencyError(f"z0 = {z0} is not below P = {P}")
    return z0


def disc_mode_function(K: int, N: int, R: float):
    """Callable t -> J_K(j_{K,N} (R - t) / R), the disc eigenfunction profile."""
    j = bessel_zero(K, N)

    def phi(t):
        return special.jv(K, j * (R - np.asarray(t, dtype=float)) / R)

    return phi


@dataclass
class DiscReference:
    R: float
    kmax: int
    nmax: int
    zeros: np.ndarray = field(init=False)
    lam: np.ndarray = field(init=False)

    def __post_init__(self):
        self.zeros = np.array([[bessel_zero(k, n) for n in range(1, self.nmax + 1)]
                               for k in range(self.kmax + 1)])
        self.lam = (self.zeros / self.R) ** 2
