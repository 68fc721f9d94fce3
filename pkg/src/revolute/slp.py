"""Weighted Sturm-Liouville problems for a single angular mode.

For a meridian ``psi = (F, G)`` and angular mode ``k`` the eigenvalues
``lambda_{k,n}(psi)`` are the min-max values of

    (int |w'|^2 F/|psi'| + k^2 w^2 |psi'|/F) / (int w^2 F |psi'|)

over functions vanishing at the left end.  The quotient is discretized
with P1 finite elements on the curve's own grid; all element integrals are
exact for the piecewise-linear reconstruction of the curve, so the discrete
eigenvalues are Rayleigh-Ritz upper bounds for the polygonal surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _tridiag
from ._parallel import pmap
from .errors import (
    ConditioningError,
    DegenerateTrialError,
    DomainError,
    GeometryError,
    ParameterDomainError,
    SizeError,
)
from .meridian import ZERO_SPEED_TOL, MeridianCurve, segment_curve

__all__ = [
    "ModeProblem",
    "Eigenpair",
    "assemble",
    "solve_modes",
    "eigenvalues",
    "count_below",
    "rayleigh_quotient",
    "solve_mixed",
    "mixed_lambda",
    "count_roots",
    "quadratic_forms",
    "ROOT_RTOL",
]

ROOT_RTOL = 1e-9
EIG_RTOL = 1e-12

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _inverse_weight_moments(f0, f1):
    """Exact integrals over [0, 1] of N_a N_b / F for F linear from f0 to f1.

    Returns (I00, I01, I11) with N_0 = 1 - x, N_1 = x.  Elements whose end
    values differ by less than a factor 2 use 16-point Gauss-Legendre, which
    is exact to rounding there; the others use the logarithmic closed form
    expanded about the smaller end, which avoids cancellation.  The moment of
    a node sitting on the axis (F = 0) is infinite and returned as inf.
    """
    f0 = np.asarray(f0, dtype=float)
    f1 = np.asarray(f1, dtype=float)
    I00 = np.empty_like(f0)
    I01 = np.empty_like(f0)
    I11 = np.empty_like(f0)

    lo = np.minimum(f0, f1)
    hi = np.maximum(f0, f1)
    smooth = hi <= 2.0 * lo
    if np.any(smooth):
        a, b = f0[smooth, None], f1[smooth, None]
        x = _GL_X[None, :]
        inv = _GL_W[None, :] / (a + (b - a) * x)
        I00[smooth] = (inv * (1 - x) ** 2).sum(axis=1)
        I01[smooth] = (inv * x * (1 - x)).sum(axis=1)
        I11[smooth] = (inv * x ** 2).sum(axis=1)

    rough = ~smooth
    if np.any(rough):
        l, h = lo[rough], hi[rough]
        d = h - l
        with np.errstate(divide="ignore", invalid="ignore"):
            m0 = np.where(l > 0, np.log(h / l) / d, np.inf)
            m1 = np.where(l > 0, (1.0 - l * m0) / d, 1.0 / d)
            m2 = np.where(l > 0, (0.5 - l * m1) / d, 0.5 / d)
            small_node = m0 - 2.0 * m1 + m2
        large_node = m2
        small_left = f0[rough] <= f1[rough]
        I00[rough] = np.where(small_left, small_node, large_node)
        I11[rough] = np.where(small_left, large_node, small_node)
        I01[rough] = m1 - m2
    return I00, I01, I11


@dataclass
class ModeProblem:
    """Assembled P1 forms for one angular mode on one curve.

    ``stiff_*`` is the energy form (gradient plus potential), ``mass_*`` the
    weighted L2 form, both as full-node diagonal/off-diagonal arrays.  Only
    nodes in ``active`` carry unknowns.
    """

    curve: MeridianCurve
    k: int
    p: np.ndarray
    q: np.ndarray
    w: np.ndarray
    bc_left: str
    bc_right: str
    stiff_diag: np.ndarray
    stiff_off: np.ndarray
    mass_diag: np.ndarray
    mass_off: np.ndarray
    active: slice = field(default=slice(1, None))

    @property
    def size(self) -> int:
        return len(range(*self.active.indices(self.curve.t.size)))

    def pencil(self):
        """Active (A_diag, A_off, B_diag, B_off)."""
        s = self.active
        i0, i1, _ = s.indices(self.curve.t.size)
        return (
            np.ascontiguousarray(self.stiff_diag[i0:i1]),
            np.ascontiguousarray(self.stiff_off[i0:i1 - 1]),
            np.ascontiguousarray(self.mass_diag[i0:i1]),
            np.ascontiguousarray(self.mass_off[i0:i1 - 1]),
        )

    def expand(self, x):
        """Full-node vector from active values (inactive nodes are zero)."""
        out = np.zeros(self.curve.t.size)
        out[self.active] = x
        return out

    def energy(self, v):
        return float(v @ _tridiag.matvec(self.stiff_diag, self.stiff_off, v))

    def norm2(self, v):
        return float(v @ _tridiag.matvec(self.mass_diag, self.mass_off, v))


@dataclass
class Eigenpair:
    lam: float
    phi: np.ndarray
    n: int
    root_count: int
    residual: float
    k: int = 0

    @property
    def lambda_(self) -> float:
        return self.lam


def assemble(curve: MeridianCurve, k: int, bc_right: str = "auto") -> ModeProblem:
    """P1 stiffness and mass forms for mode ``k`` on ``curve``.

    ``bc_right``: ``"auto"`` picks the axis condition (natural for k = 0,
    zero for k >= 1) when the curve ends on the axis and a natural condition
    otherwise; ``"natural"``, ``"zero"`` force one.
    """
    if k < 0 or int(k) != k:
        raise ParameterDomainError("k must be a non-negative integer")
    k = int(k)
    if curve.t.size < 3:
        raise SizeError("assembly needs at least 3 nodes")
    F = curve.F
    if np.any(F[:-1] <= 0):
        raise GeometryError("F must be positive before the right endpoint")
    if F[-1] < 0:
        raise GeometryError("F must be non-negative")
    on_axis = F[-1] == 0.0

    if bc_right == "auto":
        bc_right = "zero" if (on_axis and k >= 1) else "natural"
    if bc_right not in ("natural", "zero"):
        raise ParameterDomainError(f"unknown right boundary condition {bc_right!r}")
    if on_axis and k >= 1 and bc_right == "natural":
        raise ParameterDomainError("modes k >= 1 must vanish on the axis")

    h = curve.h
    s = curve.element_speed
    if np.any(s <= ZERO_SPEED_TOL):
        raise ConditioningError(
            "curve has zero-speed elements; the mass form is singular. "
            "Collapse them first with resample_arclength or collapse_arclength."
        )
    f0, f1 = F[:-1], F[1:]
    fbar = 0.5 * (f0 + f1)

    n = F.size
    kd = np.zeros(n)
    ko = np.zeros(n - 1)
    md = np.zeros(n)
    mo = np.zeros(n - 1)

    c = fbar / (s * h)
    kd[:-1] += c
    kd[1:] += c
    ko -= c

    sh = s * h / 12.0
    md[:-1] += sh * (3 * f0 + f1)
    md[1:] += sh * (f0 + 3 * f1)
    mo += sh * (f0 + f1)

    if k:
        I00, I01, I11 = _inverse_weight_moments(f0, f1)
        scale = k * k * s * h
        kd[:-1] += scale * I00
        tail = scale * I11
        ko += scale * np.where(np.isfinite(I01), I01, 0.0)
        kd[1:] += np.where(np.isfinite(tail), tail, 0.0)
        q = k * k * s / fbar
    else:
        q = np.zeros_like(fbar)

    active = slice(1, n - 1) if bc_right == "zero" else slice(1, n)
    if len(range(*active.indices(n))) < 1:
        raise SizeError("no active nodes")
    return ModeProblem(curve, k, fbar / s, q, fbar * s, "dirichlet", bc_right, kd, ko, md, mo, active)


def quadratic_forms(curve: MeridianCurve, k: int, v):
    """Energy and weighted norm of node values ``v``, summed element by element.

    Same discrete forms as :func:`assemble`, but without the cancellation of
    the nodal matrix-vector product, so small changes of the curve show up
    smoothly in the result.
    """
    v = np.asarray(v, dtype=float)
    F = curve.F
    f0, f1 = F[:-1], F[1:]
    s, h = curve.element_speed, curve.h
    va, vb = v[:-1], v[1:]
    energy = 0.5 * (f0 + f1) / (s * h) * (vb - va) ** 2
    if k:
        I00, I01, I11 = _inverse_weight_moments(f0, f1)
        with np.errstate(invalid="ignore"):
            pa = np.where(va == 0, 0.0, va * va * I00)
            pb = np.where(vb == 0, 0.0, vb * vb * I11)
        energy = energy + k * k * s * h * (pa + 2 * va * vb * I01 + pb)
    mass = s * h / 12.0 * ((3 * f0 + f1) * va * va + 2 * (f0 + f1) * va * vb + (f0 + 3 * f1) * vb * vb)
    return float(np.sum(energy)), float(np.sum(mass))


def count_below(problem: ModeProblem, sigma: float) -> int:
    """Number of discrete eigenvalues strictly below ``sigma``."""
    return int(_tridiag.sturm_count(*problem.pencil(), float(sigma)))


def count_roots(phi, rtol: float = ROOT_RTOL) -> int:
    """Strict sign changes between consecutive non-negligible nodes."""
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        return 0
    scale = np.max(np.abs(phi))
    if scale == 0:
        return 0
    sig = np.sign(phi[np.abs(phi) > rtol * scale])
    return int(np.count_nonzero(sig[1:] != sig[:-1]))


def solve_modes(problem: ModeProblem, n_max: int, first: int = 1) -> list:
    """Eigenpairs ``first .. first+n_max-1`` (1-based), ascending.

    Eigenvalues are bracketed by inertia counts and bisected to relative
    accuracy 1e-12; eigenvectors come from inverse iteration with
    mass-orthogonalization and are normalized to unit weighted norm with a
    positive slope at the left end.
    """
    A_d, A_o, B_d, B_o = problem.pencil()
    size = A_d.size
    if n_max < 1:
        raise ParameterDomainError("n_max must be positive")
    if first - 1 + n_max > max(size - 1, 1):
        raise SizeError(f"requested {first - 1 + n_max} modes from {size} active nodes")
    if np.any(B_d <= 0):
        raise ConditioningError("mass form is not positive definite")

    lams = _tridiag.bisect_eigenvalues(A_d, A_o, B_d, B_o, n_max, first=first - 1, rtol=EIG_RTOL)
    out = []
    basis = []
    for j, lam in enumerate(lams):
        x = _tridiag.inverse_iteration(A_d, A_o, B_d, B_o, lam, basis, seed=j)
        basis.append(x)
        Ax = _tridiag.matvec(A_d, A_o, x)
        Bx = _tridiag.matvec(B_d, B_o, x)
        rq = float(x @ Ax / (x @ Bx))
        r = Ax - rq * Bx
        residual = float(np.linalg.norm(r) / (np.linalg.norm(Ax) + abs(rq) * np.linalg.norm(Bx)))
        phi = problem.expand(x)
        nz = np.flatnonzero(np.abs(phi) > ROOT_RTOL * np.max(np.abs(phi)))
        if nz.size and phi[nz[0]] < 0:
            phi = -phi
        n = first + j
        out.append(Eigenpair(rq, phi, n, count_roots(phi), residual, problem.k))
    return out


def eigenvalues(curve: MeridianCurve, k: int, n_max: int, bc_right: str = "auto") -> np.ndarray:
    """Just the first ``n_max`` eigenvalues (bisection only)."""
    prob = assemble(curve, k, bc_right)
    return _tridiag.bisect_eigenvalues(*prob.pencil(), n_max, rtol=EIG_RTOL)


def eigenvalue_table(curve: MeridianCurve, ks, n_max: int) -> dict:
    """``{k: eigenvalues}`` for several modes, solved concurrently."""
    ks = list(ks)
    vals = pmap(lambda k: eigenvalues(curve, k, n_max), ks)
    return dict(zip(ks, vals))


def rayleigh_quotient(curve: MeridianCurve, k: int, trial, bc_right: str = "auto") -> float:
    """Discrete Rayleigh quotient of node values ``trial`` (or a callable of t)."""
    prob = assemble(curve, k, bc_right)
    v = trial(curve.t) if callable(trial) else trial
    v = np.array(v, dtype=float)
    if v.shape != curve.t.shape:
        raise SizeError("trial must have one value per node")
    scale = np.max(np.abs(v)) if v.size else 0.0
    if abs(v[0]) > 1e-14 * max(scale, 1.0):
        raise ParameterDomainError("trial functions must vanish at the left end")
    i0, i1, _ = prob.active.indices(v.size)
    if i1 < v.size and abs(v[-1]) > 1e-14 * max(scale, 1.0):
        raise ParameterDomainError("trial has infinite energy: it must vanish on the axis for k >= 1")
    v = prob.expand(v[prob.active])
    den = prob.norm2(v)
    if not den > 0:
        raise DegenerateTrialError("trial has zero weighted norm")
    return prob.energy(v) / den


def solve_mixed(R: float, K: int, z0: float, P: float, elements: int = 4096) -> Eigenpair:
    """Lowest eigenpair on the disc segment [z0, P]: zero at z0, Neumann at P."""
    if not z0 < P:
        raise DomainError(f"mixed problem needs z0 < P, got z0={z0}, P={P}")
    if not (0 <= z0 and P < R):
        raise DomainError("mixed problem needs 0 <= z0 < P < R")
    seg = segment_curve(R, z0, P, elements)
    prob = assemble(seg, K, bc_right="natural")
    return solve_modes(prob, 1)[0]


def mixed_lambda(R: float, K: int, z0: float, P: float, elements=(1024, 2048, 4096)) -> dict:
    """Mixed eigenvalue on a sequence of grids with Richardson extrapolation.

    Successive grids must halve the element size.  ``extrapolated[i]``
    combines grids i and i+1 assuming second-order convergence.
    """
    raw = [solve_mixed(R, K, z0, P, m).lam for m in elements]
    ext = [(4 * raw[i + 1] - raw[i]) / 3 for i in range(len(raw) - 1)]
    return {"elements": list(elements), "raw": raw, "extrapolated": ext,
            "value": ext[-1] if ext else raw[-1]}
