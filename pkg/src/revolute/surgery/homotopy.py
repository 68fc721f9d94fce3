"""Unrolling homotopy of the reflected tail, eigenvalue tracking and Dini derivatives.

The tail of chi on [P, L*] is unit speed with direction (-cos theta, sin theta),
theta in [0, pi].  A chain of monotone angle homotopies lowers theta to 0;
since every step only decreases theta, F_s decreases pointwise in s and the
tail ends up as the straight segment (R - t, 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._parallel import pmap
from ..errors import HomotopyParameterError, HypothesisViolation, ParameterDomainError
from ..meridian import MeridianCurve
from ..slp import _GL_W, _GL_X, assemble, quadratic_forms, solve_modes

__all__ = [
    "HomotopyParams",
    "Homotopy",
    "HomotopyTrace",
    "BoundReport",
    "DiniResult",
    "smoothstep",
    "unroll_homotopy",
    "trace_eigenvalue",
    "dini_derivative",
    "frozen_quotient",
    "efes_bound_check",
    "largest_root",
]

HALF_PI = 0.5 * math.pi
REGULAR_GAP = 1e-9


def smoothstep(tau):
    """h(tau) = 3 tau^2 - 2 tau^3 and its derivative."""
    tau = np.asarray(tau, dtype=float)
    return 3 * tau**2 - 2 * tau**3, 6 * tau * (1 - tau)


@dataclass(frozen=True)
class HomotopyParams:
    eps: float = 1e-3
    delta: float = 1e-3
    dilation: int = 2
    s_samples: int = 64

    def __post_init__(self):
        if not (0 < self.eps < 0.5 and 0 < self.delta < 0.5):
            raise ParameterDomainError("eps and delta must lie in (0, 0.5)")
        if self.dilation < 0:
            raise ParameterDomainError("dilation must be non-negative")
        if self.s_samples < 2:
            raise ParameterDomainError("s_samples must be at least 2")

    @property
    def s_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.s_samples)


def _runs(mask):
    """(start, stop) index pairs of the True runs of a boolean array."""
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    return list(zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1)))


def _angle_stages(theta0, params: HomotopyParams):
    """Angle profiles f_0 = theta0 >= f_1 >= ... >= f_m = 0, one per element."""
    th1 = np.clip(theta0 - params.eps, 0.0, math.pi)
    # pi/2 must be a regular value of the lowered profile
    near = np.abs(th1 - HALF_PI) < REGULAR_GAP
    th1[near] = HALF_PI + 2 * REGULAR_GAP
    th1 = np.minimum(th1, theta0)
    stages = [theta0.copy(), th1]
    runs = _runs(th1 >= HALF_PI)
    cur = th1
    for start, stop in reversed(runs):
        lo = max(0, start - params.dilation)
        hi = min(cur.size, stop + params.dilation)
        nxt = cur.copy()
        nxt[lo:hi] = np.minimum(cur[lo:hi], HALF_PI - params.delta)
        stages.append(nxt)
        cur = nxt
    stages.append(np.zeros_like(theta0))
    return np.array(stages)


@dataclass
class Homotopy:
    """The map s -> omega_s on the fixed tail elements of chi.

    ``prefix`` is the straight piece [z, P] (nodes of chi), ``tail_t`` the
    tail nodes from P to L*, ``theta0`` the per-element angle of chi.
    """

    mu: float
    R: float
    P: float
    z: float
    prefix_t: np.ndarray
    tail_t: np.ndarray
    tail_F: np.ndarray
    tail_G: np.ndarray
    theta0: np.ndarray
    stages: np.ndarray
    params: HomotopyParams

    @property
    def n_stages(self) -> int:
        return self.stages.shape[0] - 1

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.tail_t)

    def angle(self, s: float):
        """theta_s per tail element and its s-derivative."""
        if not 0.0 <= s <= 1.0:
            raise ParameterDomainError("s must lie in [0, 1]")
        m = self.n_stages
        i = min(int(s * m), m - 1)
        tau = s * m - i
        hv, dh = smoothstep(tau)
        f0, f1 = self.stages[i], self.stages[i + 1]
        th = (1 - hv) * f0 + hv * f1
        return th, m * dh * (f1 - f0)

    def tail(self, s: float):
        """Full-length tail node values (F_s, G_s, Fdot_s) and theta_s, dtheta_s."""
        th, dth = self.angle(s)
        dt = self.dt
        # increments relative to chi keep F_s <= F_0 exact in floating point
        # product forms avoid cancellation and keep the sign exact
        half_sum = 0.5 * (th + self.theta0)
        half_diff = np.sin(0.5 * (th - self.theta0))
        dF = -2.0 * np.sin(half_sum) * half_diff * dt
        dG = 2.0 * np.cos(half_sum) * half_diff * dt
        F = self.tail_F - np.concatenate([[0.0], np.cumsum(dF)])
        G = self.tail_G + np.concatenate([[0.0], np.cumsum(dG)])
        Fdot = np.concatenate([[0.0], np.cumsum(np.sin(th) * dth * dt)])
        return F, G, Fdot, th, dth

    def free_length(self, s: float) -> float:
        return self.curve(s)[0].b

    def curve(self, s: float):
        """omega_s on [z, L*_s] and Fdot_s at its nodes."""
        F, G, Fdot, th, dth = self.tail(s)
        t = self.tail_t
        hit = np.flatnonzero(F[1:] <= 0.0)
        e = int(hit[0]) if hit.size else F.size - 2
        if F[e + 1] == 0.0 or not hit.size:
            Ls, last = t[e + 1], (0.0, G[e + 1], Fdot[e + 1])
        else:
            c = math.cos(th[e])
            x = F[e] / c
            Ls = t[e] + x
            last = (0.0, G[e] + math.sin(th[e]) * x, Fdot[e] + math.sin(th[e]) * dth[e] * x)
            if not Ls > t[e]:
                Ls, last = t[e + 1], (0.0, G[e + 1], Fdot[e + 1])
        tt = np.concatenate([t[: e + 1], [Ls]])
        FF = np.concatenate([F[: e + 1], [last[0]]])
        GG = np.concatenate([G[: e + 1], [last[1]]])
        DD = np.concatenate([Fdot[: e + 1], [last[2]]])
        pt = self.prefix_t[:-1]
        full_t = np.concatenate([pt, tt])
        full_F = np.concatenate([self.R - pt, FF])
        full_G = np.concatenate([np.zeros_like(pt), GG])
        full_D = np.concatenate([np.zeros_like(pt), DD])
        meta = {"stage": "omega_s", "s": float(s)}
        return MeridianCurve(full_t, full_F, full_G, meta), full_D, e

    def check(self, s: float, tol: float = 1e-12) -> None:
        """Assert unit speed, Fdot <= 0 and transversality at L*_s."""
        F, G, Fdot, th, dth = self.tail(s)
        dt = self.dt
        speed = np.hypot(np.diff(F), np.diff(G)) / dt
        bad = np.flatnonzero(np.abs(speed - 1.0) > 1e-9)
        if bad.size:
            raise HomotopyParameterError("unit speed lost; try smaller eps/delta", s,
                                         float(self.tail_t[bad[0]]))
        bad = np.flatnonzero(Fdot > tol * self.R)
        if bad.size:
            raise HomotopyParameterError("F_s increases in s; try smaller eps/delta", s,
                                         float(self.tail_t[bad[0]]))
        curve, _, e = self.curve(s)
        if not -math.cos(th[e]) < -tol:
            raise HomotopyParameterError("curve meets the axis tangentially; try smaller eps/delta",
                                         s, float(curve.b))


def largest_root(t, phi, rtol: float = 1e-12) -> float:
    """Largest interior sign change of nodal values, located linearly; t[0] if none."""
    phi = np.asarray(phi, dtype=float)
    scale = np.max(np.abs(phi))
    idx = np.flatnonzero(np.abs(phi) > rtol * scale)
    sig = np.sign(phi[idx])
    ch = np.flatnonzero(sig[1:] != sig[:-1])
    if not ch.size:
        return float(t[0])
    i, j = idx[ch[-1]], idx[ch[-1] + 1]
    if j > i + 1:
        return float(t[i + 1])
    return float(t[i] + phi[i] / (phi[i] - phi[j]) * (t[j] - t[i]))


def unroll_homotopy(chi: MeridianCurve, P: float, params: HomotopyParams | None = None,
                    z: float = 0.0, check: bool = True) -> Homotopy:
    """Build the angle homotopy of the tail of chi on [P, L*].

    ``z`` is the left end of the straight piece kept in front of the tail.
    With ``check`` the invariants are asserted on the s-grid.
    """
    params = params or HomotopyParams()
    R = chi.boundary_radius
    c = chi.with_nodes([P, z], rtol=1e-9)
    iP = int(np.argmin(np.abs(c.t - P)))
    mu = float(c.F[iP])
    if abs(mu - (R - P)) > 1e-9 * R or abs(c.G[iP]) > 1e-9 * R:
        raise ParameterDomainError("chi(P) must equal (R - P, 0)")
    if not 0.0 <= z < P:
        raise ParameterDomainError("need 0 <= z < P")
    tt, tF, tG = c.t[iP:], c.F[iP:], c.G[iP:]
    dF, dG = np.diff(tF), np.diff(tG)
    if np.any(dG < -1e-12 * R):
        raise ParameterDomainError("chi must have non-decreasing G on its tail")
    dt = np.diff(tt)
    if np.max(np.abs(np.hypot(dF, dG) / dt - 1.0)) > 1e-9:
        raise ParameterDomainError("chi tail must be unit speed")
    theta0 = np.arctan2(np.maximum(dG, 0.0), -dF)
    iz = int(np.argmin(np.abs(c.t - z)))
    hom = Homotopy(mu, R, P, float(c.t[iz]), c.t[iz:iP + 1].copy(), tt.copy(), tF.copy(),
                   tG.copy(), theta0, _angle_stages(theta0, params), params)
    if check:
        for s in params.s_grid:
            hom.check(float(s))
    return hom


@dataclass
class HomotopyTrace:
    homotopy: Homotopy
    s_grid: np.ndarray
    lambdas: np.ndarray
    L_star: np.ndarray
    phis: list = field(default_factory=list)
    dini: np.ndarray | None = None
    K: int = 1
    error: Exception | None = None

    @property
    def max_jump(self) -> float:
        lam = self.lambdas[np.isfinite(self.lambdas)]
        return float(np.max(np.abs(np.diff(lam)))) if lam.size > 1 else 0.0

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.lambdas) >= -1e-10 * np.abs(self.lambdas[1:])))

    def to_rows(self):
        d = self.dini if self.dini is not None else np.full(self.s_grid.size, np.nan)
        return [{"s": float(s), "L_star": float(L), "lambda": float(l), "dini": float(x)}
                for s, L, l, x in zip(self.s_grid, self.L_star, self.lambdas, d)]


def _first_pair(curve, K):
    return solve_modes(assemble(curve, K), 1)[0]


def trace_eigenvalue(hom: Homotopy, K: int, s_grid=None) -> HomotopyTrace:
    """lambda_{K,1}(omega_s) on [z, L*_s] for every s in the grid.

    On a solver failure the trace comes back partially filled (NaN for
    the missing samples) with ``error`` set.
    """
    if K < 1:
        raise ParameterDomainError("the trace needs K >= 1")
    s_grid = hom.params.s_grid if s_grid is None else np.asarray(s_grid, dtype=float)
    lam = np.full(s_grid.size, np.nan)
    Ls = np.full(s_grid.size, np.nan)
    phis = [None] * s_grid.size

    def one(i):
        curve, _, _ = hom.curve(float(s_grid[i]))
        return i, curve.b, _first_pair(curve, K)

    err = None
    try:
        for i, b, pair in pmap(one, range(s_grid.size)):
            lam[i], Ls[i], phis[i] = pair.lam, b, pair.phi
    except Exception as exc:  # noqa: BLE001 - recorded on the partial trace
        err = exc
    return HomotopyTrace(hom, s_grid, lam, Ls, phis, None, K, err)


@dataclass
class DiniResult:
    value: float
    lam: float
    reliable: bool
    sigma: float


def dini_derivative(hom: Homotopy, sigma: float, K: int, Lambda: float | None = None,
                    phi=None, strict: bool = False) -> DiniResult:
    """Left derivative in s of the frozen-eigenfunction quotient at sigma.

    value = int (phi'^2 - K^2 phi^2 / F^2 - lambda phi^2) Fdot / int phi^2 F
    over [z, L*_sigma]; Fdot vanishes on the straight piece.  With ``strict``
    a lambda at or below ``Lambda`` raises HypothesisViolation (the value is
    attached as ``exc.result``).
    """
    if K < 1:
        raise ParameterDomainError("the Dini derivative needs K >= 1")
    curve, Fdot, _ = hom.curve(float(sigma))
    prob = assemble(curve, K)
    if phi is None:
        pair = solve_modes(prob, 1)[0]
        phi, lam = pair.phi, pair.lam
    else:
        phi = np.asarray(phi, dtype=float)
        lam = prob.energy(phi) / prob.norm2(phi)
    t, F = curve.t, curve.F
    dphi = np.diff(phi) / np.diff(t)

    n = t.size - 1
    pot = np.zeros(n)
    mass = np.zeros(n)
    grad = np.zeros(n)
    for x, w in zip(_GL_X, _GL_W):
        p = (1 - x) * phi[:-1] + x * phi[1:]
        f = (1 - x) * F[:-1] + x * F[1:]
        fd = (1 - x) * Fdot[:-1] + x * Fdot[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(f > 0, p / np.where(f > 0, f, 1.0), 0.0)
        pot += w * K * K * r * r * fd
        mass += w * p * p * fd
        grad += w * fd
    h = np.diff(t)
    num = float(np.sum(h * (dphi**2 * grad - pot - lam * mass)))
    den = prob.norm2(phi)
    value = num / den
    reliable = Lambda is None or lam > Lambda
    res = DiniResult(value, float(lam), bool(reliable), float(sigma))
    if strict and not reliable:
        exc = HypothesisViolation(f"lambda={lam} is not above Lambda={Lambda}")
        exc.result = res
        raise exc
    return res


def frozen_quotient(hom: Homotopy, s: float, sigma: float, phi, K: int) -> float:
    """xi(s): Rayleigh quotient of phi_sigma on the nodes of omega_sigma with F_s."""
    base, _, _ = hom.curve(float(sigma))
    F, G, _, _, _ = hom.tail(float(s))
    tF = np.interp(base.t, hom.tail_t, F)
    tG = np.interp(base.t, hom.tail_t, G)
    on_tail = base.t >= hom.P
    Fs = np.where(on_tail, tF, base.F)
    Gs = np.where(on_tail, tG, base.G)
    Fs = np.array(Fs)
    Fs[-1] = max(Fs[-1], 0.0)
    e, m = quadratic_forms(MeridianCurve(base.t, Fs, Gs, {}), K, phi)
    return e / m


@dataclass
class BoundReport:
    ok: bool
    skipped: bool
    reasons: list
    max_value: float
    sup_dphi: float
    sup_phi_over_F: float
    last_node: float
    lam: float
    tolerance: float


def efes_bound_check(curve: MeridianCurve, K: int, P: float, Lambda: float | None = None,
                     tol: float = 1e-8) -> BoundReport:
    """Pointwise bound F^2 phi'^2 - K^2 phi^2 <= 0 on [P, Q) for phi = phi_{K,1}.

    ``curve`` runs from z to the axis point Q.  Evaluated at element
    midpoints, where the P1 derivative is exact.  Hypothesis failures are
    reported and the check is skipped.
    """
    if K < 1:
        raise ParameterDomainError("the pointwise bound needs K >= 1")
    R = curve.F[0] + (curve.t[0])
    reasons = []
    sel = curve.t <= P * (1 + 1e-14)
    if np.max(np.abs(curve.F[sel] - (R - curve.t[sel]))) > 1e-9 * R or np.max(np.abs(curve.G[sel])) > 1e-9 * R:
        reasons.append("not straight on [z, P]")
    tail = curve.t[:-1] >= P * (1 - 1e-14)
    sp = curve.element_speed[tail]
    if sp.size and np.max(np.abs(sp - 1)) > 1e-9:
        reasons.append("not unit speed on (P, Q)")
    if curve.F[-1] != 0.0:
        reasons.append("F(Q) != 0")
    if not curve.endpoint_slope < 0:
        reasons.append("F'(Q) is not negative")
    pair = solve_modes(assemble(curve, K), 1)[0]
    if Lambda is not None and not pair.lam > Lambda:
        reasons.append(f"lambda={pair.lam} is not above Lambda={Lambda}")
    phi, t, F = pair.phi, curve.t, curve.F
    dphi = np.diff(phi) / np.diff(t)
    pm = 0.5 * (phi[:-1] + phi[1:])
    Fm = 0.5 * (F[:-1] + F[1:])
    vals = Fm**2 * dphi**2 - K * K * pm**2
    norm2 = 1.0  # phi is normalized in the weighted mass form
    mv = float(np.max(vals[tail])) if np.any(tail) else -math.inf
    pos = F > 0
    report = BoundReport(
        ok=bool(not reasons and mv <= tol * norm2),
        skipped=bool(reasons),
        reasons=reasons,
        max_value=mv,
        sup_dphi=float(np.max(np.abs(dphi))),
        sup_phi_over_F=float(np.max(np.abs(phi[pos] / F[pos]))),
        last_node=float(abs(phi[-2]) / np.max(np.abs(phi))),
        lam=float(pair.lam),
        tolerance=tol * norm2,
    )
    return report
