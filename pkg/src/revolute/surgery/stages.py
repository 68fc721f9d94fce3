"""Curve surgery: projection, sunrise monotonization, reparametrization, reflection.

Every stage maps a piecewise-linear meridian to another one.  Nodes are
inserted only where a stage needs a breakpoint inside an element (the level
crossing A, the end of a sunrise interval), so curves that a stage leaves
unchanged keep their grid exactly.
"""

from __future__ import annotations

import numpy as np

from ..errors import PipelineOrderError
from ..meridian import ZERO_SPEED_TOL, MeridianCurve, collapse_arclength
from ..slp import eigenvalues

__all__ = [
    "find_A",
    "project_beta",
    "sunrise_gamma",
    "reparam_zeta",
    "reflect_chi",
    "stage_lambda",
    "straight_until",
]


def _tagged(curve: MeridianCurve, stage: str, t, F, G) -> MeridianCurve:
    meta = dict(curve.meta)
    meta["stage"] = stage
    return MeridianCurve(t, F, G, meta)


def find_A(alpha: MeridianCurve, mu: float) -> float:
    """First parameter where F reaches the level ``mu``.

    The crossing is located exactly on the piecewise-linear reconstruction.
    """
    F, t = alpha.F, alpha.t
    if not mu < F[0]:
        raise ValueError(f"level mu={mu} must be below F(a)={F[0]}")
    i = int(np.argmax(F <= mu))
    if F[i] > mu:
        raise ValueError("F never reaches the level mu")
    if F[i] == mu:
        return float(t[i])
    frac = (F[i - 1] - mu) / (F[i - 1] - F[i])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


SNAP_RTOL = 1e-9


def _ensure_node(curve: MeridianCurve, A: float, force: bool = False):
    """Insert A unless G is constant on its element; returns (curve, A).

    A point within SNAP_RTOL of an element length from a node is moved onto
    that node instead of creating a sliver element.
    """
    if A >= curve.b or np.any(curve.t == A):
        return curve, A
    i = int(np.searchsorted(curve.t, A))
    h = curve.t[i] - curve.t[i - 1]
    for j in (i - 1, i):
        if abs(curve.t[j] - A) <= SNAP_RTOL * h:
            return curve, float(curve.t[j])
    if curve.G[i] == curve.G[i - 1] and not force:
        return curve, A
    return curve.with_nodes([A], rtol=0.0), A


def project_beta(alpha: MeridianCurve, A: float) -> MeridianCurve:
    """Flatten the curve before A onto the axis direction.

    beta has the same F as alpha; beta' = (F', 0) on [0, A) and beta' =
    alpha' after A, with beta(0) = (R, 0).
    """
    if not alpha.a < A <= alpha.b:
        raise ValueError("A must lie in (a, b]")
    c, A = _ensure_node(alpha, A)
    GA = float(np.interp(A, c.t, c.G))
    G = np.where(c.t <= A, 0.0, c.G - GA)
    out = _tagged(c, "beta", c.t, c.F, G)
    return out


def sunrise_gamma(beta: MeridianCurve, A: float):
    """Replace F on [0, A] by its running minimum.

    Returns ``(gamma, V)`` where V is the list of maximal open parameter
    intervals on which the running minimum lies strictly below F_beta; F is
    constant on each of them.
    """
    c = beta
    upto = c.t <= A
    F = c.F
    m = np.minimum.accumulate(F[upto])
    if np.all(m == F[upto]):
        return _tagged(c, "gamma", c.t, c.F, c.G), []

    c, A = _ensure_node(c, A, force=True)
    # a running minimum breaks inside an element where F descends through it
    nA = int(np.count_nonzero(c.t <= A))
    F = c.F
    m = np.minimum.accumulate(F[:nA])
    e = np.arange(nA - 1)
    cross = (F[e] > m[e]) & (F[e + 1] < m[e])
    if np.any(cross):
        ei = e[cross]
        tc = c.t[ei] + (F[ei] - m[ei]) / (F[ei] - F[ei + 1]) * (c.t[ei + 1] - c.t[ei])
        c = c.with_nodes(tc, rtol=SNAP_RTOL)
        nA = int(np.count_nonzero(c.t <= A))
    F = c.F.copy()
    m = np.minimum.accumulate(F[:nA])
    Fg = F.copy()
    Fg[:nA] = m

    strict = np.zeros(F.size, dtype=bool)
    strict[:nA] = (F[:nA] - m) > 1e-14 * max(1.0, abs(F[0]))
    Fg[:nA] = np.where(strict[:nA], m, F[:nA])
    V = []
    i = 0
    while i < F.size:
        if strict[i]:
            j = i
            while j + 1 < F.size and strict[j + 1]:
                j += 1
            V.append((float(c.t[i - 1]), float(c.t[j + 1])))
            i = j + 1
        else:
            i += 1
    return _tagged(c, "gamma", c.t, Fg, c.G), V


def reparam_zeta(gamma: MeridianCurve) -> MeridianCurve:
    """Arclength reparametrization; zero-length pieces collapse to points."""
    z = collapse_arclength(gamma)
    t = z.t - z.t[0] + gamma.a
    return _tagged(z, "zeta", t, z.F, z.G)


def straight_until(curve: MeridianCurve, P: float, rtol: float = 1e-9) -> bool:
    """True when curve(t) = (R - t, 0) at every node t <= P."""
    R = curve.boundary_radius
    sel = curve.t <= P * (1 + 1e-14)
    dev = max(np.max(np.abs(curve.F[sel] - (R - (curve.t[sel] - curve.a)))),
              np.max(np.abs(curve.G[sel])))
    return bool(dev <= rtol * max(R, 1.0))


def reflect_chi(zeta: MeridianCurve, P: float) -> MeridianCurve:
    """Reflect every descending piece of G: chi' = (F', |G'|)."""
    if not straight_until(zeta, P):
        raise PipelineOrderError("reflect_chi needs zeta(t) = (R - t, 0) on [0, P]")
    sp = zeta.element_speed
    if np.max(np.abs(sp - 1.0)) > 1e-9:
        raise PipelineOrderError("reflect_chi needs a unit-speed curve")
    dG = np.abs(np.diff(zeta.G))
    G = zeta.G[0] + np.concatenate([[0.0], np.cumsum(dG)])
    return _tagged(zeta, "chi", zeta.t, zeta.F, G)


def stage_lambda(curve: MeridianCurve, K: int, N: int) -> float:
    """lambda_{K,N} of a possibly non-regular stage curve.

    Zero-speed elements force trial functions to be constant there, so the
    value equals that of the collapsed curve.
    """
    if np.any(curve.element_speed <= ZERO_SPEED_TOL):
        curve = collapse_arclength(curve)
    return float(eigenvalues(curve, K, N)[-1])
