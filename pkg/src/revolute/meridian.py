"""Meridian curves of surfaces of revolution.

A meridian is a curve ``psi(t) = (F(t), G(t))`` in the half-plane ``F >= 0``
starting on the boundary circle at ``(R, 0)`` and ending on the axis
``F = 0``.  Curves are stored as samples on a strictly increasing parameter
grid and reconstructed piecewise linearly between nodes.  Curves produced by
:func:`build_family` additionally carry an exact evaluator so that
resampling does not accumulate polygon error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import GeometryError, ParameterDomainError, RevoluteError, SizeError

__all__ = [
    "MeridianCurve",
    "CurveFamily",
    "Check",
    "ValidationReport",
    "CurveParseError",
    "build_family",
    "family_from_seed",
    "validate",
    "resample_arclength",
    "collapse_arclength",
    "disc_curve",
    "segment_curve",
    "curve_from_json",
    "curve_to_json",
    "load_curve",
    "FAMILY_KINDS",
]

FAMILY_KINDS = ("disc", "spherical_cap", "cone", "bumped_disc", "sampled")

# F'(b) must be below this for the transversality check.
TRANSVERSALITY_TOL = -1e-6
# Element speeds at or below this count as zero (flat parameter intervals).
ZERO_SPEED_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class MeridianCurve:
    """Sampled meridian ``(F, G)`` on the grid ``t``.

    ``exact``, when present, maps parameter values to exact ``(F, G)`` and
    implies that ``t`` is an exact arclength parameter.
    """

    t: np.ndarray
    F: np.ndarray
    G: np.ndarray
    meta: dict = field(default_factory=dict)
    exact: Callable | None = None

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        F = np.array(self.F, dtype=float)
        G = np.array(self.G, dtype=float)
        if t.ndim != 1 or F.shape != t.shape or G.shape != t.shape:
            raise SizeError("t, F and G must be 1-D arrays of equal length")
        if t.size < 2:
            raise SizeError("a curve needs at least two samples")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(F)) and np.all(np.isfinite(G))):
            raise GeometryError("curve samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise GeometryError("parameter grid must be strictly increasing")
        for name, arr in (("t", t), ("F", F), ("G", G)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    # -- basic geometry -------------------------------------------------
    @property
    def grid(self):
        return self.t

    @property
    def a(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def n_elements(self) -> int:
        return self.t.size - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def chord(self) -> np.ndarray:
        """Euclidean length of each element."""
        return np.hypot(np.diff(self.F), np.diff(self.G))

    @property
    def element_speed(self) -> np.ndarray:
        """|psi'| on each element (constant for the linear reconstruction)."""
        return self.chord / self.h

    @property
    def speed(self) -> np.ndarray:
        """Per-node speed: mean of the adjacent element speeds."""
        es = self.element_speed
        out = np.empty(self.t.size)
        out[0] = es[0]
        out[-1] = es[-1]
        out[1:-1] = 0.5 * (es[:-1] + es[1:])
        return out

    @property
    def boundary_radius(self) -> float:
        return float(self.F[0])

    @property
    def length(self) -> float:
        """Total arclength; exact for family curves, polygonal otherwise."""
        if self.exact is not None:
            return self.b - self.a
        return float(self.chord.sum())

    @property
    def endpoint_slope(self) -> float:
        """One-sided derivative of F at b with respect to the parameter."""
        return float((self.F[-1] - self.F[-2]) / (self.t[-1] - self.t[-2]))

    def evaluate(self, tq):
        """Piecewise-linear reconstruction at parameter values ``tq``."""
        tq = np.asarray(tq, dtype=float)
        return np.interp(tq, self.t, self.F), np.interp(tq, self.t, self.G)

    def with_nodes(self, tq, rtol: float = 1e-12) -> "MeridianCurve":
        """Return the same polygon with extra nodes inserted at ``tq``.

        Points closer than ``rtol`` times the local element length to an
        existing node are dropped.
        """
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        tq = tq[(tq > self.a) & (tq < self.b)]
        if tq.size == 0:
            return self
        idx = np.clip(np.searchsorted(self.t, tq), 1, self.t.size - 1)
        hloc = self.t[idx] - self.t[idx - 1]
        near = (np.abs(tq - self.t[idx]) <= rtol * hloc) | (np.abs(tq - self.t[idx - 1]) <= rtol * hloc)
        tq = np.unique(tq[~near])
        if tq.size == 0:
            return self
        Fq, Gq = self.evaluate(tq)
        t = np.concatenate([self.t, tq])
        order = np.argsort(t, kind="stable")
        return MeridianCurve(
            t[order],
            np.concatenate([self.F, Fq])[order],
            np.concatenate([self.G, Gq])[order],
            dict(self.meta),
            None,
        )

    def restrict(self, t0: float, t1: float) -> "MeridianCurve":
        """The sub-curve on ``[t0, t1]`` with both endpoints as nodes."""
        if not (self.a <= t0 < t1 <= self.b):
            raise ParameterDomainError(f"[{t0}, {t1}] is not inside [{self.a}, {self.b}]")
        c = self.with_nodes([t0, t1])
        i0 = int(np.argmin(np.abs(c.t - t0)))
        i1 = int(np.argmin(np.abs(c.t - t1)))
        return MeridianCurve(c.t[i0:i1 + 1], c.F[i0:i1 + 1], c.G[i0:i1 + 1], dict(self.meta))

    def max_deviation(self, other: "MeridianCurve") -> float:
        """Sup-norm distance between node values on identical grids."""
        if other.t.shape != self.t.shape:
            return math.inf
        return float(max(np.max(np.abs(self.t - other.t)),
                         np.max(np.abs(self.F - other.F)),
                         np.max(np.abs(self.G - other.G))))

    def digest(self) -> dict:
        return {
            "length": self.length,
            "endpoint_slope": self.endpoint_slope,
            "nodes": int(self.t.size),
            "a": self.a,
            "b": self.b,
        }


@dataclass(frozen=True)
class CurveFamily:
    kind: str
    params: dict = field(default_factory=dict)


# -- grids --------------------------------------------------------------

def _grid(length: float, samples: int, grading: str) -> np.ndarray:
    if samples < 2:
        raise SizeError("samples must be at least 2")
    if grading == "uniform":
        return np.linspace(0.0, length, samples)
    if grading != "geometric":
        raise ParameterDomainError(f"unknown grading {grading!r}")
    # 10% of the nodes in the last 1% of the length, shrinking toward b.
    n_layer = max(2, int(math.ceil(0.1 * samples)))
    n_bulk = samples - n_layer
    if n_bulk < 2:
        return np.linspace(0.0, length, samples)
    bulk = np.linspace(0.0, 0.99 * length, n_bulk + 1)
    steps = 0.9 ** (10.0 * np.arange(n_layer - 1) / max(n_layer - 2, 1))
    steps *= 0.01 * length / steps.sum()
    layer = 0.99 * length + np.cumsum(steps)
    layer[-1] = length
    return np.concatenate([bulk, layer])


# -- exact arclength parametrization of a generic profile ---------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - x[m] ** 2))
    return out


def _dbump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 1
    xm = x[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - xm ** 2)) * (-2.0 * xm / (1.0 - xm ** 2) ** 2)
    return out


class _ProfileArclength:
    """Arclength reparametrization of ``u -> (F(u), G(u))`` with ``G = int g``.

    Integrals are tabulated panel-wise with 16-point Gauss-Legendre and the
    inverse map ``t -> u`` is found by safeguarded Newton iteration.
    """

    def __init__(self, F, dF, g, u_end, panels=2048):
        self.F, self.dF, self.g = F, dF, g
        self.edges = np.linspace(0.0, u_end, panels + 1)
        lo, hi = self.edges[:-1], self.edges[1:]
        s_pan, g_pan = self._panel_integrals(lo, hi)
        self.S = np.concatenate([[0.0], np.cumsum(s_pan)])
        self.Gtab = np.concatenate([[0.0], np.cumsum(g_pan)])
        self.total = float(self.S[-1])

    def speed(self, u):
        return np.hypot(self.dF(u), self.g(u))

    def _panel_integrals(self, lo, hi):
        mid = 0.5 * (hi + lo)[:, None]
        half = 0.5 * (hi - lo)[:, None]
        u = mid + half * _GL_X[None, :]
        w = half * _GL_W[None, :]
        return (w * self.speed(u)).sum(axis=1), (w * self.g(u)).sum(axis=1)

    def _integrals_to(self, u):
        k = np.clip(np.searchsorted(self.edges, u, side="right") - 1, 0, self.edges.size - 2)
        ds, dg = self._panel_integrals(self.edges[k], u)
        return self.S[k] + ds, self.Gtab[k] + dg

    def __call__(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.total)
        u = np.interp(t, self.S, self.edges)
        for _ in range(30):
            s, _g = self._integrals_to(u)
            step = (s - t) / self.speed(u)
            u_new = np.clip(u - step, self.edges[0], self.edges[-1])
            done = np.max(np.abs(u_new - u)) < 1e-15 * max(1.0, self.edges[-1])
            u = u_new
            if done:
                break
        _s, G = self._integrals_to(u)
        return self.F(u), G


# -- families -------------------------------------------------------------

def _require(cond, msg):
    if not cond:
        raise ParameterDomainError(msg)


def family_from_seed(kind: str, seed: int, R: float = 1.0) -> CurveFamily:
    """Random admissible parameters for ``bumped_disc`` or ``spherical_cap``."""
    rng = np.random.default_rng(seed)
    if kind == "bumped_disc":
        center = float(rng.uniform(0.25, 0.75)) * R
        width = float(rng.uniform(0.1, 0.9)) * min(center, R - center)
        amp = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 0.6))
        return CurveFamily("bumped_disc", {"R": R, "amplitude": amp, "center": center, "width": width})
    if kind == "spherical_cap":
        angle = float(rng.uniform(0.3, 2.8))
        return CurveFamily("spherical_cap", {"radius": R / math.sin(angle), "angle": angle})
    raise ParameterDomainError(f"no random parameters for family {kind!r}")


def _family_profile(family: CurveFamily):
    """Return (length, exact evaluator, normalized params)."""
    kind = family.kind
    p = dict(family.params)
    if kind in ("bumped_disc", "spherical_cap") and "seed" in p:
        seeded = family_from_seed(kind, int(p.pop("seed")), float(p.get("R", 1.0)))
        p = {**seeded.params, **p}

    if kind == "disc":
        R = float(p.get("R", 1.0))
        _require(R > 0, "disc radius R must be positive")
        return R, (lambda t: (R - t, np.zeros_like(t))), {"R": R}

    if kind == "spherical_cap":
        rho = float(p.get("radius", 1.0))
        ang = float(p.get("angle", math.pi / 2))
        _require(rho > 0, "cap radius must be positive")
        _require(0 < ang < math.pi, "cap angle must lie in (0, pi)")

        def ev(t):
            phi = ang - t / rho
            return rho * np.sin(phi), rho * (np.cos(phi) - math.cos(ang))

        return rho * ang, ev, {"radius": rho, "angle": ang, "R": rho * math.sin(ang)}

    if kind == "cone":
        R = float(p.get("R", 1.0))
        L = float(p.get("L", 2.0 * R))
        _require(R > 0, "cone radius R must be positive")
        _require(L >= R, "cone slant L must be at least R")
        rise = math.sqrt(max(0.0, 1.0 - (R / L) ** 2))
        return L, (lambda t: (R - t * (R / L), t * rise)), {"R": R, "L": L}

    if kind == "bumped_disc":
        R = float(p.get("R", 1.0))
        amp = float(p.get("amplitude", 0.2))
        c = float(p.get("center", 0.5 * R))
        w = float(p.get("width", 0.25 * R))
        radial = float(p.get("radial", 0.0))
        _require(R > 0, "R must be positive")
        _require(w > 0, "bump width must be positive")
        _require(c - w >= 0 and c + w <= R, "bump support must lie in [0, R]")

        def F(u):
            return R - u + radial * _bump((u - c) / w)

        def dF(u):
            return -1.0 + (radial / w) * _dbump((u - c) / w)

        def g(u):
            return amp * _bump((u - c) / w)

        probe = np.linspace(0.0, R, 20001)[:-1]
        if np.any(F(probe) <= 0):
            raise GeometryError("bump drives F to zero or below in the interior")
        if np.any(np.hypot(dF(probe), g(probe)) <= 1e-8):
            raise GeometryError("bump makes the profile singular")
        prof = _ProfileArclength(F, dF, g, R)
        params = {"R": R, "amplitude": amp, "center": c, "width": w, "radial": radial}
        return prof.total, prof, params

    if kind == "sampled":
        raise ParameterDomainError("sampled curves are loaded, not generated")
    raise ParameterDomainError(f"unknown curve family {kind!r}")


def build_family(family: CurveFamily, samples: int = 4097, grading: str = "uniform") -> MeridianCurve:
    """Sample a family member by arclength on ``samples`` nodes."""
    if samples < 3:
        raise SizeError("samples must be at least 3")
    L, ev, params = _family_profile(family)
    t = _grid(L, samples, grading)
    F, G = ev(t)
    F = np.array(F, dtype=float)
    G = np.array(G, dtype=float)
    F[-1] = 0.0
    G[0] = 0.0
    if np.any(F[:-1] <= 0):
        raise GeometryError("generated curve touches the axis before its end")
    meta = {"family": family.kind, "params": params, "arclength": True, "grading": grading}
    return MeridianCurve(t, F, G, meta, _clamped(ev, L))


def _clamped(ev, L):
    def exact(t):
        t = np.asarray(t, dtype=float)
        F, G = ev(t)
        F = np.where(np.isclose(t, L, rtol=0, atol=1e-14 * max(L, 1.0)), 0.0, F)
        return np.asarray(F, dtype=float), np.asarray(G, dtype=float)
    return exact


def disc_curve(R: float = 1.0, elements: int = 4096) -> MeridianCurve:
    """The flat disc meridian ``(R - t, 0)`` on a uniform grid."""
    return build_family(CurveFamily("disc", {"R": R}), elements + 1)


def segment_curve(R: float, t0: float, t1: float, elements: int) -> MeridianCurve:
    """Straight piece ``(R - t, 0)`` of the disc meridian on ``[t0, t1]``."""
    if not t0 < t1:
        raise ParameterDomainError("segment needs t0 < t1")
    t = np.linspace(t0, t1, elements + 1)
    F = R - t
    if math.isclose(t1, R, rel_tol=0, abs_tol=1e-15):
        F[-1] = 0.0
    return MeridianCurve(t, F, np.zeros_like(t), {"family": "segment", "R": R})


# -- validation -------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list
    c: float
    endpoint_slope: float

    def __getitem__(self, name) -> Check:
        for ch in self.checks:
            if ch.name == name:
                return ch
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(ch.passed for ch in self.checks)

    @property
    def lipschitz_ok(self) -> bool:
        return all(ch.passed for ch in self.checks if ch.name not in ("regularity", "transversality"))

    def failed(self):
        return [ch.name for ch in self.checks if not ch.passed]


def validate(curve: MeridianCurve, atol: float = 1e-12) -> ValidationReport:
    """Check the meridian invariants; never raises."""
    F, G, t = curve.F, curve.G, curve.t
    scale = max(abs(curve.boundary_radius), 1.0)
    checks = []

    bad = np.flatnonzero(F[:-1] <= 0)
    checks.append(Check("positive_interior", bad.size == 0, int(bad[0]) if bad.size else None,
                        "F > 0 before the last node"))
    checks.append(Check("axis_closure", abs(F[-1]) <= atol * scale,
                        None if abs(F[-1]) <= atol * scale else curve.n_elements,
                        f"F(b) = {F[-1]:.3e}"))
    start_ok = abs(G[0]) <= atol * scale and F[0] > 0
    checks.append(Check("start_point", bool(start_ok), None if start_ok else 0,
                        f"psi(a) = ({F[0]:.6g}, {G[0]:.3e})"))

    es = curve.element_speed
    checks.append(Check("lipschitz", bool(np.all(np.isfinite(es))), None, f"max speed {es.max():.6g}"))
    flat = np.flatnonzero(es <= ZERO_SPEED_TOL)
    c = float(es.min())
    if flat.size:
        e0 = int(flat[0])
        e1 = e0
        while e1 + 1 < es.size and es[e1 + 1] <= ZERO_SPEED_TOL:
            e1 += 1
        checks.append(Check("regularity", False, (float(t[e0]), float(t[e1 + 1])),
                            "zero-speed parameter interval"))
    else:
        checks.append(Check("regularity", True, None, f"c = {c:.6g}"))

    slope = curve.endpoint_slope
    checks.append(Check("transversality", slope < TRANSVERSALITY_TOL,
                        None if slope < TRANSVERSALITY_TOL else curve.n_elements,
                        f"F'(b) = {slope:.6g}"))
    return ValidationReport(checks, c, slope)


# -- reparametrization ------------------------------------------------------

def collapse_arclength(curve: MeridianCurve) -> MeridianCurve:
    """Reparametrize by cumulative chord length on the existing nodes.

    Zero-length elements are removed, so flat parameter intervals collapse to
    single points.  Node positions are unchanged.
    """
    ch = curve.chord
    keep = np.concatenate([[True], ch > ZERO_SPEED_TOL * np.maximum(curve.h, 1e-300)])
    s = curve.a + np.concatenate([[0.0], np.cumsum(ch)])
    s = s[keep]
    if s[-1] - s[0] <= 0:
        raise GeometryError("curve has zero length")
    meta = dict(curve.meta)
    meta["arclength"] = True
    return MeridianCurve(s, curve.F[keep], curve.G[keep], meta)


def resample_arclength(curve: MeridianCurve, samples: int) -> MeridianCurve:
    """Sample ``curve`` at ``samples`` points equally spaced in arclength."""
    if samples < 2:
        raise SizeError("samples must be at least 2")
    if curve.exact is not None and curve.meta.get("arclength"):
        t = np.linspace(curve.a, curve.b, samples)
        F, G = curve.exact(t)
        return MeridianCurve(t, F, G, dict(curve.meta), curve.exact)
    if curve.length <= 0:
        raise GeometryError("curve has zero length")
    base = collapse_arclength(curve)
    t = np.linspace(base.a, base.b, samples)
    F, G = base.evaluate(t)
    if abs(curve.F[-1]) == 0.0:
        F[-1] = 0.0
    return MeridianCurve(t, F, G, dict(base.meta))


# -- JSON -------------------------------------------------------------------

class CurveParseError(RevoluteError, ValueError):
    """Malformed curve description; message names the line or field."""


def curve_from_json(obj) -> MeridianCurve:
    if not isinstance(obj, dict):
        raise CurveParseError("curve description must be a JSON object")
    kind = obj.get("type")
    if kind == "sampled":
        arrs = {}
        for key in ("t", "F", "G"):
            if key not in obj:
                raise CurveParseError(f"missing field {key!r}")
            try:
                arrs[key] = np.asarray(obj[key], dtype=float)
            except (TypeError, ValueError) as exc:
                raise CurveParseError(f"field {key!r} is not an array of numbers") from exc
            if arrs[key].ndim != 1:
                raise CurveParseError(f"field {key!r} must be a flat array")
        if not (arrs["t"].size == arrs["F"].size == arrs["G"].size):
            raise CurveParseError("fields 't', 'F', 'G' must have equal length")
        if np.any(np.diff(arrs["t"]) <= 0):
            raise CurveParseError("field 't' must be strictly increasing")
        return MeridianCurve(arrs["t"], arrs["F"], arrs["G"], {"family": "sampled"})
    if kind == "family":
        if "kind" not in obj:
            raise CurveParseError("missing field 'kind'")
        params = obj.get("params", {})
        if not isinstance(params, dict):
            raise CurveParseError("field 'params' must be an object")
        samples = obj.get("samples", 4097)
        if not isinstance(samples, int) or isinstance(samples, bool):
            raise CurveParseError("field 'samples' must be an integer")
        return build_family(CurveFamily(obj["kind"], params), samples)
    raise CurveParseError(f"field 'type' must be 'sampled' or 'family', got {kind!r}")


def curve_to_json(curve: MeridianCurve) -> dict:
    return {"type": "sampled", "t": curve.t.tolist(), "F": curve.F.tolist(), "G": curve.G.tolist()}


def load_curve(path) -> MeridianCurve:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return curve_from_json(obj)
