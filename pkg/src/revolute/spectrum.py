"""Full Dirichlet spectrum of a surface of revolution and the disc comparison.

Each angular mode k >= 1 contributes its eigenvalues twice (cos and sin
of k*theta); k = 0 contributes once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _tridiag
from .bessel_ref import disc_spectrum
from .meridian import MeridianCurve, collapse_arclength
from .reports import SCHEMA_VERSION, rows_to_csv
from .slp import EIG_RTOL, assemble, count_below, eigenvalues

__all__ = [
    "SpectrumEntry",
    "SpectrumTable",
    "ComparisonReport",
    "enumerate_spectrum",
    "brute_force_spectrum",
    "compare_to_disc",
    "coarsen",
    "is_disc",
    "REPORT_COLUMNS",
]

REPORT_COLUMNS = ("j", "lambda_sigma", "lambda_disc", "margin", "k", "n")
TOLERANCE_FACTOR = 10.0


@dataclass(frozen=True, order=True)
class SpectrumEntry:
    lam: float
    k: int
    n: int

    @property
    def multiplicity(self) -> int:
        return 1 if self.k == 0 else 2


@dataclass
class SpectrumTable:
    entries: list
    J: int

    def expanded(self):
        """The first J eigenvalues with multiplicity, as SpectrumEntry objects."""
        out = []
        for e in self.entries:
            out.extend([e] * e.multiplicity)
        return out[: self.J]

    @property
    def values(self) -> np.ndarray:
        return np.array([e.lam for e in self.expanded()])

    def to_rows(self):
        return [{"j": j, "lambda": e.lam, "k": e.k, "n": e.n, "multiplicity": e.multiplicity}
                for j, e in enumerate(self.expanded(), start=1)]


def _select(cand, J):
    cand = sorted(cand)
    kept = []
    count = 0
    for e in cand:
        if count >= J:
            break
        kept.append(e)
        count += e.multiplicity
    return kept


def _threshold(cand, J):
    exp = []
    for e in sorted(cand):
        exp.extend([e.lam] * e.multiplicity)
        if len(exp) >= J:
            return exp[J - 1]
    return math.inf


def enumerate_spectrum(curve: MeridianCurve, J: int) -> SpectrumTable:
    """First J eigenvalues (with multiplicity) of the surface swept by ``curve``.

    Modes are added in increasing k until lambda_{k,1} exceeds the current
    J-th smallest candidate; lambda_{k,1} is non-decreasing in k, so no
    later mode can contribute.
    """
    if J < 1:
        raise ValueError("J must be at least 1")
    prob0 = assemble(curve, 0)
    n0 = min(J, prob0.size - 1)
    cand = [SpectrumEntry(float(l), 0, n) for n, l in enumerate(eigenvalues(curve, 0, n0), 1)]
    thresh = _threshold(cand, J)
    k = 1
    while True:
        prob = assemble(curve, k)
        pencil = prob.pencil()
        first = _tridiag.bisect_eigenvalues(*pencil, 1, rtol=EIG_RTOL)[0]
        if first > thresh:
            break
        m = count_below(prob, thresh * (1 + 1e-12)) if math.isfinite(thresh) else J
        m = max(1, min(m, prob.size - 1))
        vals = _tridiag.bisect_eigenvalues(*pencil, m, rtol=EIG_RTOL)
        cand.extend(SpectrumEntry(float(l), k, n) for n, l in enumerate(vals, 1))
        thresh = _threshold(cand, J)
        k += 1
    return SpectrumTable(_select(cand, J), J)


def brute_force_spectrum(curve: MeridianCurve, J: int, k_max: int, n_max: int) -> SpectrumTable:
    """Reference enumeration over every k <= k_max, n <= n_max."""
    cand = []
    for k in range(k_max + 1):
        vals = eigenvalues(curve, k, n_max)
        cand.extend(SpectrumEntry(float(l), k, n) for n, l in enumerate(vals, 1))
    return SpectrumTable(_select(cand, J), J)


def coarsen(curve: MeridianCurve) -> MeridianCurve:
    """Every other node, always keeping both endpoints."""
    idx = np.arange(0, curve.t.size, 2)
    if idx[-1] != curve.t.size - 1:
        idx = np.append(idx, curve.t.size - 1)
    return MeridianCurve(curve.t[idx], curve.F[idx], curve.G[idx], dict(curve.meta))


def is_disc(curve: MeridianCurve, rtol: float = 1e-10) -> bool:
    """True when the curve traces the flat disc meridian ``(R - s, 0)``."""
    R = curve.boundary_radius
    if np.max(np.abs(curve.G)) > rtol * R:
        return False
    s = collapse_arclength(curve)
    return bool(np.max(np.abs(s.F - (R - (s.t - s.a)))) <= rtol * R)


@dataclass
class ComparisonReport:
    R: float
    J: int
    rows: list
    verdict: str
    tolerance: list = field(default_factory=list)

    @property
    def margins(self) -> np.ndarray:
        return np.array([r["margin"] for r in self.rows])

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "R": self.R, "J": self.J,
                "verdict": self.verdict, "rows": self.rows}

    def to_csv(self) -> str:
        return rows_to_csv(self.rows, REPORT_COLUMNS)


def compare_to_disc(curve: MeridianCurve, J: int) -> ComparisonReport:
    """Compare the first J eigenvalues of the surface with the flat disc.

    Each surface eigenvalue gets a discretization error estimate from a
    two-grid comparison (the same (k, n) mode on the grid with every other
    node removed; P1 converges at second order, so the error is about a
    third of the difference).  A margin counts only beyond ten times that
    estimate.
    """
    R = curve.boundary_radius
    table = enumerate_spectrum(curve, J)
    coarse = coarsen(curve)
    err = {}
    for e in table.entries:
        if (e.k, e.n) not in err:
            lc = eigenvalues(coarse, e.k, e.n)[-1]
            err[(e.k, e.n)] = abs(lc - e.lam) / 3.0
    disc = disc_spectrum(R, J)
    rows = []
    tols = []
    for j, (e, d) in enumerate(zip(table.expanded(), disc), start=1):
        tol = TOLERANCE_FACTOR * err[(e.k, e.n)] + 1e-12 * e.lam
        tols.append(tol)
        rows.append({"j": j, "lambda_sigma": e.lam, "lambda_disc": d[0],
                     "margin": d[0] - e.lam, "k": e.k, "n": e.n, "tolerance": tol})
    margins = np.array([r["margin"] for r in rows])
    tol = np.array(tols)
    if np.all(margins > tol):
        verdict = "THEOREM_CONSISTENT"
    elif np.all(np.abs(margins) <= tol) and is_disc(curve):
        verdict = "DISC"
    else:
        verdict = "VIOLATION"
    return ComparisonReport(R, J, rows, verdict, tols)
