"""The full surgery chain alpha -> beta -> gamma -> zeta -> chi -> omega."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bessel_ref import compute_mu, disc_eigenvalue, largest_disc_root
from ..errors import RevoluteError, StageError
from ..meridian import ZERO_SPEED_TOL, MeridianCurve, collapse_arclength, disc_curve
from ..reports import SCHEMA_VERSION, rows_to_csv
from ..slp import assemble, mixed_lambda, solve_modes
from ..spectrum import is_disc
from .homotopy import (
    HomotopyParams,
    HomotopyTrace,
    dini_derivative,
    efes_bound_check,
    largest_root,
    trace_eigenvalue,
    unroll_homotopy,
)
from .stages import find_A, project_beta, reflect_chi, reparam_zeta, stage_lambda, sunrise_gamma

__all__ = ["SurgeryContext", "PipelineReport", "run_pipeline", "TRACE_COLUMNS"]

TRACE_COLUMNS = ("s", "L_star", "lambda", "dini")
STAGE_ORDER = ("alpha", "beta", "gamma", "zeta", "chi")


@dataclass
class SurgeryContext:
    K: int
    N: int
    R: float
    mu: float
    P: float
    A: float
    stages: dict = field(default_factory=dict)
    stage_lambdas: dict = field(default_factory=dict)
    V: list = field(default_factory=list)


@dataclass
class PipelineReport:
    context: SurgeryContext
    omega_lambda: float
    omega_lambda_bessel: float
    flags: dict
    Lambda: float | None = None
    z0: float | None = None
    z: float | None = None
    trace: HomotopyTrace | None = None
    bounds: list = field(default_factory=list)

    @property
    def stage_lambdas(self) -> dict:
        return self.context.stage_lambdas

    def to_json(self) -> dict:
        ctx = self.context
        out = {
            "schema_version": SCHEMA_VERSION,
            "K": ctx.K, "N": ctx.N, "R": ctx.R,
            "mu": ctx.mu, "P": ctx.P, "A": ctx.A,
            "sunrise_intervals": [list(v) for v in ctx.V],
            "stages": {name: {"digest": c.digest(), "lambda": ctx.stage_lambdas.get(name)}
                       for name, c in ctx.stages.items()},
            "omega": {"lambda_fem": self.omega_lambda, "lambda_bessel": self.omega_lambda_bessel},
            "Lambda": self.Lambda, "z0": self.z0, "z": self.z,
            "flags": self.flags,
        }
        if self.trace is not None:
            tr = self.trace
            out["trace"] = {
                "s": tr.s_grid, "L_star": tr.L_star, "lambda": tr.lambdas,
                "dini": tr.dini if tr.dini is not None else [],
                "max_jump": tr.max_jump,
            }
            out["pointwise_bound_max"] = max((b.max_value for b in self.bounds), default=None)
        return out

    def to_csv(self) -> str:
        if self.trace is None:
            return rows_to_csv([], TRACE_COLUMNS)
        return rows_to_csv(self.trace.to_rows(), TRACE_COLUMNS)


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except RevoluteError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, ArithmeticError) as exc:
        raise StageError(name, exc) from exc


def _prepare(alpha: MeridianCurve) -> MeridianCurve:
    if np.any(alpha.element_speed <= ZERO_SPEED_TOL):
        return collapse_arclength(alpha)
    return alpha


def run_pipeline(alpha: MeridianCurve, K: int, N: int, params: HomotopyParams | None = None,
                 trace: bool = True) -> PipelineReport:
    """Run every surgery stage and report lambda_{K,N} along the chain.

    For K >= 1 the reflected curve is unrolled and lambda_{K,1} is tracked
    along the homotopy on [z, L*_s], where z is the largest root of the
    chi-eigenfunction phi_{K,N}.
    """
    if K < 0 or N < 1:
        raise StageError("setup", ValueError("need K >= 0 and N >= 1"))
    params = params or HomotopyParams()
    alpha = _stage("alpha", _prepare, alpha)
    R = alpha.boundary_radius
    if K == 0:
        mu, P = 0.0, R
        A = float(alpha.b)
    else:
        mu, P = _stage("mu", compute_mu, K, N, R)
        A = _stage("A", find_A, alpha, mu)
    beta = _stage("beta", project_beta, alpha, A)
    gamma, V = _stage("gamma", sunrise_gamma, beta, A)
    zeta = _stage("zeta", reparam_zeta, gamma)
    ctx = SurgeryContext(K, N, R, mu, P, A, {"alpha": alpha, "beta": beta, "gamma": gamma,
                                             "zeta": zeta}, {}, V)
    if K >= 1:
        ctx.stages["chi"] = _stage("chi", reflect_chi, zeta, P)
    for name, c in ctx.stages.items():
        ctx.stage_lambdas[name] = _stage(name, stage_lambda, c, K, N)

    omega = disc_curve(R, alpha.n_elements)
    lam_w = _stage("omega", stage_lambda, omega, K, N)
    lam_wb = disc_eigenvalue(R, K, N)
    lam = ctx.stage_lambdas
    chain = [lam[n] for n in STAGE_ORDER if n in lam] + [lam_w]
    tol = 1e-8 * lam_w
    disc_input = is_disc(alpha)
    flags = {
        "is_disc": disc_input,
        "chain_ordered": bool(all(chain[i] <= chain[i + 1] + tol for i in range(len(chain) - 1))),
        "theorem_consistent": bool(lam["alpha"] < lam_w - tol or (disc_input and abs(lam["alpha"] - lam_w) <= tol)),
        "hypothesis_alpha_ge_omega": bool(lam["alpha"] >= lam_w),
        "reflection_invariant": bool("chi" not in lam or abs(lam["chi"] - lam["zeta"]) <= 1e-12 * lam_w),
    }
    report = PipelineReport(ctx, lam_w, lam_wb, flags)
    if K == 0:
        flags["zeta_is_omega"] = bool(
            np.max(np.abs(zeta.F - (R - (zeta.t - zeta.a)))) <= 1e-9 * R and np.max(np.abs(zeta.G)) <= 1e-9 * R)
        return report

    chi = ctx.stages["chi"]
    pair = _stage("chi", lambda: solve_modes(assemble(chi, K), N, first=N)[0])
    z = largest_root(chi.t, pair.phi) if N > 1 else float(chi.a)
    z0 = largest_disc_root(K, N, R)
    report.z, report.z0 = z, z0
    flags["z_below_z0"] = bool(z <= z0 + 1e-6 * R)
    flags["z_below_P"] = bool(z < P)
    if not trace:
        return report
    if not z < P:
        flags["trace_skipped"] = True
        return report
    if z0 < P:
        report.Lambda = float(_stage("Lambda", mixed_lambda, R, K, z0, P)["value"])
    hom = _stage("homotopy", unroll_homotopy, chi, P, params, z)
    tr = trace_eigenvalue(hom, K)
    if tr.error is not None:
        report.trace = tr
        raise StageError("trace", tr.error)
    dini = np.full(tr.s_grid.size, np.nan)
    for i, s in enumerate(tr.s_grid):
        if s > 0:
            dini[i] = dini_derivative(hom, float(s), K, report.Lambda, phi=tr.phis[i]).value
    tr.dini = dini
    report.trace = tr
    above = report.Lambda is None or bool(np.all(tr.lambdas > report.Lambda))
    flags["lambda_above_Lambda"] = above
    flags["trace_monotone"] = tr.monotone
    flags["homotopy_invariants"] = True
    flags["endpoint_matches_bessel"] = bool(
        abs(tr.lambdas[-1] - (disc_eigenvalue(R - z, K, 1))) <= 1e-4 * tr.lambdas[-1])
    mids = tr.s_grid[1:-1][:: max(1, (tr.s_grid.size - 2) // 8)]
    report.bounds = [efes_bound_check(hom.curve(float(s))[0], K, P, report.Lambda) for s in mids]
    return report
