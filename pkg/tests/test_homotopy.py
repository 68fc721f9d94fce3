import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from revolute.bessel_ref import compute_mu, disc_eigenvalue, largest_disc_root
from revolute.errors import HomotopyParameterError, HypothesisViolation, ParameterDomainError
from revolute.meridian import disc_curve, segment_curve
from revolute.slp import assemble, mixed_lambda, solve_modes
from revolute.surgery import (
    HomotopyParams,
    dini_derivative,
    efes_bound_check,
    frozen_quotient,
    largest_root,
    run_pipeline,
    smoothstep,
    trace_eigenvalue,
    unroll_homotopy,
)


@pytest.fixture(scope="module")
def hemi_setup(hemisphere):
    rep = run_pipeline(hemisphere, 1, 1, trace=False)
    chi, P = rep.context.stages["chi"], rep.context.P
    hom = unroll_homotopy(chi, P, HomotopyParams(s_samples=32), rep.z)
    Lam = mixed_lambda(1.0, 1, rep.z0, P)["value"]
    return rep, hom, Lam


def test_smoothstep():
    h, dh = smoothstep(np.array([0.0, 0.5, 1.0]))
    np.testing.assert_allclose(h, [0.0, 0.5, 1.0])
    np.testing.assert_allclose(dh, [0.0, 1.5, 0.0])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(1e-7, 1e-3))
def test_smoothstep_derivative(tau, eps):
    # [TRIVIAL] centered difference of a cubic is exact up to rounding
    lo, hi = max(tau - eps, 0.0), min(tau + eps, 1.0)
    fd = (smoothstep(hi)[0] - smoothstep(lo)[0]) / (hi - lo)
    exact = (smoothstep(hi)[1] + smoothstep(lo)[1] + 4 * smoothstep(0.5 * (lo + hi))[1]) / 6
    assert float(fd) == pytest.approx(float(exact), abs=1e-6)


def test_params_validation():
    with pytest.raises(ParameterDomainError):
        HomotopyParams(eps=0.0)
    with pytest.raises(ParameterDomainError):
        HomotopyParams(s_samples=1)
    assert HomotopyParams(s_samples=5).s_grid.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_largest_root():
    t = np.linspace(0, 1, 5)
    assert largest_root(t, [1.0, 1.0, 1.0, 1.0, 0.0]) == 0.0
    assert largest_root(t, [-1.0, -1.0, 1.0, 3.0, 0.0]) == pytest.approx(0.375)


def test_angle_stages_monotone(hemi_setup):
    _, hom, _ = hemi_setup
    st_ = hom.stages
    assert np.all(np.diff(st_, axis=0) <= 0)
    assert np.all(st_[-1] == 0.0)
    np.testing.assert_array_equal(st_[0], hom.theta0)
    for row in st_[1:]:
        assert np.all(np.abs(row - math.pi / 2) > 1e-9)


def test_endpoints(hemi_setup):
    _, hom, _ = hemi_setup
    F0, G0, _, _, _ = hom.tail(0.0)
    np.testing.assert_allclose(F0, hom.tail_F, atol=1e-15)
    c1, _, _ = hom.curve(1.0)
    R, z = hom.R, hom.z
    # fully unrolled: the straight segment (R - t, 0) on [z, R]
    assert c1.b == pytest.approx(R, abs=1e-12)
    np.testing.assert_allclose(c1.F, R - c1.t, atol=1e-12)
    assert c1.a == pytest.approx(z)


def test_F_decreases_in_s(hemi_setup):
    _, hom, _ = hemi_setup
    prev = hom.tail(0.0)[0]
    for s in np.linspace(0, 1, 41)[1:]:
        F = hom.tail(float(s))[0]
        assert np.all(F <= prev)
        prev = F


def test_invariants_every_sample(hemi_setup):
    _, hom, _ = hemi_setup
    for s in np.linspace(0, 1, 97):
        hom.check(float(s))
        F, G, Fdot, th, _ = hom.tail(float(s))
        assert np.all(Fdot <= 1e-12)
        assert np.all((th >= 0) & (th <= math.pi))


def test_Fdot_matches_finite_difference(hemi_setup):
    _, hom, _ = hemi_setup
    s, ds = 0.3, 1e-6
    fd = (hom.tail(s + ds)[0] - hom.tail(s - ds)[0]) / (2 * ds)
    np.testing.assert_allclose(hom.tail(s)[2], fd, atol=1e-6)


def test_unroll_rejects_bad_input(hemisphere, hemi_setup):
    rep, _, _ = hemi_setup
    with pytest.raises(ParameterDomainError):
        unroll_homotopy(hemisphere, rep.context.P)  # descending G, not straight at P
    with pytest.raises(ParameterDomainError):
        unroll_homotopy(rep.context.stages["chi"], rep.context.P, z=rep.context.P + 0.01)


def test_homotopy_error_carries_location(hemi_setup):
    _, hom, _ = hemi_setup
    tail = hom.tail_F.copy()
    hom2 = type(hom)(**{**hom.__dict__, "tail_F": tail * 1.5})
    with pytest.raises(HomotopyParameterError) as ei:
        hom2.check(0.0)
    assert ei.value.s == 0.0 and ei.value.t is not None


def test_trace_endpoints_and_monotone(hemi_setup):
    rep, hom, Lam = hemi_setup
    tr = trace_eigenvalue(hom, 1)
    assert tr.error is None
    assert tr.lambdas[0] == pytest.approx(rep.stage_lambdas["chi"], rel=1e-9)
    seg = segment_curve(1.0, hom.z, 1.0, 4096)
    ref = solve_modes(assemble(seg, 1), 1)[0].lam
    assert tr.lambdas[-1] == pytest.approx(ref, rel=1e-6)
    assert np.all(tr.lambdas > Lam)
    assert tr.monotone
    # N = 1 so z = 0 and the fully unrolled curve is the disc itself
    assert tr.lambdas[-1] == pytest.approx(disc_eigenvalue(1.0, 1, 1), rel=1e-5)


def test_trace_rejects_K0(hemi_setup):
    with pytest.raises(ParameterDomainError):
        trace_eigenvalue(hemi_setup[1], 0)


@pytest.mark.parametrize("tau", [0.35, 0.5, 0.65])
def test_dini_matches_frozen_difference(hemi_setup, tau):
    _, hom, Lam = hemi_setup
    sig = (hom.n_stages - 1 + tau) / hom.n_stages
    c, _, _ = hom.curve(sig)
    pair = solve_modes(assemble(c, 1), 1)[0]
    d = dini_derivative(hom, sig, 1, Lam, phi=pair.phi)
    assert d.reliable
    ds = 1e-5
    fd = (frozen_quotient(hom, sig, sig, pair.phi, 1) - frozen_quotient(hom, sig - ds, sig, pair.phi, 1)) / ds
    assert d.value == pytest.approx(fd, rel=1e-3)
    assert d.value >= 0


def test_frozen_quotient_at_sigma_is_rayleigh(hemi_setup):
    _, hom, _ = hemi_setup
    c, _, _ = hom.curve(0.8)
    pair = solve_modes(assemble(c, 1), 1)[0]
    assert frozen_quotient(hom, 0.8, 0.8, pair.phi, 1) == pytest.approx(pair.lam, rel=1e-9)


def test_dini_zero_on_straight_tail():
    # [TRIVIAL] for the disc every angle is already 0, so Fdot = 0
    omega = disc_curve(1.0, 1024)
    mu, P = compute_mu(1, 1, 1.0)
    hom = unroll_homotopy(omega, P, HomotopyParams(s_samples=8))
    for s in (0.25, 0.5, 1.0):
        assert dini_derivative(hom, s, 1).value == 0.0


def test_dini_strict_raises(hemi_setup):
    _, hom, Lam = hemi_setup
    with pytest.raises(HypothesisViolation) as ei:
        dini_derivative(hom, 0.5, 1, Lambda=1e6, strict=True)
    assert ei.value.result.reliable is False
    assert not dini_derivative(hom, 0.5, 1, Lambda=1e6).reliable


def test_efes_rejects_K0(disc):
    with pytest.raises(ParameterDomainError):
        efes_bound_check(disc, 0, 0.5)


@pytest.mark.parametrize("K", [1, 2, 3])
def test_efes_on_disc_matches_bessel(K):
    # [DERIVED] phi = J_K(j r) with j = j_{K,1}; F^2 phi'^2 - K^2 phi^2 on the disc
    # equals r^2 j^2 J_K'(j r)^2 - K^2 J_K(j r)^2, which is <= 0 for r <= 1
    from scipy.special import jv, jvp

    omega = disc_curve(1.0, 4096)
    mu, P = compute_mu(K, 1, 1.0)
    Lam = mixed_lambda(1.0, K, largest_disc_root(K, 1, 1.0), P)["value"]
    b = efes_bound_check(omega, K, P, Lam)
    assert not b.skipped and b.ok
    r = np.linspace(1e-3, mu, 400)
    j = math.sqrt(disc_eigenvalue(1.0, K, 1))
    exact = (r * j * jvp(K, j * r)) ** 2 - K * K * jv(K, j * r) ** 2
    assert np.max(exact) <= 0
    assert b.max_value <= 1e-8


def test_efes_skips_on_failed_hypothesis(hemi_setup):
    _, hom, _ = hemi_setup
    c, _, _ = hom.curve(0.5)
    b = efes_bound_check(c, 1, hom.P, Lambda=1e6)
    assert b.skipped and not b.ok and b.reasons
