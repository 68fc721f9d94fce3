import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import disc_lambda, mp_zero

from revolute import _tridiag
from revolute.errors import (
    ConditioningError,
    DegenerateTrialError,
    DomainError,
    ParameterDomainError,
    SizeError,
)
from revolute.meridian import MeridianCurve, disc_curve, segment_curve
from revolute.slp import (
    _inverse_weight_moments,
    assemble,
    count_below,
    count_roots,
    eigenvalue_table,
    eigenvalues,
    mixed_lambda,
    quadratic_forms,
    rayleigh_quotient,
    solve_mixed,
    solve_modes,
)


def test_disc_against_bessel(disc):
    # [DERIVED] (j_{k,n}/R)^2 from mpmath
    for k in range(4):
        vals = eigenvalues(disc, k, 4)
        ref = [disc_lambda(k, n) for n in range(1, 5)]
        np.testing.assert_allclose(vals, ref, rtol=1e-5)
        assert np.all(vals >= np.array(ref))  # conforming P1 approximates from above


def test_hemisphere_closed_form(hemisphere):
    # [DERIVED] spherical harmonics: lambda_{k,n} = l(l+1) with l = k + 2n - 1
    for k in range(3):
        vals = eigenvalues(hemisphere, k, 3)
        ref = [(k + 2 * n - 1) * (k + 2 * n) for n in range(1, 4)]
        np.testing.assert_allclose(vals, ref, rtol=2e-6)


def test_cone_closed_form(cone):
    # [DERIVED] unrolled sector of radius L, opening pi: order 2k Bessel zeros over L
    for k in range(3):
        vals = eigenvalues(cone, k, 2)
        ref = [(mp_zero(2 * k, n) / 2) ** 2 for n in (1, 2)]
        np.testing.assert_allclose(vals, ref, rtol=1e-5)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_second_order_convergence(k):
    ref = disc_lambda(k, 2)
    e1 = eigenvalues(disc_curve(1.0, 256), k, 2)[-1] - ref
    e2 = eigenvalues(disc_curve(1.0, 1024), k, 2)[-1] - ref
    order = math.log(e1 / e2) / math.log(4)
    assert 1.8 <= order <= 2.2


def test_eigenpairs_structure(hemisphere):
    prob = assemble(hemisphere, 2)
    pairs = solve_modes(prob, 5)
    B = (prob.mass_diag, prob.mass_off)
    for i, p in enumerate(pairs):
        assert p.n == i + 1 and p.root_count == i
        assert p.residual < 1e-8
        assert p.phi[0] == 0.0 and p.phi[-1] == 0.0
        assert prob.norm2(p.phi) == pytest.approx(1.0, rel=1e-12)
        assert prob.energy(p.phi) == pytest.approx(p.lam, rel=1e-10)
        nz = np.flatnonzero(np.abs(p.phi) > 1e-6)
        assert p.phi[nz[0]] > 0
        for q in pairs[:i]:
            cross = p.phi @ _tridiag.matvec(*B, q.phi)
            assert abs(cross) < 1e-8


def test_k0_natural_on_axis(disc):
    prob = assemble(disc, 0)
    assert prob.bc_right == "natural" and prob.size == disc.t.size - 1
    phi = solve_modes(prob, 1)[0].phi
    assert phi[-1] > 0.99 * phi.max()


def test_k_positive_vanishes_on_axis(disc):
    prob = assemble(disc, 1)
    assert prob.bc_right == "zero" and prob.size == disc.t.size - 2
    with pytest.raises(ParameterDomainError):
        assemble(disc, 1, bc_right="natural")


def test_count_below(disc):
    prob = assemble(disc, 1)
    vals = eigenvalues(disc, 1, 3)
    assert count_below(prob, vals[1] * (1 - 1e-9)) == 1
    assert count_below(prob, vals[2] * (1 + 1e-9)) == 3


def test_moments_against_quadrature():
    # [DERIVED] mpmath quadrature of N_a N_b / F
    for f0, f1 in [(1.0, 1.5), (0.2, 1.0), (3.0, 0.01), (1.0, 0.0)]:
        I00, I01, I11 = (float(v[0]) for v in _inverse_weight_moments(np.array([f0]), np.array([f1])))

        def quad(g):
            return float(mp.quad(lambda x: g(x) / (f0 + (f1 - f0) * x), [0, 1]))

        assert I01 == pytest.approx(quad(lambda x: x * (1 - x)), rel=1e-12)
        assert I00 == pytest.approx(quad(lambda x: (1 - x) ** 2), rel=1e-12)
        if f1 > 0:
            assert I11 == pytest.approx(quad(lambda x: x * x), rel=1e-12)
        else:
            assert math.isinf(I11)


def test_quadratic_forms_match_assembly(hemisphere):
    rng = np.random.default_rng(0)
    v = rng.standard_normal(hemisphere.t.size)
    v[0] = v[-1] = 0.0
    prob = assemble(hemisphere, 2)
    e, m = quadratic_forms(hemisphere, 2, v)
    assert e == pytest.approx(prob.energy(v), rel=1e-10)
    assert m == pytest.approx(prob.norm2(v), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(coef=st.lists(st.floats(-1, 1), min_size=4, max_size=4), k=st.integers(0, 3))
def test_rayleigh_quotient_bounded_below(coef, k):
    # min-max: every admissible trial has quotient >= lambda_{k,1}
    c = disc_curve(1.0, 256)
    t = c.t
    trial = sum(a * np.sin((j + 1) * math.pi * t) for j, a in enumerate(coef)) * (t * (1 - t))
    trial[-1] = 0.0
    if np.max(np.abs(trial)) < 1e-6:
        return
    assert rayleigh_quotient(c, k, trial) >= eigenvalues(c, k, 1)[0] * (1 - 1e-12)


def test_rayleigh_quotient_of_eigenvector(disc):
    pair = solve_modes(assemble(disc, 1), 1)[0]
    assert rayleigh_quotient(disc, 1, pair.phi) == pytest.approx(pair.lam, rel=1e-12)


def test_rayleigh_quotient_errors(disc):
    t = disc.t
    with pytest.raises(ParameterDomainError):
        rayleigh_quotient(disc, 0, 1 + 0 * t)
    with pytest.raises(ParameterDomainError):
        rayleigh_quotient(disc, 1, t)
    with pytest.raises(DegenerateTrialError):
        rayleigh_quotient(disc, 0, 0 * t)
    with pytest.raises(SizeError):
        rayleigh_quotient(disc, 0, [0.0, 1.0])


def test_assembly_errors():
    t = np.array([0.0, 0.5, 0.5 + 1e-16, 1.0])
    with pytest.raises(ConditioningError):
        assemble(MeridianCurve(t, np.array([1.0, 0.5, 0.5, 0.0]), np.zeros(4)), 0)
    with pytest.raises(SizeError):
        assemble(MeridianCurve(np.array([0.0, 1.0]), np.array([1.0, 0.0]), np.zeros(2)), 0)
    with pytest.raises(ParameterDomainError):
        assemble(disc_curve(1.0, 8), -1)


def test_sturm_count_matches_dense():
    # [DERIVED] scipy dense generalized eigensolver on a small pencil
    from scipy.linalg import eigh

    c = disc_curve(1.0, 40)
    prob = assemble(c, 2)
    ad, ao, bd, bo = prob.pencil()
    A = np.diag(ad) + np.diag(ao, 1) + np.diag(ao, -1)
    B = np.diag(bd) + np.diag(bo, 1) + np.diag(bo, -1)
    ref = eigh(A, B, eigvals_only=True)
    np.testing.assert_allclose(_tridiag.bisect_eigenvalues(ad, ao, bd, bo, 10), ref[:10], rtol=1e-11)
    for sigma in [ref[0] * 0.5, ref[3] * 1.001, ref[-1] * 2]:
        assert _tridiag.sturm_count(ad, ao, bd, bo, sigma) == np.count_nonzero(ref < sigma)


def test_count_roots():
    assert count_roots([0, 1, -1, 1, 0]) == 2
    assert count_roots([0, 1e-20, -1, 0]) == 0  # below the relative threshold
    assert count_roots([0, 0, 0]) == 0


def _mixed_oracle(K, r_dir, r_neu, guess):
    """Smallest root of J_K(x r_d) Y_K'(x r_n) - Y_K(x r_d) J_K'(x r_n)."""
    def f(x):
        return (mp.besselj(K, x * r_dir) * mp.bessely(K, x * r_neu, derivative=1)
                - mp.bessely(K, x * r_dir) * mp.besselj(K, x * r_neu, derivative=1))
    return float(mp.findroot(f, guess) ** 2)


@pytest.mark.parametrize("K,N", [(1, 1), (1, 2), (2, 3)])
def test_mixed_lambda_against_cross_product_oracle(K, N):
    # [DERIVED] Dirichlet at r = R - z0, Neumann at r = mu, via Bessel cross products
    from revolute.bessel_ref import compute_mu, largest_disc_root

    mu, P = compute_mu(K, N, 1.0)
    z0 = largest_disc_root(K, N, 1.0)
    m = mixed_lambda(1.0, K, z0, P)
    ref = _mixed_oracle(K, 1.0 - z0, mu, math.sqrt(m["raw"][-1]))
    assert m["value"] == pytest.approx(ref, rel=1e-8)
    assert m["raw"][-1] == pytest.approx(ref, rel=1e-5)
    assert m["value"] < disc_lambda(K, N)


def test_mixed_errors():
    with pytest.raises(DomainError):
        solve_mixed(1.0, 1, 0.5, 0.4)
    with pytest.raises(DomainError):
        solve_mixed(1.0, 1, 0.1, 1.0)


def test_segment_problem_scaling():
    # [DERIVED] the straight segment [z, R] is a disc of radius R - z
    seg = segment_curve(1.0, 0.25, 1.0, 2048)
    assert eigenvalues(seg, 1, 1)[0] == pytest.approx(disc_lambda(1, 1, 0.75), rel=1e-5)


def test_eigenvalue_table(disc):
    tab = eigenvalue_table(disc, [0, 1, 2], 2)
    assert set(tab) == {0, 1, 2}
    np.testing.assert_allclose(tab[1], eigenvalues(disc, 1, 2))


def test_solve_modes_errors():
    prob = assemble(disc_curve(1.0, 4), 1)
    with pytest.raises(SizeError):
        solve_modes(prob, 10)
    with pytest.raises(ParameterDomainError):
        solve_modes(prob, 0)
