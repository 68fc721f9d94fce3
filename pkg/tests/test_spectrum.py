import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import mp_zero

from revolute.meridian import CurveFamily, build_family, disc_curve, family_from_seed
from revolute.spectrum import (
    REPORT_COLUMNS,
    SpectrumEntry,
    brute_force_spectrum,
    coarsen,
    compare_to_disc,
    enumerate_spectrum,
    is_disc,
)


def test_multiplicity():
    assert SpectrumEntry(1.0, 0, 1).multiplicity == 1
    assert SpectrumEntry(1.0, 3, 1).multiplicity == 2


def test_hemisphere_first_six(hemisphere):
    # [DERIVED] 2, 6, 6, 12, 12, 12; order among the three 12s is a discretization tie
    tab = enumerate_spectrum(hemisphere, 6)
    np.testing.assert_allclose(tab.values, [2, 6, 6, 12, 12, 12], rtol=1e-6)
    labels = [(e.k, e.n) for e in tab.expanded()]
    assert labels[:3] == [(0, 1), (1, 1), (1, 1)]
    assert sorted(labels[3:]) == [(0, 2), (2, 1), (2, 1)]


def test_disc_matches_bessel(disc):
    tab = enumerate_spectrum(disc, 12)
    ref = sorted([mp_zero(k, n) ** 2 for k in range(6) for n in range(1, 5) for _ in range(1 if k == 0 else 2)])
    np.testing.assert_allclose(tab.values, ref[:12], rtol=1e-5)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 500), J=st.integers(1, 15))
def test_truncation_matches_brute_force(seed, J):
    curve = build_family(family_from_seed("bumped_disc", seed), 513)
    fast = enumerate_spectrum(curve, J)
    slow = brute_force_spectrum(curve, J, k_max=J, n_max=J)
    np.testing.assert_allclose(fast.values, slow.values, rtol=1e-12)


def test_rows(hemisphere):
    rows = enumerate_spectrum(hemisphere, 3).to_rows()
    assert [r["j"] for r in rows] == [1, 2, 3]
    assert rows[1]["multiplicity"] == 2


def test_invalid_J(disc):
    with pytest.raises(ValueError):
        enumerate_spectrum(disc, 0)


def test_compare_hemisphere(hemisphere):
    rep = compare_to_disc(hemisphere, 6)
    assert rep.verdict == "THEOREM_CONSISTENT"
    np.testing.assert_allclose(rep.margins, [3.7832, 8.6820, 8.6820, 14.3746, 14.3746, 18.4713], atol=1e-4)
    assert rep.to_csv().splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert rep.to_json()["schema_version"] == 1


def test_compare_disc(disc):
    rep = compare_to_disc(disc, 10)
    assert rep.verdict == "DISC"
    assert np.all(np.abs(rep.margins) <= np.array(rep.tolerance))


def test_compare_cone(cone):
    rep = compare_to_disc(cone, 4)
    assert rep.verdict == "THEOREM_CONSISTENT"
    assert rep.rows[1]["lambda_sigma"] == pytest.approx((mp_zero(2, 1) / 2) ** 2, rel=1e-5)


def test_perturbed_disc_is_not_disc():
    assert is_disc(disc_curve(1.0, 64))
    bumped = build_family(CurveFamily("bumped_disc", {"amplitude": 0.01}), 65)
    assert not is_disc(bumped)


def test_coarsen_keeps_endpoints():
    c = disc_curve(1.0, 7)
    cc = coarsen(c)
    assert cc.t[0] == 0.0 and cc.t[-1] == 1.0
    assert cc.t.size == 5


def test_spherical_cap_shallow():
    # a nearly flat cap has eigenvalues just below the disc's
    c = build_family(CurveFamily("spherical_cap", {"radius": 10.0, "angle": 0.1}), 4097)
    rep = compare_to_disc(c, 3)
    assert rep.verdict == "THEOREM_CONSISTENT"
    assert np.all(rep.margins / np.array([r["lambda_disc"] for r in rep.rows]) < 0.01)
    assert math.isfinite(rep.margins.sum())
