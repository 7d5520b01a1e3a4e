"""Stokes enclosures: kappa0, the basic and refined Theta, psi_* identities."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfstokes.errors import NotApplicable, ThresholdError
from hopfstokes.interval import ComplexInterval, Interval, abs_upper, exp
from hopfstokes.pipeline import INCONCLUSIVE, NONZERO_CERTIFIED, conclusion_for
from hopfstokes.problems import example1, example2
from hopfstokes.shooting import DeltaEnclosure
from hopfstokes.stokes import (
    check_psi_star_identities,
    kappa0,
    laurent_mul,
    m_star,
    psi_star_products,
    series_factor,
    theta_basic,
    theta_refined,
)

BETA = (3, -6, -68, 48)


def _unit_delta(rho: float) -> ComplexInterval:
    """Delta phi = -i rho e^(-rho), which gives kappa0 = 1."""
    return ComplexInterval(Interval(0.0), -(Interval(rho) * exp(Interval(-rho))))


@pytest.mark.parametrize("rho", [9.79, 16.0, 30.0])
def test_kappa0_unit(rho):
    k = kappa0(example1(), Interval(rho), _unit_delta(rho))
    assert k.contains(1.0)
    assert k.re.width() < 1e-13 and k.im.width() < 1e-13


def test_kappa0_zero_and_domain():
    k = kappa0(example1(), Interval(16.0), ComplexInterval(0.0, 0.0))
    assert (k.re.lo, k.re.hi, k.im.lo, k.im.hi) == (0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ThresholdError):
        kappa0(example1(), Interval(-1.0, 1.0), ComplexInterval(1.0, 0.0))


def test_theta_basic_without_error_is_kappa0():
    k = ComplexInterval(Interval(1.0, 1.0 + 1e-12), Interval(-1e-12, 1e-12))
    t = theta_basic(k, Interval(0.0))
    assert (t.re.lo, t.re.hi, t.im.lo, t.im.hi) == (k.re.lo, k.re.hi, k.im.lo, k.im.hi)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 0.4), st.complex_numbers(min_magnitude=0.1, max_magnitude=10.0))
def test_theta_basic_contains_disc_and_scales(mbar, z):
    k = ComplexInterval.from_complex(z)
    one = theta_basic(k, Interval(mbar))
    two = theta_basic(k, Interval(2 * mbar))
    for g in (mbar, -mbar, 1j * mbar, -1j * mbar, mbar * (0.6 + 0.8j)):
        assert one.contains(z * (1 + g))
    grow1 = one.re.hi - k.re.hi
    grow2 = two.re.hi - k.re.hi
    assert abs(grow2 - 2 * grow1) <= 1e-12 * abs(z)


def test_theta_basic_rejects_mbar_at_one():
    with pytest.raises(ThresholdError):
        theta_basic(ComplexInterval(1.0, 0.0), Interval(1.0))


def test_series_factor_values():
    f16 = series_factor(BETA, Interval(16.0))
    expected = 1 - 3 / (3 * 16**3) - 6 / (4 * 16**4) + 68 / (5 * 16**5) - 48 / (6 * 16**6)
    assert f16.contains(expected)
    assert abs(f16.mid() - 0.999745) < 1e-6
    prev = 0.0
    for rho in (10.0, 100.0, 1e3, 1e5):
        d = abs(series_factor(BETA, Interval(rho)).mid() - 1.0)
        assert d < 1.0 / rho**2
        if prev:
            assert d < prev
        prev = d


def test_m_star():
    assert m_star(Interval(16.0)).contains(1 + 4 / 16 + 20 / 256 + 120 / 4096)


# -- exact Laurent products -----------------------------------------------------


def test_laurent_mul_gaussian():
    a = {1: (1, 1)}  # (1 + i)/s
    b = {2: (1, -1)}  # (1 - i)/s^2
    assert laurent_mul(a, b) == {3: (2, 0)}
    assert laurent_mul(a, {}) == {}


def test_psi_star_products_exact():
    prod, k11 = psi_star_products(example1().refinement_data)
    assert prod == {6: (1, 0), 8: (-24, 0), 10: (-560, 0), 12: (14400, 0)}
    assert k11[4] == (0, 3) and k11[5] == (-6, 0) and k11[6] == (0, -68)
    assert k11[7] == (168, 0)


def test_identity_report_lists_every_mismatch():
    rep = check_psi_star_identities(example1().refinement_data)
    assert not rep.holds
    assert rep.phi_varphi_mismatch[10] == ((-560, 0), (400, 0))
    assert rep.phi_varphi_mismatch[12] == ((14400, 0), (0, 0))
    assert rep.beta_mismatch == {7: ((168, 0), (48, 0))}
    data = rep.to_json()
    assert data["holds"] is False and "10" in data["phi_varphi_mismatch"]


def test_refined_not_applicable_for_example2(ex2_run):
    cert, _ = ex2_run
    with pytest.raises(NotApplicable):
        theta_refined(example2(), cert.table, cert.delta.rho_star_enc, cert.kappa0)


# -- conclusions and the Example 1 run -----------------------------------------------


def _delta(nonzero: bool) -> DeltaEnclosure:
    z = ComplexInterval(Interval(-1.0, 1.0), Interval(-1.0, 1.0))
    return DeltaEnclosure(Interval(16.0), z, z, nonzero, {}, ())


def test_conclusion_for():
    wide = ComplexInterval(Interval(-1.0, 1.0), Interval(0.0))
    away = ComplexInterval(Interval(1.0, 2.0), Interval(0.0))
    assert conclusion_for(_delta(False), wide) == INCONCLUSIVE
    assert conclusion_for(_delta(False), away) == NONZERO_CERTIFIED
    assert conclusion_for(_delta(True), wide) == NONZERO_CERTIFIED


def test_refined_inside_basic_and_narrower(ex1_run):
    cert, _ = ex1_run
    basic, refined = cert.theta_basic, cert.theta_refined.theta
    assert basic.intersects(refined)
    assert refined.re.width() <= basic.re.width()
    assert refined.contains(cert.kappa0.mid() * cert.theta_refined.factor.mid())
    r = cert.theta_refined
    assert r.et.hi >= r.es.hi and r.et.hi >= r.e_theta.hi
    assert r.m_star.hi <= cert.table.m0.lo
    assert abs_upper(cert.kappa0) < 1.1


def test_refined_matches_oracle_estimate(ex1_run, ex1_oracle):
    cert, _ = ex1_run
    assert cert.theta_refined.theta.contains(ex1_oracle.theta)
    assert cert.theta_basic.contains(ex1_oracle.theta)
