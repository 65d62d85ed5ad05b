import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from zetaforms.asymptotics import (
    characteristic_polynomial,
    characteristic_roots,
    closed_form_constants,
    derived_constants,
    digamma,
    empirical_rate,
    f0_eval,
    phi_limit,
    upper_envelope_rate,
)
from zetaforms.denominators import PROFILE_Z2, PROFILE_Z3, PhiProfile, prime_product
from zetaforms.errors import BranchPoint, DegenerateCubic, InsufficientData, InvalidParameters
from zetaforms.linear_forms import exact_triple, form_record
from zetaforms.rational_function import Z2_EXAMPLE_GENERATORS as G2, Z3_EXAMPLE_GENERATORS as G3

TOL = mpmath.mpf("1e-8")


@pytest.fixture(scope="module")
def closed():
    return closed_form_constants(128)


# ---- digamma


def test_digamma_at_one_is_minus_euler_gamma():
    with mpmath.workprec(300):
        assert abs(digamma(1, 256) + mpmath.euler) < mpmath.mpf(2) ** -250


@given(st.fractions(min_value=Fraction(1, 1000), max_value=40, max_denominator=1000))
def test_digamma_functional_equation(x):
    with mpmath.workprec(200):
        lhs = digamma(x + 1, 160)
        rhs = digamma(x, 160) + mpmath.mpf(x.denominator) / x.numerator
        assert abs(lhs - rhs) < mpmath.mpf(2) ** -150 * (1 + abs(lhs))


@given(st.fractions(min_value=Fraction(1, 50), max_value=3, max_denominator=60))
def test_digamma_against_mpmath(x):
    with mpmath.workprec(200):
        ref = mpmath.digamma(mpmath.mpf(x.numerator) / x.denominator)
        assert abs(digamma(x, 160) - ref) < mpmath.mpf(2) ** -150


def test_digamma_domain():
    with pytest.raises(InvalidParameters):
        digamma(0)


# ---- roots


def test_roots_z2(closed):
    r = closed["roots_z2"]
    assert r.tau0.imag > 0
    with mpmath.workprec(160):
        assert r.tau0conj == mpmath.conj(r.tau0)
    poly = characteristic_polynomial(*G2)
    assert len(poly) == 4
    with mpmath.workprec(160):
        for z in r.as_list():
            val = sum(mpmath.mpf(c.numerator) / c.denominator * z ** (3 - i) for i, c in enumerate(poly))
            assert abs(val) < mpmath.mpf(2) ** (-128 + 16) * max(1, abs(z)) ** 3


def test_roots_degenerate():
    with pytest.raises(DegenerateCubic):
        characteristic_roots((1, 2, 3, 4), (4, 3, 2, 1))


def test_f0_conjugate_roots_share_real_part(closed):
    r = closed["roots_z2"]
    a = f0_eval(*G2, r.tau0)
    b = f0_eval(*G2, r.tau0conj)
    assert abs(mpmath.re(a) - mpmath.re(b)) < mpmath.mpf(2) ** -100


def test_f0_branch_point():
    with pytest.raises(BranchPoint):
        f0_eval(*G2, 8)


def test_f0_values(closed):
    assert abs(closed["re_f0_tau0"] - mpmath.mpf("-19.10095491")) < TOL
    assert abs(closed["re_f0_tau1"] - mpmath.mpf("27.86755317")) < TOL
    assert abs(closed["re_fhat0_tau0"] - mpmath.mpf("-19.10095491")) < TOL
    assert abs(closed["re_fhat0_tau1"] - mpmath.mpf("27.86755317")) < TOL


# ---- phi limits


def test_phi_limits(closed):
    assert abs(closed["phi_limit_z2"] - mpmath.mpf("6.61268356")) < TOL
    assert abs(closed["phi_limit_z3"] - mpmath.mpf("5.70169601")) < TOL


def test_phi_limit_zero_profile():
    zero = PhiProfile((0, 1), (0,), 8)
    assert phi_limit(zero) == 0


def test_phi_limit_is_additive():
    pieces = [(lo, hi, v) for lo, hi, v in PROFILE_Z3.intervals()]
    with mpmath.workprec(160):
        total = mpmath.mpf(0)
        for lo, hi, v in pieces:
            total += phi_limit(PhiProfile.from_intervals({v: [(lo, hi)]}, 8))
        assert abs(total - phi_limit(PROFILE_Z3)) < mpmath.mpf(2) ** -100


# ---- derived constants


def test_derived_constants(closed):
    cs = closed["constants"]
    assert abs(cs.tau_0 - mpmath.mpf("0.899668635")) < TOL
    assert abs(cs.s_0 - mpmath.mpf("6.770732145")) < TOL
    assert abs(cs.twenty_four_minus_vphi - mpmath.mpf("18.29830398")) < TOL
    assert abs(cs.twenty_four_minus_vphi_minus_rho - mpmath.mpf("-0.80265093")) < TOL
    assert cs.twenty_four_minus_vphi_minus_rho < 0
    with mpmath.workprec(144):
        assert abs(cs.tau_0 - (32 - cs.vphi - cs.rho) / 8) < mpmath.mpf(2) ** -120
        assert abs(cs.s_0 - (32 - cs.vphi + cs.kappa) / 8) < mpmath.mpf(2) ** -120


def test_identity_reproduces_nine_digits_from_eight_digit_inputs():
    vphi, rho, kappa = Fraction("5.70169601"), Fraction("19.10095491"), Fraction("27.86755317")
    assert (32 - vphi - rho) / 8 == Fraction("0.899668635")
    assert (32 - vphi + kappa) / 8 == Fraction("6.770732145")


def test_derived_constants_rejects_nonfinite():
    with pytest.raises(InvalidParameters):
        derived_constants(mpmath.inf, 1, 1)


# ---- empirical rates


def test_rate_of_constant_sequence():
    assert empirical_rate([3.0] * 7) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InsufficientData):
        empirical_rate([1.0, 2.0, 3.0, 4.0])


@given(st.floats(-30, 30), st.floats(-100, 100))
def test_rate_of_linear_sequence(slope, icpt):
    vals = [icpt + slope * n for n in range(10)]
    assert empirical_rate(vals) == pytest.approx(slope, abs=1e-6)
    assert upper_envelope_rate(vals) == pytest.approx(slope, abs=1e-6)


def test_q_growth():
    ns = list(range(10, 26))
    vals = [math.log(exact_triple(n)[0]) for n in ns]
    assert abs(empirical_rate(vals, ns) - 27.86755317) < 0.5


def test_phihat_growth():
    ns = list(range(20, 61))
    vals = [math.log(prime_product(PROFILE_Z3, n).value) for n in ns]
    assert abs(empirical_rate(vals, ns) - 5.70169601) < 0.6


def test_residual_envelope():
    ns = list(range(5, 31))
    vals = [form_record(n).r.log_abs for n in ns]
    assert abs(upper_envelope_rate(vals, ns) + 19.10095491) < 0.7
