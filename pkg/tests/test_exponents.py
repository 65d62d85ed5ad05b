"""Exponent bounds, the Minkowski witness search and the regime classification."""
import itertools
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from zetaforms.errors import BudgetExhausted, InvalidParameters
from zetaforms.exponents import (
    ExponentContext,
    LatticeWitness,
    NotFound,
    bound_table,
    generic_mu_psi,
    in_lattice,
    lin_dep_bound,
    minkowski_witness,
    mu_bound,
    mu_psi_bound,
    mu_psi_discrepancy,
    tau_regime,
    witness_a0_bound,
)

taus = st.fractions(min_value=0, max_value=1).filter(lambda t: t < 1)


def test_bound_examples():
    assert mu_psi_bound(Fraction(4), Fraction(0)) == 1
    assert mu_bound(Fraction(2), Fraction(0)) == 2
    assert lin_dep_bound(Fraction(1), Fraction(0)) == 4
    assert lin_dep_bound(Fraction(2), Fraction(0)) == 8


@given(taus)
def test_mu_psi_at_six_minus_tau(tau):
    assert mu_psi_bound(6 - tau, tau) == (6 - 2 * tau) / (4 - tau)


@given(taus, st.fractions(min_value=0, max_value=20))
def test_mu_dominates_mu_psi(tau, s):
    if s >= tau:
        assert mu_bound(s, tau) >= mu_psi_bound(s, tau)


def test_lin_dep_identity_at_random_tau():
    # exact: 4 + (mu - 1)(4 - tau) = 6 - tau at mu = 2 - 2/(4 - tau)
    rng = random.Random(100)
    for _ in range(100):
        tau = Fraction(rng.randint(0, 10**6 - 1), 10**6)
        mu = 2 - Fraction(2) / (4 - tau)
        assert lin_dep_bound(mu, tau) == 6 - tau


def test_generic_mu_psi_matches():
    tau = Fraction(1, 3)
    assert generic_mu_psi(2, tau) == 2 - Fraction(2) / (4 - tau)


def test_tau_domain():
    with pytest.raises(InvalidParameters):
        mu_bound(5, 1)
    with pytest.raises(InvalidParameters):
        lin_dep_bound(2, Fraction(-1, 2))
    with pytest.raises(InvalidParameters):
        ExponentContext(0.5, 5.0, "D_n^4")
    assert ExponentContext(0.5, 5.0, "D_n^2").delta == 2


# --------------------------------------------------------------------------
# Minkowski witnesses


def _form(a0, a1, a2, digits=60):
    with mpmath.workdps(digits):
        return abs(mpmath.mpf(a0.numerator) / a0.denominator
                   + mpmath.mpf(a1.numerator) / a1.denominator * mpmath.zeta(2)
                   + mpmath.mpf(a2.numerator) / a2.denominator * mpmath.zeta(3))


def test_witness_n4():
    w = minkowski_witness(4, 0, 5.5)
    assert isinstance(w, LatticeWitness)
    assert in_lattice(4, w.a0, w.a1, w.a2)
    assert (w.a0, w.a1, w.a2) != (0, 0, 0)
    # [DERIVED] membership in K rechecked with mpmath's own zeta values
    assert max(abs(w.a1), abs(w.a2)) <= 1
    assert _form(w.a0, w.a1, w.a2) <= mpmath.exp(-5.5 * 4)
    ok, bound = witness_a0_bound(w)
    assert ok and float(abs(w.a0)) <= bound


def test_no_witness_for_large_s():
    res = minkowski_witness(4, 0, 50)
    assert isinstance(res, NotFound) and res.complete
    assert res.to_dict()["found"] is False


def test_search_is_exhaustive_at_n1():
    # [DERIVED] brute force over the whole box, a0 included
    w = minkowski_witness(1, 0, 0.5)
    best = None
    for i, k, j in itertools.product(range(-8, 9), range(-1, 2), range(-2, 3)):
        a0, a1, a2 = Fraction(i, 2), Fraction(k), Fraction(j, 2)
        if (i, k, j) == (0, 0, 0):
            continue
        v = _form(a0, a1, a2)
        if best is None or v < best:
            best = v
    assert isinstance(w, LatticeWitness)
    assert abs(abs(w.form_value) - best) < 1e-15


def test_budget():
    with pytest.raises(BudgetExhausted):
        minkowski_witness(12, 0, 5.5, search_budget=10)


def test_in_lattice():
    assert in_lattice(1, Fraction(1, 2), 1, Fraction(1, 2))
    assert not in_lattice(1, Fraction(1, 3), 0, 0)


# --------------------------------------------------------------------------


def test_tau_regimes():
    assert tau_regime(5)["regime"] == "degenerate"
    flat = tau_regime(2, n=3)
    assert flat["regime"] == "flat" and flat["s_tau"] == 4
    w = flat["witness"]
    assert in_lattice(3, Fraction(w["a0"]), Fraction(w["a1"]), Fraction(w["a2"]))
    assert tau_regime(0.5) == {"regime": "active", "s_tau_lower": 5.0}


def test_discrepancy_report():
    rep = mu_psi_discrepancy()
    # [PAPER] the printed value, and the value the formula actually gives
    assert rep["printed"] == "1.92357696"
    assert rep["computed"].startswith("1.89368")
    assert rep["discrepancy"] is True


def test_bound_table_rows():
    rows = dict(bound_table(mpmath.mpf("0.8996686327"), mpmath.mpf("6.770732144")))
    assert abs(rows["s_tau <= 6 - tau0 (linear dependence, generic mu_psi)"] - (6 - mpmath.mpf("0.8996686327"))) < 1e-9
