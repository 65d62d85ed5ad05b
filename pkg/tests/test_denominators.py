import math
import random
from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given, strategies as st

from zetaforms.denominators import (
    PROFILE_Z2,
    PROFILE_Z3,
    PhiProfile,
    phi_general_z2,
    phi_general_z3,
    phi_table_z2,
    phi_table_z3,
    prime_product,
    profile_from_function,
    verify_divisibility,
)
from zetaforms.linear_forms import exact_triple
from zetaforms.numeric import primes_upto, valuation

F = Fraction
A2, B2 = (8, 7, 10, 9), (0, 1, 2, 15)
A3, B3 = (16, 8, 9, 10), (11, 0, 16, 16)


def test_table_examples():
    assert phi_table_z2(F(21, 200)) == 1
    assert phi_table_z2(F(3, 25)) == 2
    assert phi_table_z2(F(1, 2)) == 0
    assert phi_table_z3(F(11, 100)) == 1
    assert phi_table_z3(F(7, 20)) == 2
    assert phi_table_z3(F(99, 100)) == 0
    with pytest.raises(ValueError):
        phi_table_z2(1)


def test_general_examples():
    assert phi_general_z2(A2, B2, F(3, 25)) == 2
    assert phi_general_z2(A2, B2, 0) == 0
    assert phi_general_z3(A3, B3, F(11, 100)) == 1
    assert phi_general_z3(A3, B3, 0) == 0


def _random_unit_rationals(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        den = rng.randint(1, 600)
        out.append(F(rng.randrange(den), den))
    return out


@pytest.mark.parametrize("table, general, a, b", [
    (phi_table_z2, phi_general_z2, A2, B2),
    (phi_table_z3, phi_general_z3, A3, B3),
])
def test_general_formula_matches_table_random(table, general, a, b):
    for x in _random_unit_rationals(10_000, seed=len(a) + sum(b)):
        assert general(a, b, x) == table(x), x


def test_general_formula_matches_table_everywhere():
    # every jump of either function sits at k/m with m <= 32 (the coefficients
    # are at most 16, and y-shifts halve), so a sweep over those points and
    # their midpoints compares the two step functions on all of [0, 1)
    swept2 = profile_from_function(lambda x: phi_general_z2(A2, B2, x), 64, 8)
    assert swept2 == PROFILE_Z2.merged()
    swept3 = profile_from_function(lambda x: phi_general_z3(A3, B3, x), 64, 8)
    assert swept3 == PROFILE_Z3.merged()


@pytest.mark.parametrize("profile", [PROFILE_Z2, PROFILE_Z3])
def test_profile_shape(profile):
    assert set(profile.values) <= {0, 1, 2}
    assert profile(F(99, 1000)) == 0
    assert all(lo >= F(1, 10) for lo, _, _ in profile.intervals())
    assert profile(F(3, 25) + 7) == profile(F(3, 25))  # 1-periodic


def test_profile_validation():
    with pytest.raises(ValueError):
        PhiProfile((0, F(1, 2), F(1, 3), 1), (0, 1, 0), 8)
    with pytest.raises(ValueError):
        PhiProfile.from_intervals({1: [(0, F(1, 2))], 2: [(F(1, 3), F(2, 3))]}, 8)


def test_prime_products_at_one():
    oracle = math.prod(p ** phi_table_z2(F(1, p)) for p in primes_upto(8))
    assert prime_product(PROFILE_Z2, 1).value == oracle == 315
    assert prime_product(PROFILE_Z3, 1).value == 315
    assert prime_product(PROFILE_Z3, 0).value == 1


@pytest.mark.parametrize("n", range(1, 31))
def test_phihat_divides_phi(n):
    assert prime_product(PROFILE_Z2, n).value % prime_product(PROFILE_Z3, n).value == 0


def test_beyond_cutoff_primes_are_reported_and_harmless():
    # primes in (8n, 16n] can carry a non-zero exponent; they do divide q_n anyway
    pp = prime_product(PROFILE_Z3, 3, probe_limit=16)
    assert pp.beyond_cutoff == {29: 1}
    for n in range(1, 13):
        q = exact_triple(n)[0]
        for prof in (PROFILE_Z2, PROFILE_Z3):
            for p, e in prime_product(prof, n, probe_limit=16).beyond_cutoff.items():
                assert valuation(q, p) >= e


def test_divisibility_n1():
    q = exact_triple(1)[0]
    assert q % 315 == 0
    rep = verify_divisibility(SimpleNamespace(n=1, q=q, p=exact_triple(1)[1], phat=exact_triple(1)[2]))
    assert rep["ok"]


def test_divisibility_n0():
    rep = verify_divisibility(SimpleNamespace(n=0, q=1, p=F(0), phat=F(0)))
    assert rep["ok"]


@pytest.mark.parametrize("n", range(2, 21))
def test_divisibility_up_to_20(n):
    q, p, ph = exact_triple(n)
    rep = verify_divisibility(SimpleNamespace(n=n, q=q, p=p, phat=ph))
    assert rep["ok"], rep["checks"]


def test_divisibility_failure_names_the_prime():
    q, p, ph = exact_triple(4)
    fac = prime_product(PROFILE_Z3, 4).factorization
    prime = max(fac)
    stripped = q
    while stripped % prime == 0:
        stripped //= prime
    rep = verify_divisibility(SimpleNamespace(n=4, q=stripped, p=p, phat=ph))
    assert not rep["ok"]
    assert rep["checks"]["phihat_q"]["bad_primes"] == {str(prime): -fac[prime]}


@given(st.integers(1, 200))
def test_prime_product_exponents(n):
    pp = prime_product(PROFILE_Z3, n)
    for p in primes_upto(8 * n):
        assert pp.factorization.get(p, 0) == PROFILE_Z3(F(n, p))
