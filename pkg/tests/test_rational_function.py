import itertools
import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from zetaforms.errors import InvalidParameters, PoleEvaluation
from zetaforms.linear_forms import p_z2, p_z3, q_z2, q_z3
from zetaforms.numeric import lcm_upto
from zetaforms.rational_function import (
    ParamSetZ2,
    ParamSetZ3,
    check_integer_valued,
    decompose_z2,
    decompose_z3,
    double_residues_by_limit_z3,
    eval_R,
    eval_Rhat,
    params_from_json,
    residues_by_limit_z2,
    z2_example,
    z3_example,
)

F = Fraction


# ---- strategies for valid parameter sets


@st.composite
def z2_params(draw):
    b = [draw(st.integers(-3, 4)) for _ in range(3)]
    a = [max(b) + draw(st.integers(0, 7)) for _ in range(4)]
    b4 = max(a) + 1 + draw(st.integers(0, 6))
    assume(sum(a) - sum(b) - b4 >= 0)
    return ParamSetZ2(a, b + [b4])


@st.composite
def z3_params(draw):
    b0 = draw(st.integers(-2, 6))
    b1 = draw(st.integers(-2, 3))
    low = max(F(b0, 2), b1)
    a0 = 2 * math.ceil(low) + draw(st.integers(0, 8))
    a = [a0] + [math.ceil(low) + draw(st.integers(0, 6)) for _ in range(3)]
    top = max(F(a0, 2), *a[1:])
    b2 = math.floor(top) + 1 + draw(st.integers(0, 6))
    b3 = math.floor(top) + 1 + draw(st.integers(0, 6))
    assume(sum(a) <= b0 + b1 + b2 + b3 - 2)
    return ParamSetZ3(a, [b0, b1, b2, b3])


def _nonpole_points(poles, count=20, seed=3):
    import random

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        t = F(rng.randint(-400, 400), rng.randint(2, 37))
        if t.denominator != 1 or -t not in poles:
            out.append(t)
    return out


# ---- evaluation


def test_eval_R_at_zero_matches_gamma_quotient():
    P = z2_example(1)
    a, b = P.a, P.b
    # R(0) from factorials: Pi * prod (a_j-1)!/(b_j-1)! / ((b4-1)!/(a4-1)!)
    direct = P.Pi * math.prod(F(math.factorial(a[j] - 1), math.factorial(b[j] - 1)) for j in range(3)) \
        * F(math.factorial(a[3] - 1), math.factorial(b[3] - 1))
    assert eval_R(P, 0) == direct


def test_R_zero_orders():
    P = ParamSetZ2((5, 6, 7, 8), (0, 2, 3, 12))
    f = P.rational
    # simple zero at -b1* = 0; double zero at -b2* = -2 (b2* > b1*)
    assert f.local(0).order == 1
    assert f.local(-2).order == 2


def test_eval_pole_raises():
    P = z2_example(1)
    with pytest.raises(PoleEvaluation):
        eval_R(P, -P.b[3] + 1)
    T = z3_example(1)
    with pytest.raises(PoleEvaluation):
        eval_Rhat(T, -T.a[2])


def test_invalid_parameter_sets():
    with pytest.raises(InvalidParameters):
        ParamSetZ2((1, 2, 3, 4), (0, 0, 5, 9))  # b3 > a1
    with pytest.raises(InvalidParameters):
        ParamSetZ2((1, 2, 3, 9), (0, 0, 0, 9))  # a4 = b4
    with pytest.raises(InvalidParameters):
        ParamSetZ3((2, 1, 1, 1), (2, 1, 2, 1))  # sum(a) > sum(b) - 2
    with pytest.raises(InvalidParameters):
        ParamSetZ3((4, 1, 1, 1), (2, 1, 2, 2))  # a0/2 not below b2
    with pytest.raises(InvalidParameters):
        ParamSetZ2((1, 2), (0, 0, 0, 4))


def test_json_roundtrip():
    P = z2_example(3)
    assert params_from_json(P.to_json(), "z2") == P
    T = z3_example(3)
    assert params_from_json(T.to_json(), "z3") == T
    assert json.loads(T.to_json()) == {"a": list(T.a), "b": list(T.b)}
    with pytest.raises(InvalidParameters):
        params_from_json(P.to_json(), "z5")


# ---- zeta(2) decomposition


@pytest.mark.parametrize("n", [1, 2, 3])
def test_C_closed_form_equals_limit(n):
    P = z2_example(n)
    pf = decompose_z2(P)
    assert pf.C == residues_by_limit_z2(P)
    assert all(isinstance(c, int) for c in pf.C.values())


def test_polynomial_part_size():
    P = z2_example(1)
    assert P.d == 15
    assert len(decompose_z2(P).poly) == 16


def test_reconstruction_z2_at_one_third():
    P = z2_example(1)
    assert decompose_z2(P)(F(1, 3)) == eval_R(P, F(1, 3))


@given(z2_params())
def test_reconstruction_z2_random(P):
    pf = decompose_z2(P)
    for t in _nonpole_points(set(P.pole_range), count=5):
        assert pf(t) == eval_R(P, t)


@given(z2_params())
def test_polynomial_coefficients_denominator(P):
    Dc = lcm_upto(P.c)
    assert all((Dc * A).denominator == 1 for A in decompose_z2(P).poly)


@pytest.mark.parametrize("n", range(0, 11))
def test_polynomial_coefficients_denominator_example(n):
    P = z2_example(n)
    Dc = lcm_upto(P.c)
    assert all((Dc * A).denominator == 1 for A in decompose_z2(P).poly)


# ---- zeta(3) decomposition


def test_reconstruction_z3_at_one_fifth():
    T = z3_example(1)
    assert decompose_z3(T)(F(1, 5)) == eval_Rhat(T, F(1, 5))


@given(z3_params())
def test_reconstruction_z3_random(T):
    pf = decompose_z3(T)
    poles = set(T.pole_range)
    for t in _nonpole_points(poles, count=5):
        assert pf(t) == eval_Rhat(T, t)
    assert sum(pf.B.values(), F(0)) == 0
    assert all(isinstance(A, int) for A in pf.A.values())
    Dm = lcm_upto(T.b_denominator_index)
    assert all((Dm * B).denominator == 1 for B in pf.B.values())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_A_closed_form_equals_limit(n):
    T = z3_example(n)
    A = decompose_z3(T).A
    assert {k: v for k, v in A.items() if v} == double_residues_by_limit_z3(T)


def test_B_sum_vanishes_example():
    for n in range(1, 6):
        assert sum(decompose_z3(z3_example(n)).B.values(), F(0)) == 0


def test_double_zero_range():
    T = z3_example(1)
    b, a = T.b, T.a
    lo = max(math.ceil(F(b[0], 2)), b[1])
    hi = min((a[0] - 1) // 2, min(a[1:]) - 1)
    f = T.rational
    for l in range(lo - 3, hi + 4):
        order = f.local(-l).order
        assert (order == 2) == (lo <= l <= hi), l


def test_rhat_decays_like_one_over_t_squared():
    T = z3_example(1)
    vals = [abs(eval_Rhat(T, 10**j) * 10 ** (2 * j)) for j in range(3, 9)]
    assert max(vals) < 2 * vals[-1]
    # and it is not O(1/t^3): t^2 R^(t) tends to a non-zero constant
    assert vals[-1] > 0


def _cancelled_mp(T: ParamSetZ3, k: int):
    """t -> R^(t)(t+k)^2 as a plain product, the factors (t+k) removed by hand."""
    f = T.rational
    c = f.const

    def g(t):
        num = mpmath.mpf(c.numerator) / c.denominator
        den = mpmath.mpf(1)
        removed = 0
        for blk in f.num:
            for j in range(blk.lo, blk.hi + 1):
                num *= blk.scale * t + j
        for blk in f.den:
            for j in range(blk.lo, blk.hi + 1):
                if blk.scale == 1 and j == k:
                    removed += 1
                    continue
                den *= blk.scale * t + j
        return num / den * (t + k) ** (2 - removed)

    return g


def test_B_matches_finite_difference():
    T = z3_example(1)
    pf = decompose_z3(T)
    with mpmath.workdps(50):
        for k, B in pf.B.items():
            d = mpmath.diff(_cancelled_mp(T, k), -k)
            assert abs(d - mpmath.mpf(B.numerator) / B.denominator) < mpmath.mpf(10) ** -30, k


# ---- permutation invariance of r/Pi


def test_form_over_Pi_invariant_z2():
    P = z2_example(1)
    ref = (F(q_z2(P)) / P.Pi, p_z2(P) / P.Pi)
    for perm in itertools.permutations(range(4)):
        Q = P.permuted(perm)
        assert (F(q_z2(Q)) / Q.Pi, p_z2(Q) / Q.Pi) == ref


def test_form_over_Pi_invariant_z3():
    T = z3_example(1)
    ref = (F(q_z3(T)) / T.Pi, p_z3(T) / T.Pi)
    for perm in itertools.permutations(range(3)):
        U = T.permuted(perm)
        assert (F(q_z3(U)) / U.Pi, p_z3(U) / U.Pi) == ref


# ---- integer-valued polynomials


def test_single_factor_all_points():
    import random

    rng = random.Random(11)
    for _ in range(15):
        a = rng.randint(-6, 12)
        b = rng.randint(a - 12, a - 1)
        for k in range(-20, 21):
            for l in range(-20, 21, 3):
                if k != l:
                    assert check_integer_valued([(a, b)], k, l) == (True, True, True)


@given(st.lists(st.tuples(st.integers(-10, 10), st.integers(1, 10)), min_size=3, max_size=3),
       st.integers(-30, 30), st.integers(-30, 30))
def test_three_factor_products(spans, k, l):
    assume(k != l)
    factors = [(b + s, b) for b, s in spans]
    assert check_integer_valued(factors, k, l) == (True, True, True)


def test_constant_factors():
    assert check_integer_valued([(1, 0), (5, 4)], 3, -2) == (True, True, True)


def test_bad_factor_rejected():
    with pytest.raises(InvalidParameters):
        check_integer_valued([(2, 2)], 0, 1)
    with pytest.raises(ValueError):
        check_integer_valued([(3, 1)], 4, 4)
