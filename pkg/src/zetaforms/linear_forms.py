"""Exact coefficients of the linear forms q*zeta(2) - p and q*zeta(3) - p^.

Sign convention: the zeta(2) forms are normalised so that ``q`` agrees with
its terminating 4F3 representation, which makes ``q`` positive for the
example construction.  In terms of the residues C_k this is
``q = (-1)^(d+1) * sum_k C_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath

from .errors import DegenerateParameters, InvalidParameters, PoleInLowerParams, PrecisionTooLow
from .numeric import as_fraction, harmonic, hyp, lcm_upto, pochhammer
from .rational_function import (
    ParamSetZ2,
    ParamSetZ3,
    binom,
    decompose_z2,
    decompose_z3,
    z2_example,
    z3_example,
)

__all__ = [
    "q_z2",
    "p_z2",
    "q_z2_hyper",
    "q_z3",
    "p_z3",
    "q_z3_hyper",
    "q_example_hyper_z2",
    "q_example_hyper_z3",
    "zeta2",
    "zeta3",
    "Residual",
    "residual",
    "default_precision",
    "FormRecord",
    "form_record",
    "whipple_sides",
    "whipple_verify",
    "whipple_specialization",
]


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


# --------------------------------------------------------------------------
# zeta(2) side


def q_z2(params: ParamSetZ2) -> int:
    pf = decompose_z2(params)
    return _sign(params.d + 1) * sum(pf.C.values())


def p_z2(params: ParamSetZ2) -> Fraction:
    pf = decompose_z2(params)
    d, a2s = params.d, params.a_sorted[1]
    tail = sum((c * harmonic(k - a2s, 2) for k, c in pf.C.items()), Fraction(0))
    # sum_l (-1)^(d+l) A_l / (l+1) over the common denominator of A_l and D_{d+1}
    poly = Fraction(0)
    if pf.poly:
        den = math.lcm(*(A.denominator for A in pf.poly))
        Dd = lcm_upto(d + 1)
        acc = 0
        for l, A in enumerate(pf.poly):
            term = int(A * den) * (Dd // (l + 1))
            acc += -term if (d + l) % 2 else term
        poly = Fraction(acc, den * Dd)
    return _sign(d + 1) * tail + poly


def q_z2_hyper(params: ParamSetZ2) -> int:
    """q through its terminating 4F3 form."""
    a, b = params.a, params.b
    a1s, a2s, a3s, a4s = params.a_sorted
    pre = (_sign(b[3] - a4s - 1) * binom(a4s - b[0], a4s - a[0]) * binom(a4s - b[1], a4s - a[1])
           * binom(a4s - b[2], a4s - a[2]) * binom(b[3] - a[3] - 1, a4s - a[3]))
    value = pre * hyp(
        [-(b[3] - a4s - 1), a4s - b[0] + 1, a4s - b[1] + 1, a4s - b[2] + 1],
        [a4s - a1s + 1, a4s - a2s + 1, a4s - a3s + 1],
    )
    assert value.denominator == 1
    return int(value)


def q_example_hyper_z2(n: int) -> int:
    """The closed 4F3 expression for q_n of the example construction."""
    f = math.factorial
    pre = Fraction(_sign(n) * f(9 * n) * f(10 * n), f(n) * f(2 * n) * f(3 * n) * f(5 * n) * f(8 * n))
    value = pre * hyp([-5 * n, 10 * n + 1, 9 * n + 1, 8 * n + 1], [3 * n + 1, 2 * n + 1, n + 1])
    assert value.denominator == 1
    return int(value)


# --------------------------------------------------------------------------
# zeta(3) side


def q_z3(params: ParamSetZ3) -> int:
    pf = decompose_z3(params)
    return _sign(params.d) * sum(pf.A.values())


def p_z3(params: ParamSetZ3) -> Fraction:
    pf = decompose_z3(params)
    s = params.a_star
    cubic = sum((c * harmonic(k - s, 3) for k, c in pf.A.items()), Fraction(0))
    square = sum((c * harmonic(k - s, 2) for k, c in pf.B.items() if c), Fraction(0))
    return _sign(params.d) * (cubic + square / 2)


def q_z3_hyper(params: ParamSetZ3) -> int:
    """q^ through its terminating 5F4 form (needs a0/2 <= a3*)."""
    a, b = params.a, params.b
    a1s, a2s, a3s = params.a_sorted
    if a[0] > 2 * a3s:
        raise InvalidParameters(f"the 5F4 form assumes a0/2 <= a3*, got a0 = {a[0]}, a3* = {a3s}")
    half = Fraction(1, 2)
    pre = (binom(2 * a3s - b[0], 2 * a3s - a[0]) * binom(a3s - b[1], a3s - a[1])
           * binom(b[2] - a[2] - 1, a3s - a[2]) * binom(b[3] - a[3] - 1, a3s - a[3]))
    value = pre * hyp(
        [-(b[2] - a3s - 1), -(b[3] - a3s - 1), a3s - b[1] + 1,
         a3s - half * b[0] + half, a3s - half * b[0] + 1],
        [a3s - a1s + 1, a3s - a2s + 1, a3s - half * a[0] + half, a3s - half * a[0] + 1],
    )
    assert value.denominator == 1
    return int(value)


def q_example_hyper_z3(n: int) -> int:
    """The closed 5F4 expression for q^_n of the example construction."""
    f = math.factorial
    pre = Fraction(f(7 * n) * f(9 * n) * f(10 * n),
                   f(n) * f(2 * n) * f(4 * n) * f(5 * n) * f(6 * n) * f(8 * n))
    half = Fraction(1, 2)
    value = pre * hyp(
        [-6 * n, -6 * n, 10 * n + 1, Fraction(9 * n, 2) + half, Fraction(9 * n, 2) + 1],
        [2 * n + 1, n + 1, 2 * n + half, 2 * n + 1],
    )
    assert value.denominator == 1
    return int(value)


# --------------------------------------------------------------------------
# high-precision residuals

_GUARD_BITS = 32


@lru_cache(maxsize=32)
def zeta2(bits: int) -> mpmath.mpf:
    with mpmath.workprec(bits + _GUARD_BITS):
        return +(mpmath.pi**2 / 6)


@lru_cache(maxsize=32)
def _zeta3_fixed(bits: int) -> int:
    """floor-ish 2^W * zeta(3) with |error| < 2^-(W-bits) ulp, W = bits + guard.

    Uses zeta(3) = 5/2 * sum_{k>=1} (-1)^(k+1) / (k^3 binom(2k, k)); the series
    alternates with decreasing terms, so the tail is below the first omitted term.
    """
    W = bits + _GUARD_BITS
    one = 1 << (W + 2)
    total = 0
    central = 2  # binom(2k, k) at k = 1
    k = 1
    while True:
        term = one // (k**3 * central)
        if term == 0:
            break
        total += term if k % 2 else -term
        central = central * (2 * k + 1) * (2 * k + 2) // ((k + 1) ** 2)
        k += 1
    return (5 * total) >> 3  # 5/2 and drop the two extra bits


@lru_cache(maxsize=32)
def zeta3(bits: int) -> mpmath.mpf:
    W = bits + _GUARD_BITS
    with mpmath.workprec(W):
        return mpmath.ldexp(mpmath.mpf(_zeta3_fixed(bits)), -W)


class Residual(NamedTuple):
    value: mpmath.mpf
    error: mpmath.mpf

    @property
    def log_abs(self) -> float:
        return float(mpmath.log(abs(self.value)))


def default_precision(n: int) -> int:
    return max(256, 80 * n)


def residual(q: int, p, constant: str, precision_bits: int) -> Residual:
    """q*zeta - p with an error bound at most 2^-precision_bits * |q|."""
    if precision_bits < 64:
        raise InvalidParameters("precision_bits must be at least 64")
    p = as_fraction(p)
    W = precision_bits + _GUARD_BITS
    if constant in ("zeta2", "z2"):
        z = zeta2(precision_bits)
    elif constant in ("zeta3", "z3"):
        z = zeta3(precision_bits)
    else:
        raise InvalidParameters(f"unknown constant {constant!r}")
    with mpmath.workprec(W):
        value = q * z - mpmath.mpf(p.numerator) / p.denominator
        scale = abs(q) * 2 + abs(mpmath.mpf(p.numerator) / p.denominator) + 1
        error = mpmath.ldexp(scale, -(W - 4))
    if value == 0 or abs(value) <= error:
        raise PrecisionTooLow(f"|q*{constant} - p| is below the error bound at {precision_bits} bits")
    return Residual(value, error)


# --------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class FormRecord:
    n: int
    q: int
    p: Fraction | None
    phat: Fraction | None
    r: Residual | None
    rhat: Residual | None
    precision_bits: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": str(self.q),
            "p_num": None if self.p is None else str(self.p.numerator),
            "p_den": None if self.p is None else str(self.p.denominator),
            "phat_num": None if self.phat is None else str(self.phat.numerator),
            "phat_den": None if self.phat is None else str(self.phat.denominator),
            "log_abs_r": None if self.r is None else self.r.log_abs,
            "log_abs_rhat": None if self.rhat is None else self.rhat.log_abs,
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FormRecord":
        """Exact fields only; residuals are recomputed at the stored precision."""
        n, q, bits = int(doc["n"]), int(doc["q"]), int(doc["precision_bits"])
        p = phat = None
        if doc.get("p_num") is not None:
            p = Fraction(int(doc["p_num"]), int(doc["p_den"]))
        if doc.get("phat_num") is not None:
            phat = Fraction(int(doc["phat_num"]), int(doc["phat_den"]))
        r = None if p is None else residual(q, p, "zeta2", bits)
        rhat = None if phat is None else residual(q, phat, "zeta3", bits)
        return cls(n, q, p, phat, r, rhat, bits)


def form_record(n: int, precision_bits: int | None = None, construction: str = "paired") -> FormRecord:
    """Record for the example constructions at index n.

    ``paired`` carries q, p and p^ (checking q = q^), ``z2-ex`` only the
    zeta(2) side and ``z3-ex`` only the zeta(3) side.
    """
    bits = precision_bits or default_precision(n)
    p = phat = r = rhat = None
    if construction in ("paired", "z2-ex"):
        P = z2_example(n)
        q = q_z2(P)
        p = p_z2(P)
        r = residual(q, p, "zeta2", bits)
    if construction in ("paired", "z3-ex"):
        T = z3_example(n)
        qh = q_z3(T)
        if construction == "paired" and qh != q:
            raise AssertionError(f"q_{n} != q^_{n}")
        q = qh
        phat = p_z3(T)
        rhat = residual(q, phat, "zeta3", bits)
    if construction not in ("paired", "z2-ex", "z3-ex"):
        raise InvalidParameters(f"unknown construction {construction!r}")
    return FormRecord(n, q, p, phat, r, rhat, bits)


@lru_cache(maxsize=None)
def exact_triple(n: int) -> tuple[int, Fraction, Fraction]:
    """(q_n, p_n, p^_n) of the example constructions (cached)."""
    q = q_z2(z2_example(n))
    return q, p_z2(z2_example(n)), p_z3(z3_example(n))


# --------------------------------------------------------------------------
# Whipple's 4F3 -> 5F4 transformation


def _whipple_params(a, N: int, f, g, h):
    a, f, g, h = (as_fraction(x) for x in (a, f, g, h))
    b = Fraction(-N)
    half = Fraction(1, 2)
    e = (1 + f + b - g) * half
    upper4 = [f, 1 + f - h, h - a, b]
    lower4 = [h, 1 + f + a - h]
    upper5 = [a, b, 1 + f - g, f * half, f * half + half]
    lower5 = [h, 1 + f + a - h, e, e + half]
    # a vanishing lower parameter inside the range 0..N makes a term 0/0 or x/0
    # even when some upper parameter stops the series earlier
    for y in lower4 + lower5:
        if y.denominator == 1 and -(N - 1) <= y <= 0:
            raise DegenerateParameters(f"lower parameter {y} vanishes within 0..{N}")
    return a, f, g, h, upper4, lower4, upper5, lower5


def whipple_sides(a, N: int, f, g, h) -> tuple[Fraction, Fraction]:
    """Both sides multiplied by (g)_N, which removes the pole when (g)_N = 0.

    Returns ``(sum_k t_k (g+k)_(N-k), (g-f)_N * 5F4)`` where t_k is the k-th 4F3
    term without its (g)_k denominator.
    """
    if N < 0:
        raise InvalidParameters("N must be a natural number")
    a, f, g, h, upper4, lower4, upper5, lower5 = _whipple_params(a, N, f, g, h)
    try:
        lhs = Fraction(0)
        term = Fraction(1)
        for k in range(N + 1):
            lhs += term * pochhammer(g + k, N - k)
            num = math.prod(x + k for x in upper4)
            den = (k + 1) * math.prod(y + k for y in lower4)
            if num == 0:
                break
            if den == 0:
                raise PoleInLowerParams("4F3 lower parameter vanishes")
            term = term * num / den
        rhs = pochhammer(g - f, N) * hyp(upper5, lower5)
    except (PoleInLowerParams, ZeroDivisionError) as exc:
        raise DegenerateParameters(str(exc)) from exc
    return lhs, rhs


def whipple_verify(a, N: int, f, g, h, allow_limit: bool = False) -> bool:
    """Exact check of the 4F3 = (g-f)_N/(g)_N * 5F4 transformation with b = -N.

    When (g)_N vanishes the identity only makes sense as a limit in g; pass
    ``allow_limit=True`` to compare the cleared sides from :func:`whipple_sides`.
    """
    a, f, g, h, upper4, lower4, upper5, lower5 = _whipple_params(a, N, f, g, h)
    gN = pochhammer(g, N)
    if gN == 0:
        if not allow_limit:
            raise DegenerateParameters(f"(g)_N = 0 for g = {g}, N = {N}")
        lhs, rhs = whipple_sides(a, N, f, g, h)
        return lhs == rhs
    try:
        lhs = hyp(upper4, lower4 + [g])
        rhs = pochhammer(g - f, N) / gN * hyp(upper5, lower5)
    except (PoleInLowerParams, ZeroDivisionError) as exc:
        raise DegenerateParameters(str(exc)) from exc
    return lhs == rhs


def whipple_specialization(n: int) -> dict:
    """The choice a = b = -6n, f = 9n+1, h = n+1, g -> -n+1.

    The cleared left side equals K * 4F3(-5n, 10n+1, 9n+1, 8n+1; 3n+1, 2n+1, n+1)
    and the cleared right side is (-10n)_{6n} * 5F4(...); the two prefactor
    ratios below must coincide for q_n = q^_n to follow.
    """
    N = 6 * n
    lhs, rhs = whipple_sides(-N, N, 9 * n + 1, -n + 1, n + 1)
    f = math.factorial
    K = (f(5 * n) * pochhammer(9 * n + 1, n) * pochhammer(8 * n + 1, n) * pochhammer(7 * n + 1, n)
         * pochhammer(-6 * n, n) / (f(n) * pochhammer(n + 1, n) * pochhammer(2 * n + 1, n)))
    pre_z2 = Fraction(_sign(n) * f(9 * n) * f(10 * n), f(n) * f(2 * n) * f(3 * n) * f(5 * n) * f(8 * n))
    pre_z3 = Fraction(f(7 * n) * f(9 * n) * f(10 * n),
                      f(n) * f(2 * n) * f(4 * n) * f(5 * n) * f(6 * n) * f(8 * n))
    ratio_z2 = pre_z2 / K
    ratio_z3 = pre_z3 / pochhammer(-10 * n, N)
    return {
        "n": n,
        "sides_equal": lhs == rhs,
        "prefactors_match": ratio_z2 == ratio_z3,
        "q_from_lhs": ratio_z2 * lhs,
        "q_from_rhs": ratio_z3 * rhs,
    }
