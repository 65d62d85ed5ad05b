"""Exact integer/rational kernel.

Everything here works on Python ints and :class:`fractions.Fraction`, which
are always kept in lowest terms with a positive denominator.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import NonTerminating, PoleInLowerParams

__all__ = [
    "as_fraction",
    "primes_upto",
    "lcm_upto",
    "lcm_upto_fold",
    "valuation",
    "factorize",
    "pochhammer",
    "HypSeries",
    "sum_terminating_pfq",
    "hyp",
    "range_prod",
    "range_recip_sum",
    "harmonic",
]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass an int, Fraction or string")
    return Fraction(x)


# --------------------------------------------------------------------------
# primes and D_m

_sieve_lock = threading.Lock()
_sieve: bytearray = bytearray(b"\x00\x00")
_primes: list[int] = []


def _extend_sieve(m: int) -> None:
    global _sieve, _primes
    size = max(m + 1, 2 * len(_sieve))
    sieve = bytearray([1]) * size
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(size - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, size, p)))
    _sieve = sieve
    _primes = [i for i in range(size) if sieve[i]]


def primes_upto(m: int) -> list[int]:
    """All primes p <= m (shared sieve, grown on demand)."""
    if m < 2:
        return []
    with _sieve_lock:
        if m >= len(_sieve):
            _extend_sieve(m)
        primes = _primes
    # bisect on the shared list
    lo, hi = 0, len(primes)
    while lo < hi:
        mid = (lo + hi) // 2
        if primes[mid] <= m:
            lo = mid + 1
        else:
            hi = mid
    return primes[:lo]


_lcm_lock = threading.Lock()
_lcm_table: dict[int, int] = {0: 1, 1: 1}


def lcm_upto(m: int) -> int:
    """D_m = lcm(1, ..., m), built as prod_{p <= m} p^floor(log_p m)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    with _lcm_lock:
        hit = _lcm_table.get(m)
    if hit is not None:
        return hit
    value = 1
    for p in primes_upto(m):
        pk = p
        while pk * p <= m:
            pk *= p
        value *= pk
    with _lcm_lock:
        _lcm_table[m] = value
    return value


def lcm_upto_fold(m: int) -> int:
    """Reference D_m by folding pairwise lcm; slow, used as a cross-check."""
    return reduce(math.lcm, range(1, m + 1), 1)


def valuation(x, p: int) -> int:
    """p-adic valuation of a non-zero int or Fraction."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of |n| (n != 0); fine for desk-scale n."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# --------------------------------------------------------------------------
# Pochhammer and terminating hypergeometric sums


def pochhammer(a, n: int) -> Fraction:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a = as_fraction(a)
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


def _nonpositive_int(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


@dataclass(frozen=True)
class HypSeries:
    """A terminating (p+1)F(p) series with exact parameters."""

    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    argument: Fraction = Fraction(1)

    def __init__(self, upper: Iterable, lower: Iterable, argument=1):
        object.__setattr__(self, "upper", tuple(as_fraction(a) for a in upper))
        object.__setattr__(self, "lower", tuple(as_fraction(b) for b in lower))
        object.__setattr__(self, "argument", as_fraction(argument))

    @property
    def termination_index(self) -> int:
        """Largest k with a non-zero term, i.e. min(-a) over non-positive integer a."""
        stops = [-int(a) for a in self.upper if _nonpositive_int(a)]
        if not stops:
            raise NonTerminating(f"no upper parameter of {self.upper} is a non-positive integer")
        return min(stops)

    def check(self) -> int:
        N = self.termination_index
        for b in self.lower:
            if _nonpositive_int(b) and -b < N:
                raise PoleInLowerParams(f"lower parameter {b} vanishes before term {N}")
        return N


def sum_terminating_pfq(s: HypSeries) -> Fraction:
    """Exact value of a terminating hypergeometric series.

    Terms are produced by the ratio t_{k+1}/t_k, so no factorials are formed.
    """
    N = s.check()
    term = Fraction(1)
    total = Fraction(1)
    z = s.argument
    for k in range(N):
        num = z
        for a in s.upper:
            num *= a + k
        den = k + 1
        for b in s.lower:
            den *= b + k
        term = term * num / den
        total += term
    return total


def hyp(upper: Sequence, lower: Sequence, z=1) -> Fraction:
    """Shorthand for ``sum_terminating_pfq(HypSeries(upper, lower, z))``."""
    return sum_terminating_pfq(HypSeries(upper, lower, z))


# --------------------------------------------------------------------------
# products and reciprocal sums over integer ranges, skipping 0

_fact_lock = threading.Lock()
_fact_cache: dict[int, int] = {}


def _fact(m: int) -> int:
    with _fact_lock:
        v = _fact_cache.get(m)
    if v is None:
        v = math.factorial(m)
        if m > 64:
            with _fact_lock:
                if len(_fact_cache) > 4096:
                    _fact_cache.clear()
                _fact_cache[m] = v
    return v


def range_prod(lo: int, hi: int) -> int:
    """prod of i for lo <= i <= hi, i != 0 (empty product is 1)."""
    if hi < lo:
        return 1
    if hi - lo < 48 and not lo <= 0 <= hi:
        return math.prod(range(lo, hi + 1))
    if lo > 0:
        return _fact(hi) // _fact(lo - 1)
    if hi < 0:
        mag = _fact(-lo) // _fact(-hi - 1)
        return -mag if (hi - lo + 1) % 2 else mag
    neg = _fact(-lo)
    if lo % 2:
        neg = -neg
    return neg * _fact(hi)


class _HarmonicTable:
    """Append-only exact partial sums sum_{l<=m} 1/l^s."""

    def __init__(self, s: int):
        self.s = s
        self.values = [Fraction(0)]
        self.lock = threading.Lock()

    def get(self, m: int) -> Fraction:
        if m < 0:
            raise ValueError("m must be non-negative")
        with self.lock:
            values = self.values
            while len(values) <= m:
                l = len(values)
                values.append(values[-1] + Fraction(1, l**self.s))
            return values[m]


_harmonic_tables = {s: _HarmonicTable(s) for s in (1, 2, 3)}


def harmonic(m: int, s: int = 1) -> Fraction:
    """sum_{l=1}^{m} 1/l^s for s in {1, 2, 3} (cached)."""
    table = _harmonic_tables.get(s)
    if table is None:
        table = _harmonic_tables.setdefault(s, _HarmonicTable(s))
    return table.get(m)


def range_recip_sum(lo: int, hi: int) -> Fraction:
    """sum of 1/i for lo <= i <= hi, i != 0."""
    if hi < lo:
        return Fraction(0)
    if lo > 0:
        return harmonic(hi) - harmonic(lo - 1)
    if hi < 0:
        return -(harmonic(-lo) - harmonic(-hi - 1))
    return harmonic(hi) - harmonic(-lo)
