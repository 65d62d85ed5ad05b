"""The rational functions R(t), R^(t) and their partial-fraction data.

Both functions are products of blocks of consecutive linear factors
``(s*t + j)`` for ``lo <= j <= hi`` with ``s`` in {1, 2}, so every local
quantity at an integer (or half-integer) point reduces to products of
consecutive integers and harmonic-type sums.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidParameters, PoleEvaluation
from .numeric import as_fraction, lcm_upto, range_prod, range_recip_sum

__all__ = [
    "Block",
    "FactoredRational",
    "Local",
    "ParamSetZ2",
    "ParamSetZ3",
    "PartialFractionZ2",
    "PartialFractionZ3",
    "binom",
    "z2_from_generators",
    "z3_from_generators",
    "z2_example",
    "z3_example",
    "Z2_EXAMPLE_GENERATORS",
    "Z3_EXAMPLE_GENERATORS",
    "eval_R",
    "eval_Rhat",
    "decompose_z2",
    "decompose_z3",
    "residues_by_limit_z2",
    "double_residues_by_limit_z3",
    "check_integer_valued",
    "params_from_json",
]


def binom(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


# --------------------------------------------------------------------------
# factored rational functions


@dataclass(frozen=True)
class Block:
    """The factors (scale*t + j), lo <= j <= hi (empty when hi < lo)."""

    scale: int
    lo: int
    hi: int

    def __len__(self):
        return max(0, self.hi - self.lo + 1)


class Local(NamedTuple):
    """f(t) = lead * (t - t0)**order * (1 + logderiv*(t - t0) + ...)."""

    order: int
    lead: Fraction
    logderiv: Fraction | None


@dataclass(frozen=True)
class FactoredRational:
    const: Fraction
    num: tuple[Block, ...]
    den: tuple[Block, ...]

    def local(self, t0, with_logderiv: bool = True) -> Local:
        t0 = as_fraction(t0)
        order = 0
        lead = self.const
        logd = Fraction(0) if with_logderiv else None
        for sign, blocks in ((1, self.num), (-1, self.den)):
            for blk in blocks:
                if len(blk) == 0:
                    continue
                u = blk.scale * t0
                if u.denominator == 1:
                    u = int(u)
                    lo, hi = blk.lo + u, blk.hi + u
                    prod = range_prod(lo, hi)
                    if lo <= 0 <= hi:
                        order += sign
                        prod *= blk.scale
                    if with_logderiv:
                        logd += sign * blk.scale * range_recip_sum(lo, hi)
                else:
                    a, b = u.numerator, u.denominator
                    ints = [a + j * b for j in range(blk.lo, blk.hi + 1)]
                    prod = Fraction(math.prod(ints), b ** len(ints))
                    if with_logderiv:
                        logd += sign * blk.scale * b * sum(Fraction(1, x) for x in ints)
                lead = lead * prod if sign > 0 else lead / prod
        return Local(order, lead, logd)

    def __call__(self, t) -> Fraction:
        loc = self.local(t, with_logderiv=False)
        if loc.order < 0:
            raise PoleEvaluation(f"pole of order {-loc.order} at t = {t}")
        return loc.lead if loc.order == 0 else Fraction(0)

    def derivative(self, t) -> Fraction:
        loc = self.local(t)
        if loc.order < 0:
            raise PoleEvaluation(f"pole of order {-loc.order} at t = {t}")
        if loc.order == 0:
            return loc.lead * loc.logderiv
        if loc.order == 1:
            return loc.lead
        return Fraction(0)

    def laurent_coefficient(self, t0, power: int) -> Fraction:
        """Coefficient of (t - t0)**power; only the two leading ones are exposed."""
        loc = self.local(t0)
        if power < loc.order:
            return Fraction(0)
        if power == loc.order:
            return loc.lead
        if power == loc.order + 1:
            return loc.lead * loc.logderiv
        raise ValueError("only the two leading Laurent coefficients are available")

    def degree_at_infinity(self) -> int:
        """deg(numerator) - deg(denominator)."""
        return sum(len(b) for b in self.num) - sum(len(b) for b in self.den)


# --------------------------------------------------------------------------
# parameter sets


def _ints(xs: Iterable, n: int, name: str) -> tuple[int, ...]:
    out = tuple(int(x) for x in xs)
    if len(out) != n:
        raise InvalidParameters(f"{name} must have {n} entries, got {len(out)}")
    return out


@dataclass(frozen=True)
class ParamSetZ2:
    """Integer parameters (a1..a4; b1..b4) of the zeta(2) construction."""

    a: tuple[int, int, int, int]
    b: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "a", _ints(self.a, 4, "a"))
        object.__setattr__(self, "b", _ints(self.b, 4, "b"))
        a, b = self.a, self.b
        if not max(b[:3]) <= min(a):
            raise InvalidParameters(f"need b1,b2,b3 <= a1..a4, got a={a}, b={b}")
        if not max(a) < b[3]:
            raise InvalidParameters(f"need a1..a4 < b4, got a={a}, b={b}")
        # d = -1 only happens at n = 0 of a generator family; the polynomial part is then empty
        if self.d < -1:
            raise InvalidParameters(f"d = sum(a) - sum(b) = {self.d} < 0")

    @cached_property
    def a_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.a))

    @cached_property
    def b_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.b[:3]))

    @property
    def d(self) -> int:
        return sum(self.a) - sum(self.b)

    @property
    def c(self) -> int:
        return max(self.a[j] - self.b[j] for j in range(3))

    @property
    def c1(self) -> int:
        return max(self.c, self.b[3] - self.a_sorted[1] - 1)

    @property
    def c2(self) -> int:
        return max(self.d + 1, self.b[3] - self.a_sorted[1] - 1)

    @cached_property
    def Pi(self) -> Fraction:
        a, b = self.a, self.b
        den = math.prod(math.factorial(a[j] - b[j]) for j in range(3))
        return Fraction(math.factorial(b[3] - a[3] - 1), den)

    @property
    def pole_range(self) -> range:
        return range(self.a_sorted[3], self.b[3])

    @cached_property
    def rational(self) -> FactoredRational:
        a, b = self.a, self.b
        num = tuple(Block(1, b[j], a[j] - 1) for j in range(3))
        const = Fraction(math.factorial(b[3] - a[3] - 1),
                         math.prod(math.factorial(a[j] - b[j]) for j in range(3)))
        return FactoredRational(const, num, (Block(1, a[3], b[3] - 1),))

    def permuted(self, perm: Sequence[int]) -> "ParamSetZ2":
        return ParamSetZ2(tuple(self.a[i] for i in perm), self.b)

    def to_json(self) -> str:
        return json.dumps({"a": list(self.a), "b": list(self.b)})

    @classmethod
    def from_json(cls, text: str) -> "ParamSetZ2":
        doc = json.loads(text)
        return cls(doc["a"], doc["b"])


@dataclass(frozen=True)
class ParamSetZ3:
    """Integer parameters (a0..a3; b0..b3) of the zeta(3) construction."""

    a: tuple[int, int, int, int]
    b: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "a", _ints(self.a, 4, "a"))
        object.__setattr__(self, "b", _ints(self.b, 4, "b"))
        a, b = self.a, self.b
        half = Fraction(1, 2)
        lower = max(half * b[0], b[1])
        middle = (half * a[0], a[1], a[2], a[3])
        if not lower <= min(middle):
            raise InvalidParameters(f"need b0/2, b1 <= a0/2, a1, a2, a3; got a={a}, b={b}")
        if not max(middle) < min(b[2], b[3]):
            raise InvalidParameters(f"need a0/2, a1, a2, a3 < b2, b3; got a={a}, b={b}")
        if not sum(a) <= sum(b) - 2:
            raise InvalidParameters(f"need sum(a) <= sum(b) - 2; got a={a}, b={b}")

    @cached_property
    def a_sorted(self) -> tuple[int, ...]:
        """a1* <= a2* <= a3*."""
        return tuple(sorted(self.a[1:]))

    @cached_property
    def b_sorted(self) -> tuple[int, ...]:
        """b2* <= b3*."""
        return tuple(sorted(self.b[2:]))

    @property
    def d(self) -> int:
        a, b = self.a, self.b
        return sum(a) - b[0] - b[1]

    @property
    def a_star(self) -> int:
        return min(-(-self.a[0] // 2), self.a_sorted[0])

    @property
    def c1(self) -> int:
        a, b = self.a, self.b
        b2s, b3s = self.b_sorted
        ceil_a0 = -(-a[0] // 2)
        return max(a[0] - b[0], a[1] - b[1], b3s - a[2] - 1, b3s - a[3] - 1,
                   b2s - ceil_a0 - 1, b2s - self.a_sorted[0] - 1)

    @property
    def c2(self) -> int:
        b3s = self.b_sorted[1]
        return max(b3s - -(-self.a[0] // 2) - 1, b3s - self.a_sorted[0] - 1)

    @property
    def b_denominator_index(self) -> int:
        """m with D_m * B_k integral."""
        a, b = self.a, self.b
        b3s = self.b_sorted[1]
        return max(a[0] - b[0], a[1] - b[1], b3s - a[2] - 1, b3s - a[3] - 1)

    @cached_property
    def Pi(self) -> Fraction:
        a, b = self.a, self.b
        return Fraction(math.factorial(b[2] - a[2] - 1) * math.factorial(b[3] - a[3] - 1),
                        math.factorial(a[0] - b[0]) * math.factorial(a[1] - b[1]))

    @property
    def double_pole_range(self) -> range:
        return range(self.a_sorted[2], self.b_sorted[0])

    @property
    def pole_range(self) -> range:
        return range(self.a_sorted[1], self.b_sorted[1])

    @property
    def double_zero_range(self) -> range:
        a, b = self.a, self.b
        return range(max(-(-b[0] // 2), b[1]), min((a[0] - 1) // 2, self.a_sorted[0] - 1) + 1)

    @cached_property
    def rational(self) -> FactoredRational:
        a, b = self.a, self.b
        num = (Block(2, b[0], a[0] - 1), Block(1, b[1], a[1] - 1))
        den = (Block(1, a[2], b[2] - 1), Block(1, a[3], b[3] - 1))
        return FactoredRational(self.Pi, num, den)

    def permuted(self, perm: Sequence[int]) -> "ParamSetZ3":
        """Permute (a1, a2, a3); ``perm`` indexes 0..2."""
        rest = self.a[1:]
        return ParamSetZ3((self.a[0],) + tuple(rest[i] for i in perm), self.b)

    def to_json(self) -> str:
        return json.dumps({"a": list(self.a), "b": list(self.b)})

    @classmethod
    def from_json(cls, text: str) -> "ParamSetZ3":
        doc = json.loads(text)
        return cls(doc["a"], doc["b"])


def params_from_json(text: str, kind: str):
    """Parse ``{"a": [...], "b": [...]}`` as a zeta(2) or zeta(3) parameter set."""
    if kind in ("z2", "zeta2"):
        return ParamSetZ2.from_json(text)
    if kind in ("z3", "zeta3"):
        return ParamSetZ3.from_json(text)
    raise InvalidParameters(f"unknown parameter kind {kind!r}")


Z2_EXAMPLE_GENERATORS = ((8, 7, 10, 9), (0, 1, 2, 15))
Z3_EXAMPLE_GENERATORS = ((16, 8, 9, 10), (11, 0, 16, 16))


def z2_from_generators(alphas: Sequence[int], betas: Sequence[int], n: int) -> ParamSetZ2:
    a = tuple(al * n + 1 for al in alphas)
    b = tuple(be * n + 1 for be in betas[:3]) + (betas[3] * n + 2,)
    return ParamSetZ2(a, b)


def z3_from_generators(alphas: Sequence[int], betas: Sequence[int], n: int) -> ParamSetZ3:
    a = (alphas[0] * n + 2,) + tuple(al * n + 1 for al in alphas[1:])
    b = (betas[0] * n + 2, betas[1] * n + 1, betas[2] * n + 2, betas[3] * n + 2)
    return ParamSetZ3(a, b)


@lru_cache(maxsize=None)
def z2_example(n: int) -> ParamSetZ2:
    """a = (8n+1, 7n+1, 10n+1, 9n+1), b = (1, n+1, 2n+1, 15n+2)."""
    return z2_from_generators(*Z2_EXAMPLE_GENERATORS, n)


@lru_cache(maxsize=None)
def z3_example(n: int) -> ParamSetZ3:
    """a = (16n+2, 8n+1, 9n+1, 10n+1), b = (11n+2, 1, 16n+2, 16n+2)."""
    return z3_from_generators(*Z3_EXAMPLE_GENERATORS, n)


# --------------------------------------------------------------------------
# evaluation and decomposition


def eval_R(params: ParamSetZ2, t) -> Fraction:
    return params.rational(as_fraction(t))


def eval_Rhat(params: ParamSetZ3, t) -> Fraction:
    return params.rational(as_fraction(t))


@dataclass(frozen=True)
class PartialFractionZ2:
    """R(t) = sum_k C[k]/(t+k) + sum_l poly[l] * binom(t + offset - 1, l)."""

    C: dict[int, int]
    poly: tuple[Fraction, ...]
    offset: int

    def __call__(self, t) -> Fraction:
        t = as_fraction(t)
        total = sum((Fraction(c) / (t + k) for k, c in self.C.items()), Fraction(0))
        u = t + self.offset - 1
        basis = Fraction(1)
        for l, A in enumerate(self.poly):
            if l:
                basis = basis * (u - l + 1) / l
            total += A * basis
        return total


@dataclass(frozen=True)
class PartialFractionZ3:
    """R^(t) = sum_k A[k]/(t+k)^2 + sum_k B[k]/(t+k)."""

    A: dict[int, int]
    B: dict[int, Fraction]

    def __call__(self, t) -> Fraction:
        t = as_fraction(t)
        total = sum((Fraction(c) / (t + k) ** 2 for k, c in self.A.items()), Fraction(0))
        return total + sum((c / (t + k) for k, c in self.B.items()), Fraction(0))


def residues_by_limit_z2(params: ParamSetZ2) -> dict[int, int]:
    """(R(t)(t+k))|_{t=-k} by cancelling factors, for every k with a pole."""
    f = params.rational
    out = {}
    for k in range(min(params.a), params.b[3]):
        loc = f.local(-k, with_logderiv=False)
        if loc.order == -1:
            out[k] = int(loc.lead)
        elif loc.order < -1:
            raise AssertionError("R(t) has only simple poles")
    return out


def _closed_C(params: ParamSetZ2) -> dict[int, int]:
    a, b, d = params.a, params.b, params.d
    out = {}
    for k in params.pole_range:
        sign = -1 if (d + b[3] + k) % 2 else 1
        out[k] = sign * (binom(k - b[0], k - a[0]) * binom(k - b[1], k - a[1])
                         * binom(k - b[2], k - a[2]) * binom(b[3] - a[3] - 1, k - a[3]))
    return out


def forward_differences(values: Sequence[Fraction]) -> list[Fraction]:
    """Newton coefficients: [Delta^l f(0) for l in range(len(values))]."""
    den = math.lcm(*(v.denominator for v in values)) if values else 1
    row = [int(v * den) for v in values]
    out = []
    while row:
        out.append(Fraction(row[0], den))
        row = [y - x for x, y in zip(row, row[1:])]
    return out


@lru_cache(maxsize=128)
def decompose_z2(params: ParamSetZ2) -> PartialFractionZ2:
    C = _closed_C(params)
    d = params.d
    a2s = params.a_sorted[1]
    f = params.rational
    if d < 0:
        return PartialFractionZ2(C, (), a2s)
    # P(u - a2*) at u = 1..d+1; every t + k below is a positive integer
    top = d + 1 - a2s + params.b[3] - 1
    L = lcm_upto(top)
    quot = [0] + [L // m for m in range(1, top + 1)]
    items = sorted(C.items())
    values = []
    for u in range(1, d + 2):
        t = u - a2s
        s = sum(c * quot[t + k] for k, c in items)
        values.append(f(t) - Fraction(s, L))
    return PartialFractionZ2(C, tuple(forward_differences(values)), a2s)


def double_residues_by_limit_z3(params: ParamSetZ3) -> dict[int, int]:
    """(R^(t)(t+k)^2)|_{t=-k} via factor cancellation."""
    f = params.rational
    out = {}
    for k in range(min(params.a[2], params.a[3]), max(params.b[2], params.b[3])):
        loc = f.local(-k, with_logderiv=False)
        if loc.order == -2:
            out[k] = int(loc.lead)
    return out


def _closed_A(params: ParamSetZ3) -> dict[int, int]:
    a, b = params.a, params.b
    sign = -1 if params.d % 2 else 1
    out = {}
    for k in params.double_pole_range:
        out[k] = sign * (binom(2 * k - b[0], 2 * k - a[0]) * binom(k - b[1], k - a[1])
                         * binom(b[2] - a[2] - 1, k - a[2]) * binom(b[3] - a[3] - 1, k - a[3]))
    return out


@lru_cache(maxsize=128)
def decompose_z3(params: ParamSetZ3) -> PartialFractionZ3:
    """A_k from the binomial formula, B_k from the log-derivative at each pole."""
    A = _closed_A(params)
    f = params.rational
    B = {}
    for k in params.pole_range:
        loc = f.local(-k, with_logderiv=True)
        if loc.order == -2:
            B[k] = loc.lead * loc.logderiv
        elif loc.order == -1:
            B[k] = loc.lead
        else:
            B[k] = Fraction(0)
    return PartialFractionZ3(A, B)


# --------------------------------------------------------------------------
# integer-valued polynomial inclusions


def check_integer_valued(factors: Sequence[tuple[int, int]], k: int, l: int) -> tuple[bool, bool, bool]:
    """For R = prod R(a_j, b_j; t), test R(k), D_m R'(k), D_m (R(k)-R(l))/(k-l) in Z."""
    if k == l:
        raise ValueError("k and l must differ")
    for a, b in factors:
        if not b < a:
            raise InvalidParameters(f"need b < a, got ({a}, {b})")
    const = Fraction(1, math.prod(math.factorial(a - b) for a, b in factors))
    f = FactoredRational(const, tuple(Block(1, b, a - 1) for a, b in factors), ())
    m = max(a - b for a, b in factors)
    Dm = lcm_upto(m)
    Rk, Rl = f(k), f(l)
    return (
        Rk.denominator == 1,
        (Dm * f.derivative(k)).denominator == 1,
        (Dm * (Rk - Rl) / (k - l)).denominator == 1,
    )
