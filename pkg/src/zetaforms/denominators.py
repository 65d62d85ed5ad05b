"""Prime-product denominators Phi_n, Phi^_n and the divisibility checks.

A profile phi is a 1-periodic step function on [0, 1); Phi_n collects
p^phi(n/p) over primes p <= gamma_min * n.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .numeric import as_fraction, primes_upto, valuation

__all__ = [
    "PhiProfile",
    "PrimeProduct",
    "phi_table_z2",
    "phi_table_z3",
    "phi_general_z2",
    "phi_general_z3",
    "PROFILE_Z2",
    "PROFILE_Z3",
    "profile_from_function",
    "prime_product",
    "verify_divisibility",
]

F = Fraction


@dataclass(frozen=True)
class PhiProfile:
    """Step function: ``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``."""

    breakpoints: tuple[Fraction, ...]
    values: tuple[int, ...]
    gamma_min: Fraction

    def __post_init__(self):
        bps = tuple(as_fraction(x) for x in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "gamma_min", as_fraction(self.gamma_min))
        if len(bps) != len(self.values) + 1:
            raise ValueError("need one more breakpoint than values")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if bps[0] < 0 or bps[-1] > 1:
            raise ValueError("breakpoints must lie in [0, 1]")

    @classmethod
    def from_intervals(cls, pieces: dict[int, Sequence[tuple]], gamma_min) -> "PhiProfile":
        """Build from {value: [(lo, hi), ...]} with half-open intervals [lo, hi)."""
        spans = sorted((F(lo), F(hi), v) for v, ivs in pieces.items() for lo, hi in ivs)
        bps, vals = [F(0)], []
        for lo, hi, v in spans:
            if lo < bps[-1]:
                raise ValueError("overlapping intervals")
            if lo > bps[-1]:
                vals.append(0)
                bps.append(lo)
            vals.append(v)
            bps.append(hi)
        if bps[-1] < 1:
            vals.append(0)
            bps.append(F(1))
        return cls(tuple(bps), tuple(vals), gamma_min)

    def __call__(self, x) -> int:
        x = as_fraction(x)
        x = x - math.floor(x)
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return self.values[i]

    def intervals(self):
        """Non-zero pieces as (lo, hi, value)."""
        return [(a, b, v) for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values) if v]

    def merged(self) -> "PhiProfile":
        bps, vals = [self.breakpoints[0]], []
        for b, v in zip(self.breakpoints[1:], self.values):
            if vals and vals[-1] == v:
                bps[-1] = b
            else:
                vals.append(v)
                bps.append(b)
        return PhiProfile(tuple(bps), tuple(vals), self.gamma_min)


PROFILE_Z2 = PhiProfile.from_intervals(
    {
        1: [(F(1, 10), F(1, 9)), (F(1, 7), F(2, 9)), (F(2, 7), F(1, 3)), (F(2, 5), F(1, 2)),
            (F(5, 9), F(4, 7)), (F(2, 3), F(5, 7)), (F(4, 5), F(6, 7))],
        2: [(F(1, 9), F(1, 8)), (F(2, 9), F(1, 4)), (F(1, 3), F(3, 8)), (F(4, 7), F(5, 8)),
            (F(5, 7), F(3, 4)), (F(6, 7), F(7, 8))],
    },
    gamma_min=8,
)

PROFILE_Z3 = PhiProfile.from_intervals(
    {
        1: [(F(1, 10), F(1, 8)), (F(1, 7), F(1, 4)), (F(2, 7), F(1, 3)), (F(3, 7), F(1, 2)),
            (F(5, 9), F(4, 7)), (F(3, 5), F(5, 8)), (F(2, 3), F(5, 7)), (F(5, 6), F(6, 7))],
        2: [(F(1, 3), F(3, 8)), (F(4, 7), F(3, 5)), (F(5, 7), F(3, 4)), (F(6, 7), F(7, 8))],
    },
    gamma_min=8,
)


def _unit_interval(x) -> Fraction:
    x = as_fraction(x)
    if not 0 <= x < 1:
        raise ValueError("x must lie in [0, 1)")
    return x


def phi_table_z2(x) -> int:
    return PROFILE_Z2(_unit_interval(x))


def phi_table_z3(x) -> int:
    return PROFILE_Z3(_unit_interval(x))


def _fl(x: Fraction) -> int:
    return math.floor(x)


def phi_general_z2(alphas: Sequence[int], betas: Sequence[int], x) -> int:
    """max over permutations alpha' of alpha of the floor expression."""
    x = as_fraction(x)
    a, b = tuple(alphas), tuple(betas)
    base = _fl((b[3] - a[3]) * x) - sum(_fl((a[j] - b[j]) * x) for j in range(3))
    best = None
    for ap in set(itertools.permutations(a)):
        v = base - _fl((b[3] - ap[3]) * x) + sum(_fl((ap[j] - b[j]) * x) for j in range(3))
        if best is None or v > best:
            best = v
    return best


def _z3_objective(a, b, x: Fraction, y: Fraction) -> int:
    return (
        _fl(2 * y - b[0] * x) - _fl(2 * y - a[0] * x) - _fl((a[0] - b[0]) * x)
        + _fl(y - b[1] * x) - _fl(y - a[1] * x) - _fl((a[1] - b[1]) * x)
        + _fl((b[2] - a[2]) * x) - _fl(b[2] * x - y) - _fl(y - a[2] * x)
        + _fl((b[3] - a[3]) * x) - _fl(b[3] * x - y) - _fl(y - a[3] * x)
    )


def phi_general_z3(alphas: Sequence[int], betas: Sequence[int], x) -> int:
    """min over 0 <= y < 1 of the twelve-term floor expression.

    The objective only jumps where a floor argument crosses an integer, so it is
    evaluated at those critical y and at the midpoints between them.
    """
    x = as_fraction(x)
    a, b = tuple(alphas), tuple(betas)
    crit = {F(0)}
    for c in (a[1], b[1], a[2], a[3], b[2], b[3]):
        t = c * x
        crit.add(t - math.floor(t))
    for c in (a[0], b[0]):
        t = c * x / 2
        for shift in (F(0), F(1, 2)):
            u = t + shift
            crit.add(u - math.floor(u))
    pts = sorted(crit)
    ends = pts[1:] + [F(1)]
    samples = pts + [(lo + hi) / 2 for lo, hi in zip(pts, ends)]
    return min(_z3_objective(a, b, x, y) for y in samples)


def profile_from_function(func: Callable[[Fraction], int], max_den: int, gamma_min) -> PhiProfile:
    """Sweep a step function whose jumps lie in {k/m : m <= max_den}."""
    pts = sorted({F(k, m) for m in range(1, max_den + 1) for k in range(m)})
    vals = [func(x) for x in pts]
    return PhiProfile(tuple(pts) + (F(1),), tuple(vals), gamma_min).merged()


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeProduct:
    n: int
    factorization: dict[int, int]
    value: int
    beyond_cutoff: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "value": str(self.value),
            "factorization": {str(p): e for p, e in self.factorization.items()},
            "beyond_cutoff": {str(p): e for p, e in self.beyond_cutoff.items()},
        }


def prime_product(profile: PhiProfile, n: int, probe_limit=None) -> PrimeProduct:
    """Phi_n = prod_{p <= gamma_min n} p^phi(n/p); Phi_0 = 1.

    Primes in (gamma_min n, probe_limit n] with phi(n/p) != 0 are not included
    but are listed in ``beyond_cutoff``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return PrimeProduct(0, {}, 1, {})
    cutoff = math.floor(profile.gamma_min * n)
    fac = {}
    for p in primes_upto(cutoff):
        e = profile(F(n, p))
        if e:
            fac[p] = e
    extra = {}
    if probe_limit is not None:
        for p in primes_upto(math.floor(as_fraction(probe_limit) * n)):
            if p > cutoff:
                e = profile(F(n, p))
                if e:
                    extra[p] = e
    value = math.prod(p**e for p, e in fac.items())
    return PrimeProduct(n, fac, value, extra)


def _integrality(x: Fraction, scale_primes: dict[int, int], primes: Sequence[int]) -> dict:
    """Is x * prod p^scale_primes[p] an integer?  Decided prime by prime."""
    bad = {}
    if x == 0:
        return {"ok": True, "bad_primes": {}}
    den = x.denominator
    for p in primes:
        v = valuation(x, p) + scale_primes.get(p, 0)
        if v < 0:
            bad[str(p)] = v
        while den % p == 0:
            den //= p
    if den != 1:
        bad["other"] = str(den)
    return {"ok": not bad, "bad_primes": bad}


def _dm_exponents(m: int) -> dict[int, int]:
    out = {}
    for p in primes_upto(m):
        e = 0
        pk = p
        while pk <= m:
            e += 1
            pk *= p
        out[p] = e
    return out


def _combine(*parts: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for part in parts:
        for p, e in part.items():
            out[p] = out.get(p, 0) + e
    return out


def verify_divisibility(record, n: int | None = None) -> dict:
    """The integrality checks for the example constructions at index n.

    ``record`` needs ``q``, ``p`` and ``phat`` attributes (a FormRecord).
    Checks Phi^^-1 q, Phi^^-1 D_8n D_16n p, 2 Phi^^-1 D_8n^3 p^ in Z, the
    same two zeta(2) statements with Phi_n, and Phi^_n | Phi_n.
    """
    n = record.n if n is None else n
    phi = prime_product(PROFILE_Z2, n, probe_limit=16)
    phihat = prime_product(PROFILE_Z3, n, probe_limit=16)
    primes = primes_upto(max(16 * n, 2))
    neg = lambda d: {p: -e for p, e in d.items()}
    d8, d16 = _dm_exponents(8 * n), _dm_exponents(16 * n)
    checks = {}
    q = F(record.q)
    checks["phihat_q"] = _integrality(q, neg(phihat.factorization), primes)
    if record.p is not None:
        checks["phihat_d8_d16_p"] = _integrality(record.p, _combine(d8, d16, neg(phihat.factorization)), primes)
        checks["phi_q"] = _integrality(q, neg(phi.factorization), primes)
        checks["phi_d8_d16_p"] = _integrality(record.p, _combine(d8, d16, neg(phi.factorization)), primes)
    if record.phat is not None:
        checks["two_phihat_d8cubed_phat"] = _integrality(
            2 * record.phat, _combine(d8, d8, d8, neg(phihat.factorization)), primes)
    bad = {str(p): e for p, e in phihat.factorization.items() if phi.factorization.get(p, 0) < e}
    checks["phihat_divides_phi"] = {"ok": not bad, "bad_primes": bad}
    return {
        "n": n,
        "ok": all(c["ok"] for c in checks.values()),
        "checks": checks,
        "phi": phi.to_dict(),
        "phihat": phihat.to_dict(),
    }


def denominator_divides(x: Fraction, m: int) -> bool:
    """Does the reduced denominator of x divide m?"""
    return m % as_fraction(x).denominator == 0

