"""Order-3 recurrences: exact fitting, verification, determinants, certification.

Operators are recovered from data, never assumed.  The nullspace of the
fitting system is computed modulo several word-size primes, lifted with the
Chinese remainder theorem and rational reconstruction, and then checked
exactly against every equation, including a held-out margin.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from sympy import prevprime

from .errors import AmbiguousOperator, HypothesisViolated, InvalidParameters, NoOperatorFound
from .numeric import as_fraction, lcm_upto

__all__ = [
    "RecurrenceOperator",
    "fit_recurrence",
    "verify_recurrence",
    "RecurrenceReport",
    "DeterminantSeq",
    "determinant",
    "determinant_seq",
    "characteristic_moduli",
    "CertificationInput",
    "certify",
]


# --------------------------------------------------------------------------
# operators


def _horner(coeffs: Sequence[int], n) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * n + c
    return acc


@dataclass(frozen=True)
class RecurrenceOperator:
    """sum_i P_i(n) y_{n+i} = 0; ``polys[i]`` lists P_i's coefficients, constant first."""

    polys: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        polys = tuple(tuple(int(c) for c in p) for p in self.polys)
        if len(polys) < 2:
            raise InvalidParameters("an operator needs at least two coefficients")
        object.__setattr__(self, "polys", polys)

    @property
    def order(self) -> int:
        return len(self.polys) - 1

    @property
    def degree(self) -> int:
        deg = -1
        for p in self.polys:
            for j, c in enumerate(p):
                if c:
                    deg = max(deg, j)
        return deg

    def coefficient(self, i: int, n) -> int:
        return _horner(self.polys[i], n)

    def apply(self, seq: Sequence, n: int):
        return sum(self.coefficient(i, n) * seq[n + i] for i in range(self.order + 1))

    def normalized(self) -> "RecurrenceOperator":
        """Content 1 and positive leading coefficient of the top non-zero polynomial."""
        g = 0
        for p in self.polys:
            for c in p:
                g = math.gcd(g, c)
        if g == 0:
            raise InvalidParameters("zero operator")
        top = next([c for c in p if c] for p in reversed(self.polys) if any(p))
        if top[-1] < 0:
            g = -g
        return RecurrenceOperator(tuple(tuple(c // g for c in p) for p in self.polys))

    def sign_pattern(self) -> list[set[int]]:
        """Signs occurring among the non-zero coefficients of each P_i."""
        return [{(c > 0) - (c < 0) for c in p if c} for p in self.polys]

    def to_dict(self) -> dict:
        out = {"order": self.order, "degree": self.degree}
        for i, p in enumerate(self.polys):
            out[f"P{i}"] = [str(c) for c in p]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "RecurrenceOperator":
        order = int(doc["order"])
        return cls(tuple(tuple(int(c) for c in doc[f"P{i}"]) for i in range(order + 1)))

    @classmethod
    def from_json(cls, text: str) -> "RecurrenceOperator":
        return cls.from_dict(json.loads(text))


# --------------------------------------------------------------------------
# modular linear algebra

_PRIME_TOP = 2**31 - 1


def _prime_stream():
    p = _PRIME_TOP + 1
    while True:
        p = prevprime(p)
        yield p


def _rref_mod(M: np.ndarray, p: int):
    """Reduced row echelon form mod p (entries < 2^31 so products fit int64)."""
    M = M % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        f = M[:, c].copy()
        f[r] = 0
        nzf = np.nonzero(f)[0]
        if len(nzf):
            M[nzf] = (M[nzf] - (f[nzf, None] * M[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
    return M, pivots


def _ratrec(a: int, m: int):
    """r/s with r = a s (mod m) and |r|, |s| <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


class _System:
    """Rows sum_{i,j} c_{ij} n^j y_{n+i} for every sequence and admissible n.

    Each sequence is scaled by the lcm of its denominators, which does not
    change the operators that annihilate it, so all arithmetic is on ints.
    """

    def __init__(self, sequences, order: int, degree: int):
        self.order, self.degree = order, degree
        self.ncols = (order + 1) * (degree + 1)
        self.rows = []  # (sequence index, n)
        for s_idx, seq in enumerate(sequences):
            for n in range(len(seq) - order):
                self.rows.append((s_idx, n))
        self.rows.sort(key=lambda r: (r[1], r[0]))
        self.sequences = []
        for seq in sequences:
            fr = [as_fraction(v) for v in seq]
            den = math.lcm(*(v.denominator for v in fr)) if fr else 1
            self.sequences.append([int(v * den) for v in fr])

    def matrix_mod(self, p: int, rows) -> np.ndarray:
        D, order = self.degree, self.order
        res = [np.array([v % p for v in seq], dtype=np.int64) for seq in self.sequences]
        ns = np.array([n for _, n in rows], dtype=np.int64)
        pw = np.ones((len(rows), D + 1), dtype=np.int64)
        for j in range(1, D + 1):
            pw[:, j] = pw[:, j - 1] * ns % p
        blocks = []
        for i in range(order + 1):
            y = np.array([res[s_idx][n + i] for s_idx, n in rows], dtype=np.int64)
            blocks.append(pw * y[:, None] % p)
        return np.concatenate(blocks, axis=1)

    def operator(self, vec: Sequence[int]) -> RecurrenceOperator:
        D = self.degree
        return RecurrenceOperator(tuple(tuple(vec[i * (D + 1):(i + 1) * (D + 1)]) for i in range(self.order + 1)))

    def check(self, op: RecurrenceOperator, rows) -> tuple[int, int] | None:
        """First row (s_idx, n) with a non-zero exact residual, else None."""
        for s_idx, n in rows:
            if op.apply(self.sequences[s_idx], n) != 0:
                return (s_idx, n)
        return None


def _exact_kernel(system: _System, rows, max_primes: int):
    """Kernel basis over Q of the rows (as integer operators), via CRT."""
    primes = _prime_stream()
    ref_pivots = None
    acc: list[list[int]] | None = None
    modulus = 1
    used = 0
    batch = 8
    while used < max_primes:
        p = next(primes)
        M = system.matrix_mod(p, rows)
        R, pivots = _rref_mod(M, p)
        if ref_pivots is None or len(pivots) > len(ref_pivots):
            ref_pivots, acc, modulus = pivots, None, 1
        elif pivots != ref_pivots:
            continue  # unlucky prime
        free = [c for c in range(system.ncols) if c not in set(ref_pivots)]
        if not free:
            return []
        vecs = []
        for f in free:
            v = [0] * system.ncols
            v[f] = 1
            for row, c in enumerate(ref_pivots):
                v[c] = int(-R[row, f]) % p
            vecs.append(v)
        if acc is None:
            acc, modulus = vecs, p
        else:
            inv = pow(modulus % p, -1, p)
            acc = [[a + modulus * (((x - a) * inv) % p) for a, x in zip(av, xv)] for av, xv in zip(acc, vecs)]
            modulus *= p
        used += 1
        if used % batch:
            continue
        basis = []
        for av in acc:
            rec = [_ratrec(a, modulus) for a in av]
            if any(r is None for r in rec):
                basis = None
                break
            den = math.lcm(*(r.denominator for r in rec))
            ints = [int(r * den) for r in rec]
            basis.append(system.operator(ints).normalized())
        if basis is not None and all(system.check(op, rows) is None for op in basis):
            return basis
    raise NoOperatorFound(f"rational reconstruction did not settle within {max_primes} primes")


def _nullity_mod(system: _System, rows) -> int:
    p = _PRIME_TOP
    return system.ncols - len(_rref_mod(system.matrix_mod(p, rows), p)[1])


def fit_recurrence(values: Sequence, order: int = 3, degree_bound: int | None = None, *,
                   margin: int = 8, extra_sequences: Sequence[Sequence] = (),
                   max_primes: int = 400) -> RecurrenceOperator:
    """Minimal-degree operator of the given order annihilating the data.

    Each candidate degree D needs (order+1)(D+1) + margin equations.  The last
    ``margin`` equations are held out: the kernel is computed from the others
    and the operator must also annihilate the held-out ones.  Degrees are
    searched upwards; since an operator of degree D is also one of degree D+1,
    the smallest degree with a non-trivial kernel mod p is located by doubling
    and bisection, which is the same degree a linear scan would find.
    Full column rank modulo a prime implies full rank over Q, so rejected
    degrees are rejected rigorously.
    """
    sequences = [list(values)] + [list(s) for s in extra_sequences]

    def feasible(D):
        sys_ = _System(sequences, order, D)
        return len(sys_.rows) - margin >= sys_.ncols

    max_deg = -1
    while feasible(max_deg + 1):
        max_deg += 1
    if degree_bound is not None:
        max_deg = min(max_deg, degree_bound)
    if max_deg < 0:
        raise NoOperatorFound(f"too few terms for any order-{order} operator with margin {margin}")

    def nullity(D):
        s = _System(sequences, order, D)
        return s, s.rows[: len(s.rows) - margin], _nullity_mod(s, s.rows[: len(s.rows) - margin])

    # doubling then bisection for the least degree with a kernel
    lo, hi = -1, None
    D = 0
    while D <= max_deg:
        if nullity(D)[2] > 0:
            hi = D
            break
        lo = D
        D = 1 if D == 0 else 2 * D
    if hi is None:
        if lo < max_deg and nullity(max_deg)[2] > 0:
            hi = max_deg
        else:
            raise NoOperatorFound(
                f"no order-{order} operator of degree <= {max_deg} "
                f"(the {len(_System(sequences, order, 0).rows)} available equations support no higher degree)")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if nullity(mid)[2] > 0:
            hi = mid
        else:
            lo = mid
    for D in range(hi, max_deg + 1):
        s, window, _ = nullity(D)
        basis = _exact_kernel(s, window, max_primes)
        basis = [op for op in basis if s.check(op, s.rows) is None]
        if len(basis) == 1:
            return basis[0]
        if len(basis) > 1:
            raise AmbiguousOperator(f"{len(basis)}-dimensional family of degree-{D} operators", basis)
    raise NoOperatorFound(f"kernels up to degree {max_deg} fail on the held-out equations")


# --------------------------------------------------------------------------
# verification


@dataclass
class RecurrenceReport:
    ok: bool
    checked: list[int]
    first_failure: int | None = None
    failures: dict = field(default_factory=dict)
    min_cancellation_bits: float | None = None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checked": [self.checked[0], self.checked[-1]] if self.checked else [],
            "first_failure": self.first_failure,
            "failures": {str(k): v for k, v in self.failures.items()},
            "min_cancellation_bits": self.min_cancellation_bits,
        }


def verify_recurrence(op: RecurrenceOperator, sequence: Sequence, ns: Sequence[int]) -> RecurrenceReport:
    """Residuals of ``op`` on ``sequence`` for every n in ``ns``.

    Exact entries (int/Fraction) must give zero.  Entries carrying ``value``
    and ``error`` (high-precision residuals) must give a value within the
    propagated error budget; ``min_cancellation_bits`` records how many bits
    cancelled between the largest term and the budget.
    """
    ns = list(ns)
    if not ns:
        return RecurrenceReport(True, [])
    if max(ns) + op.order >= len(sequence):
        raise InvalidParameters("sequence too short for the requested range")
    numeric = hasattr(sequence[0], "error")
    failures = {}
    cancel = None
    for n in ns:
        if not numeric:
            res = op.apply(sequence, n)
            if res != 0:
                failures[n] = str(res)
            continue
        coeffs = [op.coefficient(i, n) for i in range(op.order + 1)]
        bits = max(abs(c).bit_length() for c in coeffs) + 64
        terms = [sequence[n + i] for i in range(op.order + 1)]
        wp = bits + 64 + max(-int(mpmath.mag(t.error)) for t in terms)
        with mpmath.workprec(wp):
            total = mpmath.fsum(mpmath.mpf(c) * t.value for c, t in zip(coeffs, terms))
            biggest = max(abs(mpmath.mpf(c) * t.value) for c, t in zip(coeffs, terms))
            budget = mpmath.fsum(abs(mpmath.mpf(c)) * t.error for c, t in zip(coeffs, terms))
            budget += biggest * mpmath.ldexp(1, -(wp - 8))
            if abs(total) > budget:
                failures[n] = mpmath.nstr(total, 8)
            else:
                c_bits = float(mpmath.log(biggest / budget, 2))
                cancel = c_bits if cancel is None else min(cancel, c_bits)
    first = min(failures) if failures else None
    return RecurrenceReport(not failures, ns, first, failures, cancel)


# --------------------------------------------------------------------------
# determinants


@dataclass(frozen=True)
class DeterminantSeq:
    n: int
    delta: Fraction

    def to_dict(self) -> dict:
        return {"n": self.n, "num": str(self.delta.numerator), "den": str(self.delta.denominator)}


def determinant(rows: Sequence[Sequence]) -> Fraction:
    (a, b, c), (d, e, f), (g, h, i) = [[as_fraction(x) for x in r] for r in rows]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def determinant_seq(triples: Sequence[tuple], n: int) -> DeterminantSeq:
    """Delta_n from (q, p, p^) at n, n+1, n+2; ``triples[k] = (q_k, p_k, p^_k)``."""
    if n + 2 >= len(triples):
        raise InvalidParameters("need records for n, n+1 and n+2")
    rows = [[triples[n + j][k] for j in range(3)] for k in range(3)]
    return DeterminantSeq(n, determinant(rows))


def characteristic_moduli(op: RecurrenceOperator, precision_bits: int = 256) -> list:
    """|roots| of sum_i lead(P_i) x^i, ascending; the growth rates of solutions."""
    D = op.degree
    lead = [p[D] if D < len(p) else 0 for p in op.polys]
    with mpmath.workprec(precision_bits):
        coeffs = [mpmath.mpf(c) for c in reversed(lead)]
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * precision_bits)
        return sorted(abs(r) for r in roots)


# --------------------------------------------------------------------------
# certification of a candidate triple


@dataclass(frozen=True)
class CertificationInput:
    m: int
    a0: Fraction
    a1: Fraction
    a2: Fraction
    epsilon: float
    eta: float

    def __post_init__(self):
        for name in ("a0", "a1", "a2"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.m < 1:
            raise InvalidParameters("m must be positive")
        if not (self.epsilon > 0 and self.eta > 0):
            raise InvalidParameters("epsilon and eta must be positive")


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def certify(inp: CertificationInput, triple_of=None, tau0=None, s0=None) -> dict:
    """Run the argument behind the lower bound for |a0 + a1 zeta(2) + a2 zeta(3)|.

    ``triple_of(l)`` returns (q_l, p_l, p^_l); it defaults to the example
    constructions.  ``tau0`` and ``s0`` default to their closed forms.
    """
    from .asymptotics import closed_form_constants
    from .denominators import PROFILE_Z3, prime_product
    from .linear_forms import exact_triple, zeta2, zeta3

    if triple_of is None:
        triple_of = exact_triple
    if tau0 is None or s0 is None:
        cs = closed_form_constants(96)["constants"]
        tau0 = cs.tau_0 if tau0 is None else tau0
        s0 = cs.s_0 if s0 is None else s0
    m, a0, a1, a2 = inp.m, inp.a0, inp.a1, inp.a2
    if a0 == 0 and a1 == 0 and a2 == 0:
        raise HypothesisViolated("nonzero", "(a0, a1, a2) must not be the zero triple")

    Dm, D2m = lcm_upto(m), lcm_upto(2 * m)
    cond_i = {
        "D_m^2 D_2m a0": (Dm * Dm * D2m * a0).denominator == 1,
        "D_m a1": (Dm * a1).denominator == 1,
        "(D_2m/D_m) a2": (D2m // Dm * a2).denominator == 1,
    }
    if not all(cond_i.values()):
        failed = ", ".join(k for k, v in cond_i.items() if not v)
        raise HypothesisViolated("i", f"integrality fails for {failed}")

    # size bound, decided with enough bits to see e^(-(tau0+eps) m)
    bits = int(4 * (float(s0) + inp.eta + 2) * m / math.log(2)) + 64
    with mpmath.workprec(bits):
        box = mpmath.exp(-(mpmath.mpf(tau0) + inp.epsilon) * m)
        biggest = max(abs(_mp(a)) for a in (a0, a1, a2))
        if biggest > box:
            raise HypothesisViolated("ii", f"max|a_i| = {mpmath.nstr(biggest, 6)} exceeds "
                                           f"e^-(tau0+eps)m = {mpmath.nstr(box, 6)}")

    n = -(-m // 8)
    chosen = None
    tried = []
    for ell in (n, n + 1, n + 2):
        q, p, ph = triple_of(ell)
        form = a0 * q + a1 * p + a2 * ph
        tried.append({"l": ell, "nonzero": form != 0})
        if form != 0:
            chosen = (ell, q, p, ph, form)
            break
    if chosen is None:
        raise AssertionError("a0 q_l + a1 p_l + a2 p^_l vanished for l = n, n+1, n+2; Delta_n would be 0")
    ell, q, p, ph, form = chosen

    D8, D16 = lcm_upto(8 * ell), lcm_upto(16 * ell)
    e = Fraction(2 * D8, Dm)
    phihat = prime_product(PROFILE_Z3, ell).value
    factors = {
        "e": e,
        "D8^2 D16 a0": D8 * D8 * D16 * a0,
        "D8 a1": D8 * a1,
        "e D16/(2 D8) a2": e * Fraction(D16, 2 * D8) * a2,
        "Phihat^-1 q": Fraction(q, phihat),
        "Phihat^-1 D8 D16 p": D8 * D16 * p / phihat,
        "2 Phihat^-1 D8^3 p^": 2 * D8**3 * ph / phihat,
    }
    integral = {k: v.denominator == 1 for k, v in factors.items()}
    divides = (e * Fraction(D16, 2 * D8) / Fraction(D2m, Dm)).denominator == 1
    N = (e * factors["D8^2 D16 a0"] * factors["Phihat^-1 q"]
         + e * factors["D8 a1"] * factors["Phihat^-1 D8 D16 p"]
         + factors["e D16/(2 D8) a2"] * factors["2 Phihat^-1 D8^3 p^"])
    assert N == e * D8 * D8 * D16 * form / phihat

    with mpmath.workprec(bits):
        z2, z3 = zeta2(bits), zeta3(bits)
        lin = _mp(a0) + _mp(a1) * z2 + _mp(a2) * z3
        threshold = mpmath.exp(-(mpmath.mpf(s0) + inp.eta) * m)
        r = q * z2 - _mp(p)
        rh = q * z3 - _mp(ph)
        upper = _mp(e * D8 * D8 * D16 / phihat) * (abs(q) * abs(lin) + abs(_mp(a1)) * abs(r) + abs(_mp(a2)) * abs(rh))
        consistent = abs(lin) > threshold
    hypotheses_met = True
    verdict = ("hypotheses met, nonzero form found; "
               + ("|a0 + a1 zeta(2) + a2 zeta(3)| exceeds e^-(s0+eta)m: consistent with the lower bound"
                  if consistent else
                  "|a0 + a1 zeta(2) + a2 zeta(3)| is below e^-(s0+eta)m: violates the lower bound"))
    return {
        "m": m,
        "n": n,
        "l": ell,
        "tried": tried,
        "hypotheses_met": hypotheses_met,
        "nonzero_form": True,
        "e_ml": str(e),
        "divisibility_D2m_over_Dm": divides,
        "factors_integral": integral,
        "integer": str(N),
        "integer_is_integral": N.denominator == 1,
        "integer_nonzero": N != 0,
        "abs_integer_at_least_one": abs(N) >= 1,
        "abs_integer_upper_bound": mpmath.nstr(upper, 10),
        "two_sided_consistent": bool(1 <= abs(N) and _mp(abs(N)) <= upper * (1 + mpmath.ldexp(1, -(bits // 2)))),
        "abs_linear_form": mpmath.nstr(abs(lin), 10),
        "threshold": mpmath.nstr(threshold, 10),
        "consistent_with_bound": bool(consistent),
        "verdict": verdict,
    }
