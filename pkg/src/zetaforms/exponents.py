"""Diophantine exponent bounds and the Minkowski small-solution search."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import BudgetExhausted, InvalidParameters
from .numeric import as_fraction, lcm_upto

__all__ = [
    "mu_psi_bound",
    "mu_bound",
    "lin_dep_bound",
    "generic_mu_psi",
    "gamma_psi",
    "ExponentContext",
    "LatticeWitness",
    "NotFound",
    "minkowski_witness",
    "witness_a0_bound",
    "in_lattice",
    "tau_regime",
    "PRINTED_MU_PSI_ZETA3",
    "mu_psi_discrepancy",
    "EXTERNAL_VALUES",
    "bound_table",
]

PRINTED_MU_PSI_ZETA3 = "1.92357696"
# quoted bounds that rest on work outside this package; reported, never derived
EXTERNAL_VALUES = {"mu_psi_tilde_zeta2_elementary": "3.103"}


def _check_tau(tau, upper=1):
    if not tau < upper:
        raise InvalidParameters(f"tau must be < {upper}")


def mu_psi_bound(s, tau):
    """(s - tau)/(4 - tau); exact for Fraction inputs."""
    _check_tau(tau)
    return (s - tau) / (4 - tau)


def mu_bound(s, tau):
    """(s - tau)/(1 - tau)."""
    _check_tau(tau)
    return (s - tau) / (1 - tau)


def lin_dep_bound(mu_psi, tau):
    """4 + (mu_psi - 1)(4 - tau), valid for 0 <= tau < 1."""
    if not 0 <= tau < 1:
        raise InvalidParameters("need 0 <= tau < 1")
    return 4 + (mu_psi - 1) * (4 - tau)


def gamma_psi(delta, tau):
    """gamma of psi(q) = delta_n, n = floor(log q/(4 - tau)), delta_n = e^(delta n + o(n))."""
    return delta / (4 - tau)


def generic_mu_psi(delta, tau):
    """2 - gamma_psi, the value of mu_psi for almost every real number."""
    return 2 - gamma_psi(delta, tau)


@dataclass(frozen=True)
class ExponentContext:
    tau: float
    s: float
    psi: str  # "D_n D_2n", "D_n^3" or "D_n^2"

    @property
    def delta(self) -> int:
        return {"D_n D_2n": 3, "D_n^3": 3, "D_n^2": 2}[self.psi]

    @property
    def psi_gamma(self):
        return gamma_psi(self.delta, self.tau)

    def __post_init__(self):
        if self.psi not in ("D_n D_2n", "D_n^3", "D_n^2"):
            raise InvalidParameters(f"unknown psi {self.psi!r}")


# --------------------------------------------------------------------------
# the printed mu_psi(zeta(3)) value


def mu_psi_discrepancy(tau0=None, s0=None) -> dict:
    """Compare (s0 - tau0)/(4 - tau0) with the printed 1.92357696.

    The printed value is not reproduced by the stated formula.  Solving for the
    tau that would reproduce it gives tau ~ 1, and (s0 - 1)/3 agrees with the
    printed value to six digits; this is reported as an observation only.
    """
    printed_tau0, printed_s0 = mpmath.mpf("0.899668635"), mpmath.mpf("6.770732145")
    tau0 = printed_tau0 if tau0 is None else mpmath.mpf(tau0)
    s0 = printed_s0 if s0 is None else mpmath.mpf(s0)
    printed = mpmath.mpf(PRINTED_MU_PSI_ZETA3)
    computed = mu_psi_bound(s0, tau0)
    # tau with (s0 - tau)/(4 - tau) = printed
    tau_star = (s0 - 4 * printed) / (1 - printed)
    return {
        "computed": mpmath.nstr(computed, 10),
        "printed": PRINTED_MU_PSI_ZETA3,
        "difference": mpmath.nstr(printed - computed, 6),
        "discrepancy": abs(printed - computed) > mpmath.mpf("1e-8"),
        "tau_reproducing_printed": mpmath.nstr(tau_star, 8),
        "value_at_tau_1": mpmath.nstr((s0 - 1) / 3, 10),
        "note": "the printed value is not (s0 - tau0)/(4 - tau0); both values are reported",
    }


# --------------------------------------------------------------------------
# Minkowski witnesses


@dataclass(frozen=True)
class LatticeWitness:
    n: int
    a0: Fraction
    a1: Fraction
    a2: Fraction
    box_bound: mpmath.mpf
    form_bound: mpmath.mpf
    form_value: mpmath.mpf
    margin_bits: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a0": str(self.a0),
            "a1": str(self.a1),
            "a2": str(self.a2),
            "box_bound": mpmath.nstr(self.box_bound, 10),
            "form_bound": mpmath.nstr(self.form_bound, 10),
            "form_value": mpmath.nstr(self.form_value, 10),
        }


@dataclass(frozen=True)
class NotFound:
    n: int
    pairs_searched: int
    complete: bool
    best_form_value: mpmath.mpf | None
    boundary_cases: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "found": False,
            "pairs_searched": self.pairs_searched,
            "complete": self.complete,
            "best_form_value": None if self.best_form_value is None else mpmath.nstr(self.best_form_value, 10),
            "boundary_cases": self.boundary_cases,
        }


def lattice_scales(n: int) -> tuple[int, int, Fraction]:
    """Spacings of Gamma: 1/(D_n^2 D_2n), 1/D_n and D_n/D_2n, as (den0, den1, step2)."""
    Dn, D2n = lcm_upto(n), lcm_upto(2 * n)
    return Dn * Dn * D2n, Dn, Fraction(Dn, D2n)


def in_lattice(n: int, a0, a1, a2) -> bool:
    den0, den1, step2 = lattice_scales(n)
    a0, a1, a2 = (as_fraction(x) for x in (a0, a1, a2))
    return (a0 * den0).denominator == 1 and (a1 * den1).denominator == 1 and (a2 / step2).denominator == 1


def minkowski_witness(n: int, tau, s, xi1=None, xi2=None, search_budget: int = 10**6,
                      epsilon=0, precision_bits: int = 256):
    """A non-zero point of Gamma in K = {|x1|,|x2| <= e^-(tau+eps)n, |x0 + x1 xi1 + x2 xi2| <= e^-sn}.

    Every admissible (a1, a2) is enumerated and only the a0 nearest to
    -(a1 xi1 + a2 xi2) is tested, since K is thinner than the a0 spacing.
    Among the points found, the one with the smallest |linear form| is returned.
    Slab membership is decided with an explicit error bound; pairs that fall
    within that bound of the slab edge are counted as boundary cases, not accepted.
    ``xi1``, ``xi2`` default to zeta(2), zeta(3).
    """
    if n < 1:
        raise InvalidParameters("n must be positive")
    _check_tau(tau)
    from .linear_forms import zeta2, zeta3

    wp = precision_bits
    with mpmath.workprec(wp + 32):
        xi1 = zeta2(wp) if xi1 is None else mpmath.mpf(xi1)
        xi2 = zeta3(wp) if xi2 is None else mpmath.mpf(xi2)
        err = mpmath.ldexp(1, -(wp - 8)) * (abs(xi1) + abs(xi2) + 1)
        box = mpmath.exp(-(mpmath.mpf(tau) + epsilon) * n)
        slab = mpmath.exp(-mpmath.mpf(s) * n)
        den0, den1, step2 = lattice_scales(n)
        K1 = int(mpmath.floor(box * den1))
        K2 = int(mpmath.floor(box / (mpmath.mpf(step2.numerator) / step2.denominator)))
        pairs = (2 * K1 + 1) * (2 * K2 + 1) - 1
        if pairs > search_budget:
            raise BudgetExhausted(f"box holds {pairs} (a1, a2) pairs, budget is {search_budget}")
        best = best_val = closest = None
        boundary = 0
        for k in range(-K1, K1 + 1):
            a1 = Fraction(k, den1)
            for j in range(-K2, K2 + 1):
                if k == 0 and j == 0:
                    continue  # a0 alone cannot be that small: |a0| >= 1/den0
                a2 = j * step2
                t = -(mpmath.mpf(a1.numerator) / a1.denominator * xi1
                      + mpmath.mpf(a2.numerator) / a2.denominator * xi2)
                i = int(mpmath.nint(t * den0))
                val = mpmath.mpf(i) / den0 - t
                if closest is None or abs(val) < closest:
                    closest = abs(val)
                if abs(val) + err <= slab:
                    if best is None or abs(val) < abs(best_val):
                        best, best_val = (Fraction(i, den0), a1, a2), val
                elif abs(val) - err <= slab:
                    boundary += 1
        if best is None:
            return NotFound(n, pairs, True, closest, boundary)
        a0, a1, a2 = best
        assert in_lattice(n, a0, a1, a2)
        margin = float(mpmath.log(slab / abs(best_val), 2)) if best_val else float("inf")
        return LatticeWitness(n, a0, a1, a2, box, slab, best_val, margin)


def witness_a0_bound(w: LatticeWitness, xi1=None, xi2=None, epsilon=0, tau=0):
    """|a0| against (|xi1| + |xi2|) e^-(tau+eps)n + e^-sn, the chain in the existence proof."""
    from .linear_forms import zeta2, zeta3

    with mpmath.workprec(128):
        xi1 = zeta2(128) if xi1 is None else mpmath.mpf(xi1)
        xi2 = zeta3(128) if xi2 is None else mpmath.mpf(xi2)
        bound = (abs(xi1) + abs(xi2)) * w.box_bound + w.form_bound
        a0 = mpmath.mpf(w.a0.numerator) / w.a0.denominator
        return abs(a0) <= bound, bound


# --------------------------------------------------------------------------


def tau_regime(tau, n: int | None = None) -> dict:
    """Which part of the basic classification of s_tau applies."""
    if tau > 4:
        return {"regime": "degenerate", "s_tau": "-inf"}
    if tau >= 1:
        out = {"regime": "flat", "s_tau": 4}
        if n is not None:
            Dn, D2n = lcm_upto(n), lcm_upto(2 * n)
            out["witness"] = {"a0": str(Fraction(1, Dn * Dn * D2n)), "a1": "0", "a2": "0"}
        return out
    return {"regime": "active", "s_tau_lower": 6 - 2 * tau}


def bound_table(tau0, s0) -> list[tuple[str, object]]:
    """The exponent bounds that follow from (tau0, s0)."""
    mpsi = mu_psi_bound(s0, tau0)
    rows = [
        ("tau_0", tau0),
        ("s_0", s0),
        ("mu_psi(zeta(3)) <= (s0 - tau0)/(4 - tau0)", mpsi),
        ("mu_psi(zeta(3)) printed", mpmath.mpf(PRINTED_MU_PSI_ZETA3)),
        ("mu(zeta(i)) <= (s0 - tau0)/(1 - tau0)", mu_bound(s0, tau0)),
        ("gamma_psi for psi = D_n^3", gamma_psi(3, tau0)),
        ("s_tau lower bound 6 - 2 tau0", 6 - 2 * tau0),
        ("s_tau <= 6 - tau0 (linear dependence, generic mu_psi)", lin_dep_bound(generic_mu_psi(2, tau0), tau0)),
        ("mu_psi~(zeta(2)) external", EXTERNAL_VALUES["mu_psi_tilde_zeta2_elementary"]),
    ]
    return rows
