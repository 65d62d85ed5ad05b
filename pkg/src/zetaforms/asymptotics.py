"""Closed-form asymptotic constants and empirical growth estimators.

Precision is always an argument; nothing here changes mpmath's global context.
Logarithms use the principal branch.  Only real parts of f0 are compared with
published constants, and those do not depend on the branch.
"""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import BranchPoint, DegenerateCubic, InsufficientData, InvalidParameters
from .numeric import as_fraction

__all__ = [
    "digamma",
    "CubicRoots",
    "characteristic_polynomial",
    "characteristic_roots",
    "f0_eval",
    "phi_limit",
    "phi_x2_integral",
    "ConstantSet",
    "derived_constants",
    "closed_form_constants",
    "empirical_rate",
    "upper_envelope_rate",
]


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# --------------------------------------------------------------------------
# digamma


def digamma(x, precision_bits: int = 128):
    """psi(x) for real x > 0.

    Shift x up to X >= max(20, bits/4) with psi(x) = psi(x+1) - 1/x, then sum
    psi(X) ~ log X - 1/(2X) - sum_k B_2k / (2k X^2k).  For real X > 0 the
    remainder is bounded by the first omitted term, so we stop once a term is
    below 2^-(bits+8).
    """
    x = as_fraction(x) if not isinstance(x, (mpmath.mpf, float)) else x
    if x <= 0:
        raise InvalidParameters("digamma is only implemented for x > 0")
    wp = precision_bits + 24
    with mpmath.workprec(wp):
        target = max(20, precision_bits // 4)
        shift = max(0, math.ceil(target - x))
        # the shift sum is exact for rational x
        if isinstance(x, Fraction):
            acc = sum((Fraction(1) / (x + j) for j in range(shift)), Fraction(0))
            correction = _to_mpf(acc)
            X = _to_mpf(x + shift)
        else:
            X = mpmath.mpf(x) + shift
            correction = mpmath.fsum(1 / (mpmath.mpf(x) + j) for j in range(shift))
        eps = mpmath.ldexp(1, -(precision_bits + 8))
        s = mpmath.log(X) - 1 / (2 * X)
        X2 = X * X
        power = X2
        k = 1
        while True:
            term = mpmath.bernoulli(2 * k) / (2 * k * power)
            s -= term
            if abs(term) < eps:
                break
            k += 1
            power *= X2
            if k > 4 * precision_bits:
                raise ArithmeticError("digamma series did not settle")
        return +(s - correction)


# --------------------------------------------------------------------------
# characteristic polynomials and their roots


def _poly_from_roots(roots: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients, highest degree first, of prod (tau - root)."""
    coeffs = [Fraction(1)]
    for r in roots:
        nxt = coeffs + [Fraction(0)]
        for i, c in enumerate(coeffs):
            nxt[i + 1] -= c * r
        coeffs = nxt
    return coeffs


def characteristic_polynomial(alphas, betas, hat: bool = False) -> list[Fraction]:
    """prod(tau - alpha) - prod(tau - beta), or the hat analogue with squared
    factors (tau - alpha_0/2)^2, (tau - beta_0/2)^2; highest degree first,
    leading zeros stripped."""
    a = [as_fraction(x) for x in alphas]
    b = [as_fraction(x) for x in betas]
    if hat:
        ra = [a[0] / 2, a[0] / 2] + a[1:]
        rb = [b[0] / 2, b[0] / 2] + b[1:]
    else:
        ra, rb = a, b
    pa, pb = _poly_from_roots(ra), _poly_from_roots(rb)
    diff = [x - y for x, y in zip(pa, pb)]
    while diff and diff[0] == 0:
        diff.pop(0)
    return diff


@dataclass(frozen=True)
class CubicRoots:
    tau0: mpmath.mpc
    tau0conj: mpmath.mpc
    tau1: mpmath.mpf
    precision_bits: int

    def as_list(self):
        return [self.tau0, self.tau0conj, self.tau1]


def _horner(coeffs, z):
    acc = 0
    for c in coeffs:
        acc = acc * z + c
    return acc


def characteristic_roots(alphas, betas, hat: bool = False, precision_bits: int = 128) -> CubicRoots:
    """Roots of the characteristic cubic: companion eigenvalues, then Newton.

    The conjugate pair comes first (positive imaginary part first), the real
    root last.
    """
    poly = characteristic_polynomial(alphas, betas, hat)
    if len(poly) != 4:
        raise DegenerateCubic(f"difference polynomial has degree {len(poly) - 1}, expected 3")
    wp = precision_bits + 32
    with mpmath.workprec(wp):
        c = [_to_mpf(x) for x in poly]
        lead = c[0]
        comp = mpmath.matrix(3, 3)
        comp[0, 0], comp[0, 1], comp[0, 2] = -c[1] / lead, -c[2] / lead, -c[3] / lead
        comp[1, 0] = 1
        comp[2, 1] = 1
        eig = mpmath.eig(comp, left=False, right=False)
        dpoly = [c[0] * 3, c[1] * 2, c[2]]
        polished = []
        for z in eig:
            z = mpmath.mpc(z)
            for _ in range(8):
                step = _horner(c, z) / _horner(dpoly, z)
                z -= step
                if abs(step) <= abs(z) * mpmath.ldexp(1, -wp + 4):
                    break
            polished.append(z)
        polished.sort(key=lambda z: abs(z.imag))
        real = polished[0]
        pair = sorted(polished[1:], key=lambda z: -z.imag)
        if abs(pair[0].imag) <= mpmath.ldexp(1, -precision_bits // 2):
            raise DegenerateCubic("expected one real root and a complex-conjugate pair")
        tau1 = mpmath.re(real)
        for _ in range(4):
            tau1 -= _horner(c, tau1) / _horner(dpoly, tau1)
        tau0 = pair[0]
        return CubicRoots(+tau0, mpmath.conj(tau0), +tau1, precision_bits)


def _xlogx_terms(alphas, betas, hat: bool):
    """(coefficient, shift) pairs for the tau-dependent part, and the constant part."""
    a = [as_fraction(x) for x in alphas]
    b = [as_fraction(x) for x in betas]
    if hat:
        moving = [(a[0], a[0] / 2), (-b[0], b[0] / 2)]
        moving += [(a[j], a[j]) for j in range(1, 4)] + [(-b[j], b[j]) for j in range(1, 4)]
        fixed = [(-(a[0] - b[0]), a[0] / 2 - b[0] / 2), (-(a[1] - b[1]), a[1] - b[1]),
                 (b[2] - a[2], b[2] - a[2]), (b[3] - a[3], b[3] - a[3])]
    else:
        moving = [(a[j], a[j]) for j in range(4)] + [(-b[j], b[j]) for j in range(4)]
        fixed = [(-(a[j] - b[j]), a[j] - b[j]) for j in range(3)] + [(b[3] - a[3], b[3] - a[3])]
    return moving, fixed


def f0_eval(alphas, betas, tau, hat: bool = False, precision_bits: int = 128):
    """f0(tau) (or f^0(tau)) with principal-branch logarithms.

    Terms with a zero coefficient are dropped, so beta_j = 0 contributes
    nothing even at tau = 0.
    """
    moving, fixed = _xlogx_terms(alphas, betas, hat)
    with mpmath.workprec(precision_bits + 32):
        tau = mpmath.mpmathify(tau)
        total = mpmath.mpf(0)
        for coef, shift in moving:
            if coef == 0:
                continue
            arg = tau - _to_mpf(shift)
            if arg == 0:
                raise BranchPoint(f"tau = {shift} is a branch point of f0")
            total += _to_mpf(coef) * mpmath.log(arg)
        for coef, val in fixed:
            if coef == 0:
                continue
            total += _to_mpf(coef) * mpmath.log(_to_mpf(val))
        return +total


# --------------------------------------------------------------------------
# limit of log Phi_n / n


def phi_x2_integral(profile) -> Fraction:
    """int_0^{1/gamma_min} phi(x) dx/x^2, exactly."""
    cut = 1 / profile.gamma_min
    total = Fraction(0)
    for lo, hi, v in profile.intervals():
        hi = min(hi, cut)
        if hi <= lo:
            continue
        if lo == 0:
            raise InvalidParameters("profile is non-zero next to 0; the integral diverges")
        total += v * (1 / lo - 1 / hi)
    return total


def phi_limit(profile, precision_bits: int = 128):
    """int_0^1 phi d(psi) - int_0^{1/gamma_min} phi dx/x^2."""
    with mpmath.workprec(precision_bits + 16):
        acc = mpmath.mpf(0)
        for lo, hi, v in profile.intervals():
            if lo == 0:
                raise InvalidParameters("profile is non-zero next to 0; psi diverges there")
            acc += v * (digamma(hi, precision_bits + 8) - digamma(lo, precision_bits + 8))
        return +(acc - _to_mpf(phi_x2_integral(profile)))


# --------------------------------------------------------------------------
# the derived constants


@dataclass(frozen=True)
class ConstantSet:
    rho: mpmath.mpf
    kappa: mpmath.mpf
    vphi: mpmath.mpf
    phi_limit_z2: mpmath.mpf | None
    tau_0: mpmath.mpf
    s_0: mpmath.mpf
    twenty_four_minus_vphi: mpmath.mpf
    twenty_four_minus_vphi_minus_rho: mpmath.mpf

    def as_dict(self, digits: int = 10) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = None if v is None else mpmath.nstr(v, digits)
        return out


def derived_constants(vphi, rho, kappa, phi_limit_z2=None) -> ConstantSet:
    """tau_0 = (32 - vphi - rho)/8, s_0 = (32 - vphi + kappa)/8 and 24 - vphi (- rho)."""
    vals = [mpmath.mpmathify(x) for x in (vphi, rho, kappa)]
    if not all(mpmath.isfinite(x) for x in vals):
        raise InvalidParameters("constants must be finite")
    vphi, rho, kappa = vals
    return ConstantSet(
        rho=rho,
        kappa=kappa,
        vphi=vphi,
        phi_limit_z2=phi_limit_z2,
        tau_0=(32 - vphi - rho) / 8,
        s_0=(32 - vphi + kappa) / 8,
        twenty_four_minus_vphi=24 - vphi,
        twenty_four_minus_vphi_minus_rho=24 - vphi - rho,
    )


def closed_form_constants(precision_bits: int = 128) -> dict:
    """Every constant of the example constructions from its closed form."""
    from .denominators import PROFILE_Z2, PROFILE_Z3
    from .rational_function import Z2_EXAMPLE_GENERATORS as G2, Z3_EXAMPLE_GENERATORS as G3

    with mpmath.workprec(precision_bits + 16):
        roots2 = characteristic_roots(*G2, hat=False, precision_bits=precision_bits)
        roots3 = characteristic_roots(*G3, hat=True, precision_bits=precision_bits)
        f = lambda G, t, hat: mpmath.re(f0_eval(*G, t, hat=hat, precision_bits=precision_bits))
        re_tau0 = f(G2, roots2.tau0, False)
        re_tau1 = f(G2, roots2.tau1, False)
        re_hat_tau0 = f(G3, roots3.tau0, True)
        re_hat_tau1 = f(G3, roots3.tau1, True)
        lim2 = phi_limit(PROFILE_Z2, precision_bits)
        lim3 = phi_limit(PROFILE_Z3, precision_bits)
        cs = derived_constants(lim3, -re_hat_tau0, re_hat_tau1, phi_limit_z2=lim2)
    return {
        "roots_z2": roots2,
        "roots_z3": roots3,
        "re_f0_tau0": re_tau0,
        "re_f0_tau1": re_tau1,
        "re_fhat0_tau0": re_hat_tau0,
        "re_fhat0_tau1": re_hat_tau1,
        "phi_limit_z2": lim2,
        "phi_limit_z3": lim3,
        "constants": cs,
    }


# --------------------------------------------------------------------------
# empirical rates


def empirical_rate(values: Sequence[float], ns: Sequence[int] | None = None) -> float:
    """Least-squares slope of values against n."""
    values = [float(v) for v in values]
    if ns is None:
        ns = range(len(values))
    ns = [float(n) for n in ns]
    if len(values) != len(ns):
        raise InvalidParameters("values and ns differ in length")
    if len(values) < 5:
        raise InsufficientData("need at least 5 samples")
    slope, _ = statistics.linear_regression(ns, values)
    return slope


def _upper_hull(points):
    hull = []
    for p in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def upper_envelope_rate(values: Sequence[float], ns: Sequence[int] | None = None) -> float:
    """Slope of the upper envelope: least squares through the upper convex hull.

    Used for limsup statements, where single samples may dip below the trend.
    """
    values = [float(v) for v in values]
    ns = list(range(len(values))) if ns is None else list(ns)
    if len(values) < 5:
        raise InsufficientData("need at least 5 samples")
    hull = _upper_hull(list(zip(map(float, ns), values)))
    if len(hull) < 2:
        raise InsufficientData("degenerate envelope")
    xs, ys = zip(*hull)
    if len(hull) == 2:
        return (ys[1] - ys[0]) / (xs[1] - xs[0])
    slope, _ = statistics.linear_regression(xs, ys)
    return slope
