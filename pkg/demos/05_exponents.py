"""
Exponent bounds and small lattice points
========================================
"""
from fractions import Fraction

import mpmath

from zetaforms.asymptotics import closed_form_constants
from zetaforms.exponents import bound_table, lin_dep_bound, minkowski_witness, mu_psi_discrepancy, tau_regime
from zetaforms.recurrence import CertificationInput, certify
from zetaforms.numeric import lcm_upto

cs = closed_form_constants(128)["constants"]
for label, v in bound_table(cs.tau_0, cs.s_0):
    print(f"{label:58s} {mpmath.nstr(v, 10) if not isinstance(v, str) else v}")

print(mu_psi_discrepancy(cs.tau_0, cs.s_0))

# linear dependence at the generic mu_psi gives exactly 6 - tau
tau = Fraction(9, 10)
print(lin_dep_bound(2 - 2 / (4 - tau), tau), "=", 6 - tau)

# Minkowski: a small a0 + a1 zeta(2) + a2 zeta(3) in the lattice at n = 4
w = minkowski_witness(4, 0, 5.5)
print(w.to_dict())
print(tau_regime(0.5), tau_regime(2, n=3))

# zeta(2) != 5/3, run through the lower-bound argument at m = 100
m = 100
out = certify(CertificationInput(m, Fraction(-5, lcm_upto(m)), Fraction(3, lcm_upto(m)), 0, 0.01, 0.01))
print(out["verdict"])
