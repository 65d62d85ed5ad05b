"""
The asymptotic constants from closed forms
==========================================

The growth rates of q_n and r_n are Re f_0 at the roots of a cubic; the
Phi-limits are integrals of the step functions against digamma.  tau_0 and
s_0 combine them.
"""
import mpmath

from zetaforms.asymptotics import closed_form_constants, derived_constants

c = closed_form_constants(160)
print("roots of the zeta(2) cubic:", c["roots_z2"].tau0, c["roots_z2"].tau1)
print("Re f_0(tau_0) =", mpmath.nstr(c["re_f0_tau0"], 15))
print("Re f_0(tau_1) =", mpmath.nstr(c["re_f0_tau1"], 15))
print("phi^-limit    =", mpmath.nstr(c["phi_limit_z3"], 15))
cs = c["constants"]
print("tau_0 =", mpmath.nstr(cs.tau_0, 15), " s_0 =", mpmath.nstr(cs.s_0, 15))

# the printed 9-digit tau_0 and s_0 are what the 8-digit inputs give
print(derived_constants("5.70169601", "19.10095491", "27.86755317").as_dict(10))
