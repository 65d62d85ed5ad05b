"""
Denominators and the prime products Phi_n, Phi^_n
=================================================

D_8n D_16n p_n is an integer.  A large block of primes can be divided out of
q_n again; the step functions phi and phi^ say which primes, and how often.
"""
import math

from zetaforms.denominators import PROFILE_Z2, PROFILE_Z3, prime_product, verify_divisibility
from zetaforms.linear_forms import form_record
from zetaforms.numeric import lcm_upto

# the step function phi^ on (0, 1]
for lo, hi, v in PROFILE_Z3.intervals():
    print(f"phi^ = {v} on [{lo}, {hi})")

n = 6
rec = form_record(n)
res = verify_divisibility(rec)
print(f"n={n}:", {k: c["ok"] for k, c in res["checks"].items()})

# how much the prime product saves, per unit of n
for n in (10, 20, 40, 60):
    ph = prime_product(PROFILE_Z3, n).value
    p2 = prime_product(PROFILE_Z2, n).value
    print(f"n={n:2d}  log Phi^_n/n = {math.log(ph)/n:.4f}  log Phi_n/n = {math.log(p2)/n:.4f}"
          f"  log D_16n/n = {math.log(lcm_upto(16*n))/n:.4f}")
# the limits are 5.70169601 and 6.61268356; the approach is slow
