"""
Exact linear forms in 1, zeta(2), zeta(3)
=========================================

Builds the rational functions R(t) and R^(t) for the example parameters,
reads q_n, p_n, p^_n off their partial-fraction data and checks how small
q_n zeta(2) - p_n and q_n zeta(3) - p^_n are.
"""
from zetaforms.linear_forms import exact_triple, form_record, q_example_hyper_z2, q_z2, q_z3
from zetaforms.rational_function import decompose_z2, z2_example, z3_example

# the parameter sets at n = 1: poles at the b_j, zeros at the a_i
P = z2_example(1)
print("R at n=1:", P)
pf = decompose_z2(P)
print("a few residues C_k:", dict(list(pf.C.items())[:4]))

# q_n comes out of the zeta(2) and zeta(3) constructions alike,
# and also from a terminating 4F3 sum
for n in range(4):
    print(n, q_z2(z2_example(n)), q_z3(z3_example(n)) == q_z2(z2_example(n)), q_example_hyper_z2(n) == q_z2(z2_example(n)))

# the residuals decay roughly like e^(-19.1 n)
for n in (1, 2, 5, 10, 20):
    rec = form_record(n)
    print(f"n={n:2d}  log|r_n| = {rec.r.log_abs:9.3f}   log|r^_n| = {rec.rhat.log_abs:9.3f}")

q, p, ph = exact_triple(2)
print("p_2 =", p)
print("p^_2 =", ph)
