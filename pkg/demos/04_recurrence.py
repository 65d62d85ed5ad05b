"""
Recovering the order-3 recurrence
=================================

No recurrence is assumed.  An operator is fitted to q_n exactly (modular
nullspaces, CRT and rational reconstruction), then checked on p_n, p^_n,
the residuals and the determinants Delta_n.

The minimal operator has degree 100, so the fit needs about 416 terms and a
few minutes the first time.  The result is kept in ./zf-cache.
"""
import mpmath

from zetaforms.cache import RecordCache, default_cache_dir
from zetaforms.errors import NoOperatorFound
from zetaforms.linear_forms import exact_triple, q_example_hyper_z2
from zetaforms.recurrence import characteristic_moduli, determinant_seq, fit_recurrence, verify_recurrence
from zetaforms.suites import fitted_operator

# 41 terms are not enough
try:
    fit_recurrence([q_example_hyper_z2(n) for n in range(41)])
except NoOperatorFound as exc:
    print("from n <= 40:", exc)

op = fitted_operator(RecordCache(default_cache_dir()))
print("order", op.order, "degree", op.degree)
print("sign pattern:", op.sign_pattern())

triples = [exact_triple(n) for n in range(25)]
for k, name in enumerate(("q", "p", "p^")):
    print(name, verify_recurrence(op, [t[k] for t in triples], range(22)).ok)

# |roots| of the leading characteristic polynomial give the growth rates
print([mpmath.nstr(mpmath.log(m), 12) for m in characteristic_moduli(op)])

print("Delta_0 =", determinant_seq(triples, 0).delta)
