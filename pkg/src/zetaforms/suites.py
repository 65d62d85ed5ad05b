"""Verification suites shared by the CLI and the acceptance tests.

Each suite returns a report ``{"suite", "ok", "checks": [...]}`` where every
check is a dict with at least ``name`` and ``ok``.
"""
from __future__ import annotations

import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from types import SimpleNamespace

from .cache import RecordCache
from .errors import CacheCorrupt, DegenerateParameters, InvalidParameters, NoOperatorFound
from .linear_forms import (
    FormRecord,
    default_precision,
    exact_triple,
    form_record,
    p_z2,
    p_z3,
    q_example_hyper_z2,
    q_z2,
    q_z3,
    residual,
    whipple_specialization,
    whipple_verify,
)
from .rational_function import (
    ParamSetZ2,
    ParamSetZ3,
    check_integer_valued,
    decompose_z3,
    z2_from_generators,
    z3_from_generators,
    z3_example,
)

# terms of q_n used to fit the order-3 operator (its minimal degree is 100,
# so 4 * 101 unknowns plus the held-out margin)
FIT_TERMS = 416
OPERATOR_BLOB = "operator-q-example"


# --------------------------------------------------------------------------
# records, with cache


class CustomFamily:
    """A user parameter file: generators {"alphas", "betas"} or one set {"a", "b"}."""

    def __init__(self, kind: str, doc: dict):
        if kind not in ("z2", "z3"):
            raise InvalidParameters(f"--kind must be z2 or z3, got {kind!r}")
        self.kind = kind
        if "alphas" in doc:
            self.alphas, self.betas = list(doc["alphas"]), list(doc["betas"])
            self.single = None
        elif "a" in doc:
            cls = ParamSetZ2 if kind == "z2" else ParamSetZ3
            self.single = cls(doc["a"], doc["b"])
        else:
            raise InvalidParameters('parameter file needs "alphas"/"betas" or "a"/"b"')

    def params(self, n: int):
        if self.single is not None:
            return self.single
        make = z2_from_generators if self.kind == "z2" else z3_from_generators
        return make(self.alphas, self.betas, n)

    def record(self, n: int, bits: int) -> FormRecord:
        P = self.params(n)
        if self.kind == "z2":
            q, p = q_z2(P), p_z2(P)
            return FormRecord(n, q, p, None, residual(q, p, "zeta2", bits), None, bits)
        q, ph = q_z3(P), p_z3(P)
        return FormRecord(n, q, None, ph, None, residual(q, ph, "zeta3", bits), bits)


def _compute(args):
    construction, n, bits, custom = args
    if custom is not None:
        return custom.record(n, bits).to_dict()
    return form_record(n, bits, construction).to_dict()


def record_dicts(construction: str, ns, precision_bits=None, cache: RecordCache | None = None,
                 jobs: int = 1, custom: CustomFamily | None = None, on_corrupt="raise"):
    """Serialized FormRecords for every n in ns, in order.

    ``on_corrupt`` is "raise" (propagate CacheCorrupt) or "recompute".
    """
    ns = list(ns)
    out: dict[int, dict] = {}
    todo = []
    for n in ns:
        bits = precision_bits or default_precision(n)
        hit = None
        if cache is not None:
            try:
                hit = cache.get(construction, n, bits)
            except CacheCorrupt as exc:
                if on_corrupt == "raise":
                    raise
                print(f"warning: {exc}; recomputing", file=sys.stderr)
        if hit is not None:
            out[n] = hit
        else:
            todo.append((construction, n, bits, custom))
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(_compute, todo))
    else:
        computed = [_compute(t) for t in todo]
    for (_, n, _, _), rec in zip(todo, computed):
        out[n] = rec
        if cache is not None:
            cache.put(construction, n, rec)
    return [out[n] for n in ns]


def _exact_view(doc: dict):
    """q, p, p^ of a serialized record without recomputing residuals."""
    frac = lambda a, b: None if doc.get(a) is None else Fraction(int(doc[a]), int(doc[b]))
    return SimpleNamespace(n=int(doc["n"]), q=int(doc["q"]), p=frac("p_num", "p_den"),
                           phat=frac("phat_num", "phat_den"))


def _report(name, checks, **extra):
    return {"suite": name, "ok": all(c["ok"] for c in checks), "checks": checks, **extra}


# --------------------------------------------------------------------------
# suites


def suite_divisibility(n_max: int = 20, cache: RecordCache | None = None, jobs: int = 1) -> dict:
    from .denominators import verify_divisibility

    checks = []
    for n in range(n_max + 1):
        try:
            doc = record_dicts("paired", [n], cache=cache, jobs=jobs)[0]
        except CacheCorrupt as exc:
            checks.append({"name": "record", "n": exc.n, "ok": False, "error": str(exc)})
            continue
        rec = _exact_view(doc)
        res = verify_divisibility(rec)
        for key, c in res["checks"].items():
            checks.append({"name": key, "n": n, "ok": c["ok"], "bad_primes": c["bad_primes"]})
        B = decompose_z3(z3_example(n)).B
        checks.append({"name": "sum_B_zero", "n": n, "ok": sum(B.values(), Fraction(0)) == 0})
    return _report("divisibility", checks)


def random_whipple_instance(rng: random.Random, max_N: int = 8):
    """Random terminating instance (a, N, f, g, h) with small rational parameters."""
    def rat():
        den = rng.choice((1, 2, 3, 5, 7))
        return Fraction(rng.randint(-8 * den, 8 * den), den)
    return rat(), rng.randint(0, max_N), rat(), rat(), rat()


def suite_whipple(count: int = 100, seed: int = 2024, max_N: int = 8, spec_ns=(1, 2)) -> dict:
    rng = random.Random(seed)
    checks = []
    skipped = 0
    while len(checks) < count:
        a, N, f, g, h = random_whipple_instance(rng, max_N)
        try:
            ok = whipple_verify(a, N, f, g, h)
        except DegenerateParameters:
            skipped += 1
            continue
        checks.append({"name": "random_instance", "ok": ok,
                       "params": {"a": str(a), "N": N, "f": str(f), "g": str(g), "h": str(h)}})
    for n in spec_ns:
        sp = whipple_specialization(n)
        q = exact_triple(n)[0]
        checks.append({"name": "specialization", "n": n,
                       "ok": sp["sides_equal"] and sp["prefactors_match"]
                       and sp["q_from_lhs"] == q == sp["q_from_rhs"]})
    return _report("whipple", checks, degenerate_skipped=skipped)


def suite_iv_lemmas(count: int = 300, seed: int = 7) -> dict:
    """R(k), D_m R'(k) and D_m (R(k) - R(l))/(k - l) are integers for random products."""
    rng = random.Random(seed)
    checks = []
    for _ in range(count):
        factors = []
        for _ in range(rng.randint(1, 4)):
            b = rng.randint(-10, 10)
            factors.append((b + rng.randint(1, 9), b))
        k = rng.randint(-25, 25)
        l = rng.choice([x for x in range(-25, 26) if x != k])
        res = check_integer_valued(factors, k, l)
        checks.append({"name": "integer_valued", "factors": factors, "k": k, "l": l, "ok": all(res),
                       "parts": list(res)})
    return _report("iv-lemmas", checks)


def fitted_operator(cache: RecordCache | None = None, terms: int = FIT_TERMS):
    """The order-3 operator annihilating q_n, fitted from q_0..q_{terms-1}."""
    from .recurrence import RecurrenceOperator, fit_recurrence

    name = f"{OPERATOR_BLOB}-{terms}"
    if cache is not None:
        blob = cache.get_blob(name)
        if blob is not None:
            return RecurrenceOperator.from_dict(blob)
    q = [q_example_hyper_z2(n) for n in range(terms)]
    op = fit_recurrence(q).normalized()
    if cache is not None:
        cache.put_blob(name, op.to_dict())
    return op


def suite_recurrence(n_max: int = 60, cache: RecordCache | None = None, residual_n_max: int = 30,
                     delta_n_max: int = 50, op=None) -> dict:
    from .recurrence import determinant_seq, fit_recurrence, verify_recurrence

    checks = []
    notes = {}
    # the short window can only be reported, never substituted
    try:
        fit_recurrence([q_example_hyper_z2(n) for n in range(41)])
        notes["fit_from_n_le_40"] = "operator found"
    except NoOperatorFound as exc:
        notes["fit_from_n_le_40"] = f"no operator: {exc}"
    if op is None:
        op = fitted_operator(cache)
    notes["operator"] = {"order": op.order, "degree": op.degree,
                         "max_coefficient_bits": max(abs(c).bit_length() for p in op.polys for c in p)}

    top = max(n_max, delta_n_max + 3, residual_n_max) + op.order
    triples = [exact_triple(n) for n in range(top + 1)]
    ns = range(n_max + 1)
    for name, idx in (("annihilates_q", 0), ("annihilates_p", 1), ("annihilates_phat", 2)):
        rep = verify_recurrence(op, [t[idx] for t in triples], ns)
        checks.append({"name": name, "ok": rep.ok, "first_failure": rep.first_failure})

    pattern = op.sign_pattern()
    checks.append({"name": "sign_pattern_P3_positive", "ok": pattern[3] == {1}})
    checks.append({"name": "sign_pattern_P0_negative", "ok": pattern[0] == {-1}})

    recs = [form_record(n) for n in range(residual_n_max + op.order + 1)]
    for name, attr in (("annihilates_r", "r"), ("annihilates_rhat", "rhat")):
        rep = verify_recurrence(op, [getattr(r, attr) for r in recs], range(residual_n_max + 1))
        checks.append({"name": name, "ok": rep.ok, "first_failure": rep.first_failure,
                       "min_cancellation_bits": rep.min_cancellation_bits})

    deltas = [determinant_seq(triples, n).delta for n in range(delta_n_max + 2)]
    zero = [n for n in range(delta_n_max + 1) if deltas[n] == 0]
    checks.append({"name": "delta_nonzero", "ok": not zero, "zero_at": zero})
    bad = [n for n in range(delta_n_max + 1)
           if op.coefficient(3, n) * deltas[n + 1] + op.coefficient(0, n) * deltas[n] != 0]
    checks.append({"name": "delta_recurrence", "ok": not bad, "fails_at": bad})
    return _report("recurrence", checks, notes=notes)


SUITES = ("divisibility", "whipple", "recurrence", "iv-lemmas")


def run_suite(name: str, n_max=None, cache=None, jobs: int = 1) -> dict:
    if name == "divisibility":
        return suite_divisibility(20 if n_max is None else n_max, cache, jobs)
    if name == "whipple":
        return suite_whipple()
    if name == "iv-lemmas":
        return suite_iv_lemmas()
    if name == "recurrence":
        n_max = 60 if n_max is None else n_max
        return suite_recurrence(n_max, cache, min(30, n_max), min(50, n_max))
    raise InvalidParameters(f"unknown suite {name!r}")


def dumps(report) -> str:
    return json.dumps(report, indent=1, default=str)
