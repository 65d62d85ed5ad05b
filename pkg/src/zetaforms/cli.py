"""zetaforms command line: forms, verify, constants, exponents, certify.

Exit codes: 0 ok, 1 a check failed, 2 bad input, 3 precision failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .cache import RecordCache, custom_construction_id, default_cache_dir
from .errors import (
    BudgetExhausted,
    CacheCorrupt,
    HypothesisViolated,
    InvalidParameters,
    PrecisionTooLow,
    ZetaFormsError,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

CSV_COLUMNS = ["n", "q", "p_num", "p_den", "phat_num", "phat_den", "log_abs_r", "log_abs_rhat", "precision_bits"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _cache(args):
    if getattr(args, "no_cache", False):
        return None
    return RecordCache(args.cache_dir or default_cache_dir())


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _fmt_row(label, value, digits=10):
    import mpmath

    if isinstance(value, str):
        shown = value
    elif isinstance(value, Fraction):
        shown = mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, digits)
    else:
        shown = mpmath.nstr(mpmath.mpmathify(value), digits)
    return f"{label:<58} {shown}"


# --------------------------------------------------------------------------


def cmd_forms(args) -> int:
    from .suites import CustomFamily, record_dicts

    if args.n_max < 0:
        raise InvalidParameters("--n-max must be >= 0")
    if args.precision_bits is not None and args.precision_bits < 64:
        raise InvalidParameters("--precision-bits must be >= 64")
    custom = None
    construction = args.construction
    if args.params:
        text = Path(args.params).read_text()
        try:
            doc = json.loads(text)
        except ValueError as exc:
            raise InvalidParameters(f"parameter file is not JSON: {exc}") from exc
        custom = CustomFamily(args.kind, doc)
        construction = custom_construction_id(json.dumps({"kind": args.kind, **doc}))
    ns = [0] if custom is not None and custom.single is not None else range(args.n_max + 1)
    recs = record_dicts(construction, ns, args.precision_bits, _cache(args), args.jobs, custom,
                        on_corrupt="recompute")
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in recs:
            w.writerow({k: ("" if r.get(k) is None else r[k]) for k in CSV_COLUMNS})
        text = buf.getvalue()
    else:
        text = "".join(json.dumps(r) + "\n" for r in recs)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .suites import SUITES, dumps, run_suite

    names = SUITES if args.suite == "all" else (args.suite,)
    cache = _cache(args)
    reports = [run_suite(name, args.n_max, cache, args.jobs) for name in names]
    ok = all(r["ok"] for r in reports)
    if args.json:
        sys.stdout.write(dumps({"ok": ok, "suites": reports}) + "\n")
    else:
        for r in reports:
            failed = [c for c in r["checks"] if not c["ok"]]
            print(f"{r['suite']}: {'PASS' if r['ok'] else 'FAIL'} ({len(r['checks'])} checks, {len(failed)} failed)")
            for c in failed[:20]:
                where = f" n={c['n']}" if "n" in c else ""
                print(f"  failed {c['name']}{where}: {json.dumps({k: v for k, v in c.items() if k not in ('name', 'ok')}, default=str)}")
            for k, v in r.get("notes", {}).items():
                print(f"  note {k}: {v}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_constants(args) -> int:
    from .asymptotics import closed_form_constants

    res = closed_form_constants(args.precision_bits)
    cs = res["constants"]
    rows = [
        ("tau_0 root of the zeta(2) cubic", res["roots_z2"].tau0),
        ("tau_1 root of the zeta(2) cubic", res["roots_z2"].tau1),
        ("tau^_0 root of the zeta(3) cubic", res["roots_z3"].tau0),
        ("tau^_1 root of the zeta(3) cubic", res["roots_z3"].tau1),
        ("Re f_0(tau_0)", res["re_f0_tau0"]),
        ("Re f_0(tau_1)", res["re_f0_tau1"]),
        ("Re f^_0(tau^_0)", res["re_fhat0_tau0"]),
        ("Re f^_0(tau^_1)", res["re_fhat0_tau1"]),
        ("lim log Phi_n / n", res["phi_limit_z2"]),
        ("lim log Phi^_n / n  (vphi)", res["phi_limit_z3"]),
        ("rho = -Re f^_0(tau^_0)", cs.rho),
        ("kappa = Re f^_0(tau^_1)", cs.kappa),
        ("tau_0 = (32 - vphi - rho)/8", cs.tau_0),
        ("s_0 = (32 - vphi + kappa)/8", cs.s_0),
        ("24 - vphi", cs.twenty_four_minus_vphi),
        ("24 - vphi - rho", cs.twenty_four_minus_vphi_minus_rho),
    ]
    import mpmath

    if args.json:
        doc = {label: mpmath.nstr(v if not isinstance(v, mpmath.mpc) else v, 10) for label, v in rows}
        sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    else:
        for label, v in rows:
            print(_fmt_row(label, v))
    return EXIT_OK


def cmd_exponents(args) -> int:
    import mpmath

    from .asymptotics import closed_form_constants
    from .exponents import bound_table, minkowski_witness, mu_psi_discrepancy, tau_regime

    cs = closed_form_constants(128)["constants"]
    rows = bound_table(cs.tau_0, cs.s_0)
    disc = mu_psi_discrepancy(cs.tau_0, cs.s_0)
    wit = minkowski_witness(args.n, args.tau, args.s)
    regime = tau_regime(cs.tau_0)
    if args.json:
        doc = {
            "bounds": {label: (v if isinstance(v, str) else mpmath.nstr(v, 10)) for label, v in rows},
            "mu_psi_discrepancy": disc,
            "tau_regime": {k: str(v) for k, v in regime.items()},
            "minkowski": {"tau": args.tau, "s": args.s, **wit.to_dict()},
        }
        sys.stdout.write(json.dumps(doc, indent=1) + "\n")
    else:
        for label, v in rows:
            print(_fmt_row(label, v))
        print()
        print(f"mu_psi(zeta(3)) discrepancy: computed {disc['computed']}, printed {disc['printed']} "
              f"(difference {disc['difference']})")
        print(f"  tau reproducing the printed value: {disc['tau_reproducing_printed']}; "
              f"(s0 - 1)/3 = {disc['value_at_tau_1']}")
        print(f"  {disc['note']}")
        print()
        w = wit.to_dict()
        if "a0" in w:
            print(f"Minkowski witness n={args.n}, tau={args.tau}, s={args.s}: "
                  f"a0={w['a0']} a1={w['a1']} a2={w['a2']} |form|={w['form_value'].lstrip('-')} <= {w['form_bound']}")
        else:
            print(f"Minkowski search n={args.n}, tau={args.tau}, s={args.s}: no lattice point "
                  f"({w['pairs_searched']} pairs, complete={w['complete']})")
    return EXIT_OK


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameters(f"not a rational number: {text!r}") from exc


def _encoded_triple(spec: str, m: int):
    """KIND:P/Q -> the triple showing zeta(KIND) != P/Q."""
    from .numeric import lcm_upto

    try:
        kind, frac = spec.split(":", 1)
    except ValueError as exc:
        raise InvalidParameters("--encode expects z2:P/Q or z3:P/Q") from exc
    r = _parse_rational(frac)
    p, q = r.numerator, r.denominator
    Dm, D2m = lcm_upto(m), lcm_upto(2 * m)
    if kind == "z2":
        return Fraction(-p, Dm), Fraction(q, Dm), Fraction(0)
    if kind == "z3":
        return Fraction(-Dm * p, D2m), Fraction(0), Fraction(Dm * q, D2m)
    raise InvalidParameters(f"unknown constant {kind!r} in --encode")


def cmd_certify(args) -> int:
    from .recurrence import CertificationInput, certify

    if args.m < 1:
        raise InvalidParameters("--m must be positive")
    if args.encode:
        a0, a1, a2 = _encoded_triple(args.encode, args.m)
    else:
        a0, a1, a2 = (_parse_rational(x) for x in (args.a0, args.a1, args.a2))
    inp = CertificationInput(args.m, a0, a1, a2, float(_parse_rational(args.eps)),
                             float(_parse_rational(args.eta)))
    res = certify(inp)
    if args.json:
        sys.stdout.write(json.dumps(res, indent=1, default=str) + "\n")
    else:
        print(res["verdict"])
        for k in ("m", "l", "e_ml", "integer_is_integral", "integer_nonzero", "abs_linear_form", "threshold"):
            print(f"  {k}: {res[k]}")
    return EXIT_OK if res["consistent_with_bound"] else EXIT_CHECK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="zetaforms", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cache_flags(p):
        p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
        p.add_argument("--cache-dir", default=None, help="cache directory (default $ZF_CACHE_DIR or ./zf-cache)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes over n")

    p = sub.add_parser("forms", help="write q_n, p_n, p^_n records")
    p.add_argument("--construction", choices=("paired", "z2-ex", "z3-ex"), default="paired")
    p.add_argument("--params", help='JSON file: {"alphas": [...], "betas": [...]} or {"a": [...], "b": [...]}')
    p.add_argument("--kind", choices=("z2", "z3"), default="z2", help="construction type of --params")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("ndjson", "csv"), default="ndjson")
    cache_flags(p)
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=("divisibility", "whipple", "recurrence", "iv-lemmas", "all"), default="all")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--json", action="store_true")
    cache_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="asymptotic constants from their closed forms")
    p.add_argument("--json", action="store_true")
    p.add_argument("--precision-bits", type=int, default=128)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("exponents", help="exponent bounds and a Minkowski witness")
    p.add_argument("--json", action="store_true")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--s", type=float, default=5.5)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("certify", help="run the lower-bound argument on a candidate triple")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a0", default="0")
    p.add_argument("--a1", default="0")
    p.add_argument("--a2", default="0")
    p.add_argument("--encode", default=None, help="z2:P/Q or z3:P/Q, the triple refuting zeta = P/Q")
    p.add_argument("--eps", default="0.01")
    p.add_argument("--eta", default="0.01")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrecisionTooLow as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (InvalidParameters, HypothesisViolated, BudgetExhausted, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CacheCorrupt as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ZetaFormsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
