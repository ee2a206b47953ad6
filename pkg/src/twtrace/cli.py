"""Command line front end: ``twtrace classes|trace|verify``.

Exit codes: 0 success, 2 invalid parameters, 3 precision escalation failed,
1 when a ``verify`` suite reports a failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .arith import is_fundamental, sqrts_mod_4N
from .cmeval import ParseError, PrecisionError, parse_modfunc

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_PRECISION = 3


class UsageError(ValueError):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _fmt(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _emit(payload, as_csv: bool = False, rows=None, header=None):
    if as_csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _check_level_delta(N: int, Delta: int, r: int | None = None):
    if N < 1:
        raise UsageError("--level must be positive")
    if not is_fundamental(Delta):
        raise UsageError(f"{Delta} is not a fundamental discriminant")
    if r is not None and r % (2 * N) not in sqrts_mod_4N(Delta, N):
        raise UsageError(f"r={r} is not a square root of {Delta} modulo {4 * N}")


# ---------------------------------------------------------------------------


def cmd_classes(args) -> int:
    from .qforms import heegner_classes

    N, D, beta = args.level, args.disc, args.beta
    if N < 1:
        raise UsageError("--level must be positive")
    if D >= 0:
        raise UsageError("--disc must be negative")
    if (D - beta * beta) % (4 * N):
        raise UsageError(f"{D} is not congruent to {beta}^2 modulo {4 * N}")
    hs = heegner_classes(N, D, beta)
    reps = hs.positive() if args.positive_only else hs.reps
    if args.csv:
        _emit(None, True, [[Q.a, Q.b, Q.c, stab] for Q, stab in reps], ["a", "b", "c", "stabilizer"])
    else:
        js = hs.to_json()
        js["reps"] = [[Q.a, Q.b, Q.c, stab] for Q, stab in reps]
        sys.stdout.write(json.dumps(js) + "\n")
    return EXIT_OK


def cmd_trace(args) -> int:
    from .traces import assemble_lift, trace_positive

    N, Delta, r = args.level, args.delta, args.r
    _check_level_delta(N, Delta, r)
    try:
        f = parse_modfunc(args.f)
    except ParseError as exc:
        raise UsageError(str(exc)) from exc
    if args.bits is not None and args.bits < 16:
        raise UsageError("--bits must be at least 16")
    meta = {"f": args.f, "level": N, "delta": Delta, "r": r, "normalization": args.normalization}
    if args.all is not None:
        m_max = _frac(args.all)
        if m_max <= 0:
            raise UsageError("--all needs a positive bound")
        lift = assemble_lift(f, N, Delta, r, m_max, args.bits, normalization=args.normalization)
        js = lift.to_json()
        if args.csv:
            rows = [[h, m, c] for h, comp in js["components"].items() for m, c in comp.items()]
            _emit(None, True, rows, ["h", "m", "coefficient"])
        else:
            _emit({**meta, "m_max": _fmt(m_max), "components": js["components"]})
        return EXIT_OK
    if args.h is None or args.m is None:
        raise UsageError("give --h and --m, or --all M")
    m = _frac(args.m)
    if m <= 0 or (4 * N * m).denominator != 1:
        raise UsageError("--m must be positive with 4N m integral")
    if (-4 * N * m - (r * args.h) ** 2) % (4 * N):
        raise UsageError(f"m={_fmt(m)} does not lie in the class of h={args.h}")
    tv = trace_positive(f, N, Delta, r, args.h, m, args.bits, args.normalization)
    if args.csv:
        _emit(None, True, [[args.h % (2 * N), _fmt(m), tv.render()]], ["h", "m", "coefficient"])
    else:
        _emit({**meta, "h": args.h % (2 * N), "m": _fmt(m), "value": tv.render()})
    print(json.dumps({"bits": tv.bits, "error_bound": tv.error_bound}), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites


def _verify_weilrep(args) -> dict:
    from .weilrep import verify_intertwining

    _check_level_delta(args.level, args.delta, args.r)
    bits = args.bits or 128
    res = verify_intertwining(args.level, args.delta, args.r, bits)
    return {"suite": "weilrep", "level": args.level, "delta": args.delta, "r": args.r, "bits": bits,
            "residual": f"{res:.3e}", "tolerance": "1e-20", "pass": res < 1e-20}


def _verify_hecke(args) -> dict:
    from sympy import isprime

    from .arith import divisors, kronecker
    from .traces import admissible_d, dual_trace, hecke_rhs, hecke_rhs_divisor_sum, twisted_trace

    if args.delta <= 0 or not is_fundamental(args.delta):
        raise UsageError("hecke needs a positive fundamental discriminant")
    if not isprime(args.m):
        raise UsageError("--m must be prime")
    if args.dmax < 1:
        raise UsageError("--dmax must be positive")
    cases, ok, divisor_ok, dual_ok = [], True, True, True
    for d in admissible_d(1, args.delta, args.dmax):
        lhs = twisted_trace(f"J{args.m}(z)", 1, args.delta, d, args.bits)
        rhs = hecke_rhs("J(z)", args.delta, args.m, d, args.bits)
        alt = hecke_rhs_divisor_sum("J(z)", args.delta, args.m, d, args.bits)
        ok &= lhs == rhs
        divisor_ok &= lhs == alt
        case = {"d": d, "lhs": _fmt(lhs), "rhs": _fmt(rhs), "equal": lhs == rhs}
        if is_fundamental(-d):
            dual = sum(kronecker(args.delta, args.m // n) * n * dual_trace("J(z)", args.delta, n, d, args.bits)
                       for n in divisors(args.m))
            case["dual_divisor_sum"] = _fmt(dual)
            dual_ok &= lhs == dual
        cases.append(case)
    return {"suite": "hecke", "delta": args.delta, "m": args.m, "dmax": args.dmax,
            "relation": "t(J_p;d) = t(J;p^2 d) + (-d/p) t(J;d) + p t(J;d/p^2)",
            "cases": cases, "divisor_sum_form": divisor_ok, "dual_divisor_sum_form": dual_ok, "pass": ok}


def _verify_jacobi_cross(args) -> dict:
    from .jacobi import check_discriminant_dependence, check_symmetry, twisted_lift_jacobi
    from .traces import principal_parts, trace_positive

    N, Delta, r = args.level, args.delta, args.r
    _check_level_delta(N, Delta, r)
    if args.qmax < 0:
        raise UsageError("--qmax must be non-negative")
    if N != 1 and any(N % p == 0 for p in range(2, N)):
        raise UsageError("jacobi-cross needs N = 1 or N prime")
    f = parse_modfunc(args.f)
    exps = principal_parts(f, N)
    phi = twisted_lift_jacobi(exps, N, Delta, r, args.qmax + 1)
    mism = []
    checked = 0
    for n in range(1, args.qmax + 1):
        for h in range(-N, N + 1):
            D = 4 * N * n - h * h
            if D <= 0:
                continue
            tv = trace_positive(f, N, Delta, r, h, Fraction(abs(Delta) * D, 4 * N), args.bits)
            checked += 1
            if phi.coefficient(n, h) != -tv.value / 2:
                mism.append({"n": n, "r": h, "jacobi": _fmt(phi.coefficient(n, h)), "trace": _fmt(tv.value)})
    return {"suite": "jacobi-cross", "f": args.f, "level": N, "delta": Delta, "r": r, "qmax": args.qmax,
            "checked": checked, "mismatches": mism,
            "discriminant_dependence": check_discriminant_dependence(phi),
            "symmetry": check_symmetry(phi),
            "pass": not mism and check_discriminant_dependence(phi) and check_symmetry(phi)}


SUITES = {"weilrep": _verify_weilrep, "hecke": _verify_hecke, "jacobi-cross": _verify_jacobi_cross}


def cmd_verify(args) -> int:
    report = SUITES[args.suite](args)
    if args.csv:
        rows = [[k, v] for k, v in report.items() if not isinstance(v, (list, dict))]
        _emit(None, True, rows, ["key", "value"])
    else:
        _emit(report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twtrace", description="Twisted traces of CM values on Gamma_0(N).")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classes", help="Gamma_0(N)-classes of Heegner forms")
    c.add_argument("--level", type=int, required=True)
    c.add_argument("--disc", type=int, required=True)
    c.add_argument("--beta", type=int, required=True)
    c.add_argument("--positive-only", action="store_true")
    c.add_argument("--csv", action="store_true")
    c.set_defaults(func=cmd_classes)

    t = sub.add_parser("trace", help="twisted traces t_{Delta,r}(f; h, m)")
    t.add_argument("f", help="modular function, e.g. 'J(11z)' or 'J(z)+J(11z)'")
    t.add_argument("--level", type=int, required=True)
    t.add_argument("--delta", type=int, required=True)
    t.add_argument("--r", type=int, required=True)
    t.add_argument("--h", type=int)
    t.add_argument("--m", help="norm Q(lambda), e.g. 40/44")
    t.add_argument("--all", metavar="M", help="all components with |exponent| <= M")
    t.add_argument("--bits", type=int, default=None)
    t.add_argument("--normalization", choices=["sqrtDelta", "raw"], default="sqrtDelta")
    t.add_argument("--csv", action="store_true")
    t.set_defaults(func=cmd_trace)

    v = sub.add_parser("verify", help="run a consistency suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--level", type=int, default=1)
    v.add_argument("--delta", type=int, default=1)
    v.add_argument("--r", type=int, default=1)
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--dmax", type=int, default=20)
    v.add_argument("--qmax", type=int, default=1)
    v.add_argument("--f", default="J(11z)")
    v.add_argument("--bits", type=int, default=None)
    v.add_argument("--csv", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
