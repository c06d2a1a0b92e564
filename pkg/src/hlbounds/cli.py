"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 certification failure,
4 I/O error. Set ``HLBOUNDS_LOG`` (e.g. ``DEBUG``) for log output on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

from . import certify
from .certify import ReportOptions, build_report, fmt, verify_theorem_pop
from .closed_forms import HLParams, hl_exponent
from .errors import CapExceededError, CertificationError, DomainError
from .forms import dumps, loads, make_T2, make_Tm
from .norm_engine import (
    NormEstimate,
    alternating_ascent,
    norm_exact_linf,
    norm_upper_recursion,
    norm_upper_T2p_certified,
    plot_series,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CERT = 3
EXIT_IO = 4

logger = logging.getLogger("hlbounds")


class _Usage(Exception):
    pass


def parse_p(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p: {text!r}") from None


_P_TERM = re.compile(r"^(\d+(?:\.\d*)?)?\*?(m(?:\^2|2|²)?)?$")


def _p_of_m(term: str, m: int) -> float:
    term = term.strip().lower()
    if term in ("inf", "infinity"):
        return math.inf
    match = _P_TERM.match(term)
    if not match or not any(match.groups()):
        raise _Usage(f"cannot read p term {term!r}")
    coef, power = match.groups()
    value = float(coef) if coef else 1.0
    if power:
        value *= m * m if power != "m" else m
    return value


def parse_grid(spec: str) -> list:
    """Expand ``m=2..10,p=2m,4m`` into sorted ``(m, p)`` pairs; ``p`` terms are per-m."""
    ms, p_terms = [], []
    current = None
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" in token:
            current, token = (s.strip() for s in token.split("=", 1))
        if current == "m":
            if ".." in token:
                lo, hi = token.split("..")
                ms.extend(range(int(lo), int(hi) + 1))
            else:
                ms.append(int(token))
        elif current == "p":
            p_terms.append(token)
        else:
            raise _Usage(f"grid tokens must start with m= or p=, got {token!r}")
    if not ms or not p_terms:
        raise _Usage("grid needs both m= and p= entries")
    pairs = set()
    for m in ms:
        for term in p_terms:
            p = _p_of_m(term, m)
            if p < 2 * m:
                logger.warning("skipping m=%d p=%g (p < 2m)", m, p)
                continue
            pairs.add((m, p))
    return sorted(pairs)


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_exponent(args):
    exp = hl_exponent(HLParams(args.m, args.p))
    print(f"rho={fmt(exp.rho)}")
    print(f"dual_rho={fmt(exp.dual_rho)}")


def cmd_bounds(args):
    if args.grid:
        pairs = parse_grid(args.grid)
    elif args.m is not None and args.p is not None:
        HLParams(args.m, args.p)
        pairs = [(args.m, args.p)]
    else:
        raise _Usage("bounds needs --m and --p, or --grid")
    options = ReportOptions(gap=args.gap)
    # executor.map keeps (m, p) order regardless of completion order
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(lambda mp: build_report(HLParams(*mp), options), pairs))
    fmt_name = args.format or ("text" if len(reports) == 1 and not args.grid else "table")
    if fmt_name == "json":
        text = certify.reports_to_json(reports)
    elif fmt_name == "csv":
        text = certify.reports_to_csv(reports)
    elif fmt_name == "text":
        text = "\n".join(certify.report_to_text(r) for r in reports)
    else:
        text = certify.reports_to_table(reports)
    _write(text, args.out)


def load_form(spec: str):
    if spec == "t2":
        return make_T2()
    if spec.startswith("tm:"):
        return make_Tm(int(spec[3:]))
    if spec.startswith("file:"):
        with open(spec[5:]) as fh:
            return loads(fh.read())
    raise _Usage(f"unknown form {spec!r}; use t2, tm:M or file:PATH")


def _print_estimate(est: NormEstimate):
    print(f"lower={fmt(est.lower)} ({est.method_lower})")
    print(f"upper={fmt(est.upper)} ({est.method_upper})")
    print(f"certified={fmt(est.certified_upper)} conditional={fmt(est.conditional)}")


def cmd_norm(args):
    form = load_form(args.form)
    if math.isinf(args.p):
        try:
            print(f"{fmt(norm_exact_linf(form))} (exact)")
            return
        except CapExceededError:
            logger.warning("extreme-point enumeration too large; falling back to ascent")
    tm_arity = form.arity if args.form.startswith("tm:") else None
    if args.certify and not math.isinf(args.p) and (args.form == "t2" or tm_arity):
        est = norm_upper_T2p_certified(args.p, args.gap)
        if tm_arity:
            est = norm_upper_recursion(tm_arity, est)
        ascent = alternating_ascent(form, args.p, restarts=args.restarts, seed=args.seed).value
        if ascent > est.lower:
            est = NormEstimate(
                ascent, est.upper, "alternating-ascent", est.method_upper, est.certified_upper, est.conditional
            )
        _print_estimate(est)
        return
    if args.certify:
        raise _Usage("--certify is available for t2 and tm:M forms at finite p")
    value = alternating_ascent(form, args.p, restarts=args.restarts, seed=args.seed).value
    print(f"lower={fmt(value)} (alternating-ascent)")


def cmd_plotdata(args):
    _write(plot_series(args.p, args.samples).to_csv(), args.out)


def cmd_verify(args):
    failed = []
    for m in range(2, args.max_m + 1):
        try:
            report = verify_theorem_pop(m, args.gap, max_halvings=args.max_halvings)
            print(f"m={m} p={2 * m} quotient={fmt(report.quotient.value)} pop=true")
        except CertificationError as exc:
            print(f"m={m} p={2 * m} certification failed: {exc}")
            failed.append(m)
    if failed:
        print(f"pop not certified for m in {failed}")
        return EXIT_CERT
    print(f"pop holds for m=2..{args.max_m}")


def cmd_form_dump(args):
    _write(dumps(load_form(args.form)), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlbounds", description="Lower bounds for the real Hardy-Littlewood constants."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponent", help="Hardy-Littlewood exponent rho and its conjugate")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=parse_p, required=True)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("bounds", help="bound report for one (m, p) or a grid")
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=parse_p)
    p.add_argument("--grid", help='e.g. "m=2..10,p=2m,4m"')
    p.add_argument("--format", choices=["text", "table", "json", "csv"])
    p.add_argument("--gap", type=float, default=1e-4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("norm", help="operator norm of a form")
    p.add_argument("--form", required=True, help="t2, tm:M or file:PATH")
    p.add_argument("--p", type=parse_p, required=True)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--gap", type=float, default=1e-4)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("plotdata", help="samples of f and g as CSV")
    p.add_argument("--p", type=parse_p, default=4.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("verify", help="certify C_{m,2m} > 1 for m = 2..M")
    p.add_argument("--max-m", type=int, default=10)
    p.add_argument("--gap", type=float, default=1e-4)
    p.add_argument("--max-halvings", type=int, default=16)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("form", help="form utilities")
    form_sub = p.add_subparsers(dest="form_command", required=True)
    d = form_sub.add_parser("dump", help="canonical text dump of a form")
    d.add_argument("--form", required=True)
    d.add_argument("--out")
    d.set_defaults(func=cmd_form_dump)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("HLBOUNDS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or EXIT_OK
    except (DomainError, CapExceededError, _Usage, ValueError) as exc:
        print(f"hlbounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as exc:
        print(f"hlbounds: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    except OSError as exc:
        print(f"hlbounds: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
