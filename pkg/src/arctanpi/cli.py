"""Command-line interface: ``arctanpi {derive,arctan,pi,digits,bench,specs}``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .bignum import FixedPoint, PrecisionContext, parse_decimal, to_decimal_string
from .convergence_bench import emit_report, registered_series, run_bench
from .derivative_engine import closed_form_derivative, oracle_eval
from .digit_extract import DigitRequest, extract_digits
from .expansions import (
    DomainError,
    euler_arctan,
    maclaurin_arctan,
    sine_expansion_arctan,
)
from .pi_formulas import (
    SeriesSpec,
    builtin_specs,
    dump_spec,
    get_spec,
    load_spec,
    partial_sum,
    sum_to_tolerance,
)

PRECISION_ENV = "ARCTANPI_PRECISION"
DEFAULT_PRECISION = 256
MIN_PRECISION = 64

METHODS = {
    "maclaurin": maclaurin_arctan,
    "euler": euler_arctan,
    "sine": sine_expansion_arctan,
    "auto": euler_arctan,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    precision_bits: int = DEFAULT_PRECISION
    output_format: str = "text"
    spec_file: str | None = None

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise UsageError(f"precision must be at least {MIN_PRECISION} bits")

    def context(self, digits: int | None = None) -> PrecisionContext:
        bits = self.precision_bits
        if digits is not None:
            bits = max(bits, math.ceil(digits * math.log2(10)) + 32)
        return PrecisionContext(bits)


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{what} must be an integer, got {text!r}") from None


def _parse_x(text: str, ctx: PrecisionContext) -> FixedPoint:
    try:
        return parse_decimal(text, ctx)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolve_spec(name: str, cfg: CliConfig) -> SeriesSpec:
    if cfg.spec_file:
        spec = load_spec(cfg.spec_file)
        if name in (spec.name, "-"):
            return spec
    try:
        return get_spec(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _parse_n_list(text: str) -> list[int]:
    """``10:100:10`` (inclusive range) or ``5,10,20``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step <= 0:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p]
    except (ValueError, IndexError):
        raise UsageError(f"cannot parse term list {text!r}") from None


def cmd_derive(args, cfg: CliConfig, out) -> None:
    n = _parse_int(args.n, "derivative order")
    if n < 1:
        raise UsageError("derivative order must be a positive integer")
    ctx = cfg.context(args.digits)
    x = _parse_x(args.x, ctx)
    value = closed_form_derivative(n, x, ctx)
    if cfg.output_format == "json":
        doc = {"n": n, "x": args.x, "closed_form": to_decimal_string(value, args.digits)}
        if args.check:
            ref = oracle_eval(n, x, ctx)
            doc["oracle"] = to_decimal_string(ref, args.digits)
            doc["abs_diff"] = to_decimal_string(abs(value - ref), args.digits)
        print(json.dumps(doc), file=out)
        return
    print(to_decimal_string(value, args.digits), file=out)
    if args.check:
        ref = oracle_eval(n, x, ctx)
        print(f"oracle {to_decimal_string(ref, args.digits)}", file=out)
        print(f"abs_diff {to_decimal_string(abs(value - ref), args.digits)}", file=out)


def cmd_arctan(args, cfg: CliConfig, out) -> None:
    ctx = cfg.context(args.digits)
    x = _parse_x(args.x, ctx)
    tol = parse_decimal(f"1e-{args.digits}", ctx)
    fn = METHODS[args.method]
    try:
        ev = fn(x, tol=tol, max_terms=args.max_terms)
    except DomainError as exc:
        raise UsageError(f"{args.method}: {exc}") from None
    value = to_decimal_string(ev.value, args.digits)
    bound = to_decimal_string(ev.tail_bound, max(args.digits, 1) + 10)
    if cfg.output_format == "json":
        print(json.dumps({
            "method": args.method, "x": args.x, "value": value,
            "terms_used": ev.terms_used, "tail_bound": bound, "converged": ev.converged,
        }), file=out)
        return
    print(value, file=out)
    print(f"terms_used {ev.terms_used}", file=out)
    print(f"tail_bound {bound}", file=out)
    if not ev.converged:
        print("warning: max_terms reached before the requested tolerance", file=sys.stderr)


def cmd_pi(args, cfg: CliConfig, out) -> None:
    spec = _resolve_spec(args.spec, cfg)
    if args.terms is not None:
        if args.terms < 0:
            raise UsageError("--terms must be non-negative")
        digits = args.digits or 30
        ctx = cfg.context(digits)
        ev = partial_sum(spec, args.terms, ctx)
        text = to_decimal_string(ev.value, digits)
        if args.digits is None:
            text = text.rstrip("0").rstrip(".")
    else:
        digits = args.digits or 30
        ctx = cfg.context(digits)
        ev = sum_to_tolerance(spec, Fraction(1, 10**digits), ctx)
        text = to_decimal_string(ev.value, digits)
    if cfg.output_format == "json":
        print(json.dumps({
            "spec": spec.name, "target": spec.target.value, "value": text,
            "blocks": ev.terms_used,
            "tail_bound": to_decimal_string(ev.tail_bound, digits + 10),
        }), file=out)
        return
    print(text, file=out)


def cmd_digits(args, cfg: CliConfig, out) -> None:
    spec = _resolve_spec(args.spec, cfg)
    position = _parse_int(args.position, "position")
    count = _parse_int(args.count, "count")
    try:
        req = DigitRequest(spec, position, count)
        digits = extract_digits(req)
    except (ValueError, OverflowError, ArithmeticError) as exc:
        raise UsageError(str(exc)) from None
    line = f"{spec.target.value} base {req.base} digits [{position}, {position + count}): {digits}"
    if cfg.output_format == "json":
        print(json.dumps({
            "constant": spec.target.value, "base": req.base,
            "position": position, "count": count, "digits": digits,
        }), file=out)
        return
    print(line, file=out)


def cmd_bench(args, cfg: CliConfig, out) -> None:
    names = list(args.series)
    if names == ["all"]:
        names = registered_series()
    extra = None
    if cfg.spec_file:
        extra = load_spec(cfg.spec_file)
    n_list = _parse_n_list(args.n)
    x = Fraction(args.x) if args.x is not None else None
    ctx = cfg.context()
    reports = []
    for name in names:
        try:
            if extra is not None and name == extra.name:
                reports.append(run_bench(name, n_list, ctx, spec=extra))
            else:
                reports.append(run_bench(name, n_list, ctx, x=x))
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if cfg.output_format in ("csv", "json"):
        text = emit_report(reports, cfg.output_format)
        if not text.endswith("\n"):
            text += "\n"
    else:
        lines = [f"{'series':<18} {'points':>6} {'fitted_rate':>12} {'theoretical':>12}"]
        for r in reports:
            fit = "n/a" if r.fitted_rate is None else f"{r.fitted_rate:.4f}"
            th = "n/a" if r.theoretical_rate is None else f"{r.theoretical_rate:.4f}"
            lines.append(f"{r.series_name:<18} {len(r.samples):>6} {fit:>12} {th:>12}")
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_specs(args, cfg: CliConfig, out) -> None:
    specs = builtin_specs()
    if cfg.spec_file:
        specs.append(load_spec(cfg.spec_file))
    if cfg.output_format == "json":
        print(json.dumps([s.to_json() for s in specs], indent=2), file=out)
        return
    if args.name:
        print(dump_spec(_resolve_spec(args.name, cfg)), file=out)
        return
    for s in specs:
        base = s.integer_base()
        kind = f"base {base}" if base else f"ratio {s.ratio_num}/{s.ratio_den}"
        print(f"{s.name:<14} {s.target.value:<9} {kind}", file=out)


def _common_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # accepted before or after the subcommand; the subcommand copy must not clobber the global one
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--precision", type=int, default=default,
                        help=f"working precision in bits (default {DEFAULT_PRECISION}, "
                             f"or ${PRECISION_ENV})")
    parser.add_argument("--format", dest="output_format", choices=("text", "csv", "json"),
                        default=argparse.SUPPRESS if suppress else "text")
    parser.add_argument("--spec-file", default=default, help="JSON series spec to load")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arctanpi",
        description="arctan derivatives, arctan series and BBP-type series for pi and pi*sqrt(3)",
    )
    _common_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _common_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", parents=[common], help="nth derivative of arctan at x")
    p.add_argument("n")
    p.add_argument("x")
    p.add_argument("--check", action="store_true", help="also print the polynomial oracle")
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("arctan", parents=[common], help="arctan(x) by one of the series")
    p.add_argument("x")
    p.add_argument("--method", choices=sorted(METHODS), default="auto")
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--max-terms", type=int, default=100_000)
    p.set_defaults(func=cmd_arctan)

    p = sub.add_parser("pi", parents=[common], help="evaluate a pi / pi*sqrt(3) series")
    p.add_argument("spec")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--terms", type=int, default=None, help="last block index N")
    g.add_argument("--digits", type=int, default=None)
    p.set_defaults(func=cmd_pi)

    p = sub.add_parser("digits", parents=[common], help="isolated base-b digits of a BBP-type constant")
    p.add_argument("spec")
    p.add_argument("position")
    p.add_argument("count")
    p.set_defaults(func=cmd_digits)

    p = sub.add_parser("bench", parents=[common], help="convergence report")
    p.add_argument("series", nargs="+")
    p.add_argument("--n", default="10:100:10", help="term counts, start:stop:step or a,b,c")
    p.add_argument("--x", default=None, help="argument for arctan series")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("specs", parents=[common], help="list built-in series or dump one as JSON")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_specs)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        precision = args.precision if args.precision is not None else _default_precision()
        cfg = CliConfig(precision, args.output_format, args.spec_file)
        if cfg.output_format == "csv" and args.command != "bench":
            raise UsageError("--format csv applies to bench only")
        args.func(args, cfg, out)
    except UsageError as exc:
        print(f"arctanpi: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"arctanpi: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
