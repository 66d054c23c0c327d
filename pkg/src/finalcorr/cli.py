"""Command-line front end: batch sweeps, single-case traces, midpoint scans and format tables.

Exit status is 0 on success, 1 on usage errors and 2 when a verification fails.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import harness, theory
from .correction.config import DIV_DEFAULT, SQRT_DEFAULT, VARIANTS, get_variant
from .formats import FORMATS, BASE_FORMATS, RoundingMode, get_format

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

_ALIASES = {"-b": "sweep", "-i": "case"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finalcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sw = sub.add_parser("sweep", help="exhaustive or sampled verification against the oracle")
    sw.add_argument("--op", choices=[o.value for o in harness.Operation], default="recip")
    sw.add_argument("--format", default="single", help="format name (see `formats`)")
    sw.add_argument("--variant", default=None,
                    help=f"reciprocal variant ({', '.join(VARIANTS)}); ignored for div/sqrt")
    sw.add_argument("--errors", default="-7..0", help="ulp offsets, e.g. -7..0 or -3,-1")
    sw.add_argument("--reference", choices=[r.value for r in harness.Reference], default="rounded",
                    help="what the offsets are applied to: the rounded or the truncated result")
    sw.add_argument("--mode", default="rne", help="rounding mode (rne, rtz, rup, rdn)")
    sw.add_argument("--bound", type=int, default=None,
                    help="use the signed-error reciprocal kernel with this error bound")
    sw.add_argument("--range", dest="input_range", choices=[r.value for r in harness.InputRange],
                    default="binade", help="binade excludes powers of two")
    sw.add_argument("--sample", type=int, default=None, help="random cases instead of exhaustive")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--csv", default=None, help="write recorded failures to this file")

    case = sub.add_parser("case", help="trace one reciprocal correction")
    case.add_argument("-i", dest="_flag", action="store_true", help=argparse.SUPPRESS)
    case.add_argument("x_hex", help="significand of x in hex, e.g. aaaaaa")
    case.add_argument("ulp_err", type=int, help="signed ulp offset from the rounded reciprocal")
    case.add_argument("--variant", default="5x4r")
    case.add_argument("--format", default="single")

    sc = sub.add_parser("scan", help="brute-force midpoint scan, CSV on stdout")
    sc.add_argument("--op", choices=["recip", "div", "sqrt"], required=True)
    sc.add_argument("--n", type=int, required=True, help="input precision")
    sc.add_argument("--m", type=int, default=None, help="output precision (sqrt defaults to n)")
    sc.add_argument("--text", action="store_true", help="print a table instead of CSV")

    sub.add_parser("formats", help="print format constants and ulp tables")
    return parser


def _normalize(argv: list[str]) -> list[str]:
    if argv and argv[0] in _ALIASES:
        argv = [_ALIASES[argv[0]]] + (argv if argv[0] == "-i" else argv[1:])
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        # offsets such as -7..0 would otherwise be read as an option
        if tok == "--errors":
            out.append(f"--errors={next(it, '')}")
        else:
            out.append(tok)
    return out


def _cmd_sweep(args) -> int:
    op = harness.Operation(args.op)
    fmt = get_format(args.format)
    if op is harness.Operation.RECIP:
        variant = get_variant(args.variant or "5x4r")
    else:
        variant = DIV_DEFAULT if op is harness.Operation.DIV else SQRT_DEFAULT
    spec = harness.SweepSpec(
        op, fmt, variant, harness.parse_offsets(args.errors), args.input_range,
        RoundingMode.parse(args.mode), args.reference, args.bound, args.sample, args.seed,
        max(1, args.threads),
    )
    result = harness.batch_sweep(spec)
    print(result.summary())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
    return EXIT_OK if result.ok else EXIT_VERIFY


def _cmd_case(args) -> int:
    text = args.x_hex.lower()
    try:
        x = int(text[2:] if text.startswith("0x") else text, 16)
    except ValueError:
        raise UsageError(f"not a hex significand: {args.x_hex!r}") from None
    fmt = get_format(args.format)
    report = harness.individual_case(x, args.ulp_err, get_variant(args.variant), fmt.precision_n)
    print(report.to_text())
    return EXIT_OK if report.passed or report.skipped else EXIT_VERIFY


def _cmd_scan(args) -> int:
    if args.op == "recip":
        if args.m is None:
            raise UsageError("--m is required for recip")
        report = theory.scan_reciprocal_midpoints(args.n, args.m)
        violated = bool(report.midpoint_hits or report.exact_hits)
    elif args.op == "div":
        if args.m is None:
            raise UsageError("--m is required for div")
        report = theory.scan_division_midpoints(args.n, args.m)
        # midpoints are only excluded once the output keeps n-1 bits
        violated = bool(report.midpoint_hits) and args.m >= args.n - 1
    else:
        report = theory.scan_sqrt_midpoints(args.n, args.m)
        violated = bool(report.midpoint_hits)
    print(report.to_text() if args.text else report.to_csv(), end="\n" if args.text else "")
    return EXIT_VERIFY if violated else EXIT_OK


def _cmd_formats(args) -> int:
    print(f"{'name':<12}{'n':>4}{'exp':>5}{'bias':>6}{'e_min':>7}{'e_max':>7}")
    for fmt in FORMATS.values():
        marker = "" if fmt in BASE_FORMATS else "  (extra)"
        print(f"{fmt.name:<12}{fmt.precision_n:>4}{fmt.exponent_bits:>5}{fmt.bias:>6}"
              f"{fmt.e_min:>7}{fmt.e_max:>7}{marker}")
    print()
    print(f"{'name':<12}{'ulp(2^e_min)':>16}{'ulp(1)':>16}{'ulp(2^e_max)':>16}")
    for fmt in FORMATS.values():
        cells = [f"2^{e - (fmt.precision_n - 1)}" for e in (fmt.e_min, 0, fmt.e_max)]
        print(f"{fmt.name:<12}" + "".join(f"{c:>16}" for c in cells))
    return EXIT_OK


_COMMANDS = {"sweep": _cmd_sweep, "case": _cmd_case, "scan": _cmd_scan, "formats": _cmd_formats}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(_normalize(argv))
    except SystemExit as exc:  # --help or a usage error
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"finalcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
