"""Command-line front end.

    revolute disc-spectrum --radius 1 --num 5
    revolute compare --family spherical_cap --param radius=1 --param angle=1.5707963267948966 --num 6
    revolute pipeline --family bumped_disc --seed 7 --K 1 --N 2 --format csv
    revolute verify --suite theorem --seed 3 --count 25

Exit status: 0 on success, 1 on a VIOLATION verdict, a failed suite or a
computation error, 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bessel_ref import disc_spectrum
from .errors import ParameterDomainError, RevoluteError
from .meridian import CurveFamily, CurveParseError, build_family, family_from_seed, load_curve
from .reports import SCHEMA_VERSION, dumps, rows_to_csv, write_text
from .spectrum import compare_to_disc, enumerate_spectrum
from .surgery import TRACE_COLUMNS, HomotopyParams, run_pipeline
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_int(minimum):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {v}")
        return v
    return parse


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"--param expects key=value, got {text!r}")
    key, val = text.split("=", 1)
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--param {key}: {val!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="revolute", description="Dirichlet spectra of surfaces of revolution.")
    p.add_argument("--version", action="version", version=f"revolute {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def output(sp, default="json"):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=default)

    def curve_source(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--curve", metavar="FILE", help="curve JSON file")
        g.add_argument("--family", choices=("disc", "spherical_cap", "cone", "bumped_disc"))
        sp.add_argument("--param", type=_param, action="append", default=[], metavar="K=V")
        sp.add_argument("--seed", type=int, help="random parameters for bumped_disc / spherical_cap")
        sp.add_argument("--radius", type=_positive_float, help="boundary radius R for --family")
        sp.add_argument("--grid", type=_positive_int(16), default=4096, help="element count")

    sp = sub.add_parser("disc-spectrum", help="first eigenvalues of the flat disc")
    sp.add_argument("--radius", type=_positive_float, default=1.0)
    sp.add_argument("--num", type=_positive_int(1), required=True)
    output(sp)

    sp = sub.add_parser("spectrum", help="first eigenvalues of a surface")
    curve_source(sp)
    sp.add_argument("--num", type=_positive_int(1), required=True)
    output(sp)

    sp = sub.add_parser("compare", help="compare a surface with the disc of equal boundary radius")
    curve_source(sp)
    sp.add_argument("--num", type=_positive_int(1), required=True)
    output(sp)

    for name, hlp in (("pipeline", "run the surgery pipeline"), ("trace", "eigenvalue trace along the unrolling")):
        sp = sub.add_parser(name, help=hlp)
        curve_source(sp)
        sp.add_argument("--K", type=_positive_int(0 if name == "pipeline" else 1), required=True)
        sp.add_argument("--N", type=_positive_int(1), required=True)
        sp.add_argument("--s-samples", type=_positive_int(2), default=64)
        output(sp, "json" if name == "pipeline" else "csv")

    sp = sub.add_parser("verify", help="run a check suite")
    sp.add_argument("--suite", choices=tuple(SUITES) + ("all",), required=True)
    sp.add_argument("--grid", type=_positive_int(16))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--count", type=_positive_int(1))
    sp.add_argument("--out")
    return p


def _curve(args):
    if args.curve:
        if args.param or args.seed is not None or args.radius is not None:
            raise UsageError("--curve cannot be combined with --param, --seed or --radius")
        return load_curve(args.curve)
    params = dict(args.param)
    if args.seed is not None:
        if args.family not in ("bumped_disc", "spherical_cap"):
            raise UsageError("--seed applies to bumped_disc and spherical_cap only")
        base = family_from_seed(args.family, args.seed, args.radius or 1.0).params
        params = {**base, **params}
    if args.radius is not None:
        key = "radius" if args.family == "spherical_cap" else "R"
        params.setdefault(key, args.radius)
    return build_family(CurveFamily(args.family, params), args.grid + 1)


def _emit(args, obj, rows=None, columns=None):
    if args.format == "csv":
        text = rows_to_csv(rows, columns)
    else:
        text = dumps(obj)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_disc_spectrum(args) -> int:
    rows = [{"j": j, "lambda": lam, "k": k, "n": n, "multiplicity": 1 if k == 0 else 2}
            for j, (lam, k, n) in enumerate(disc_spectrum(args.radius, args.num), start=1)]
    _emit(args, {"schema_version": SCHEMA_VERSION, "R": args.radius, "J": args.num, "rows": rows},
          rows, ("j", "lambda", "k", "n", "multiplicity"))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    curve = _curve(args)
    table = enumerate_spectrum(curve, args.num)
    rows = table.to_rows()
    _emit(args, {"schema_version": SCHEMA_VERSION, "R": curve.boundary_radius, "J": args.num,
                 "rows": rows}, rows, ("j", "lambda", "k", "n", "multiplicity"))
    return EXIT_OK


def cmd_compare(args) -> int:
    rep = compare_to_disc(_curve(args), args.num)
    _emit(args, rep.to_json(), rep.rows, ("j", "lambda_sigma", "lambda_disc", "margin", "k", "n"))
    return EXIT_FAIL if rep.verdict == "VIOLATION" else EXIT_OK


def cmd_pipeline(args) -> int:
    rep = run_pipeline(_curve(args), args.K, args.N, HomotopyParams(s_samples=args.s_samples))
    rows = rep.trace.to_rows() if rep.trace is not None else []
    _emit(args, rep.to_json(), rows, TRACE_COLUMNS)
    return EXIT_OK


def cmd_trace(args) -> int:
    rep = run_pipeline(_curve(args), args.K, args.N, HomotopyParams(s_samples=args.s_samples))
    rows = rep.trace.to_rows() if rep.trace is not None else []
    obj = {"schema_version": SCHEMA_VERSION, "K": args.K, "N": args.N, "z": rep.z,
           "Lambda": rep.Lambda, "flags": rep.flags, "rows": rows}
    _emit(args, obj, rows, TRACE_COLUMNS)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(n, grid=args.grid, seed=args.seed, count=args.count) for n in names]
    obj = {"schema_version": SCHEMA_VERSION, "passed": all(r.passed for r in results),
           "suites": [r.to_json() for r in results]}
    text = dumps(obj)
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if obj["passed"] else EXIT_FAIL


COMMANDS = {
    "disc-spectrum": cmd_disc_spectrum,
    "spectrum": cmd_spectrum,
    "compare": cmd_compare,
    "pipeline": cmd_pipeline,
    "trace": cmd_trace,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, CurveParseError, ParameterDomainError) as exc:
        print(f"revolute {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RevoluteError, OSError, ValueError) as exc:
        print(f"revolute {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
