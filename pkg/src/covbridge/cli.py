"""Command-line interface: evaluate models and spectral densities, write CSV.

Every command writes a ``#`` comment header (version, time, parameters,
routes) followed by a CSV body. Exit status: 0 success, 2 invalid input,
3 numerical failure, 4 I/O error.
"""

import argparse
import csv
import io
import itertools
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .convergence import (
    EvalGrid,
    abs_error_curve,
    covariance_limit_scan,
    gamma_ratio_probe,
    mae,
    mae_table,
    spectral_limit_scan,
)
from .covmodels import CauchyParams, MaternParams, cauchy_eval, matern_eval, reparam_cauchy
from .errors import CovBridgeError, NumericalError, ParameterError
from .spectral import cauchy_sdf, matern_sdf

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class _NumericalFailure(Exception):
    def __init__(self, where, cause):
        super().__init__(f"{where}: {cause}")
        self.cause = cause


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def parse_real(text):
    """Float literal or a quotient ``a/b`` of two float literals (e.g. ``0.2/3``)."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            value = float(num) / float(den)
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from exc
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def parse_list(text):
    return [parse_real(part) for part in text.split(",") if part.strip()]


def parse_grid(text):
    """``lo:hi:count`` -> (lo, hi, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:count, got {text!r}")
    lo, hi = parse_real(parts[0]), parse_real(parts[1])
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid count must be an integer, got {parts[2]!r}") from exc
    return lo, hi, count


def _fmt(v):
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _closed_points(grid, spacing):
    lo, hi, count = grid
    if count < 2 or not lo < hi:
        raise ParameterError(f"grid needs count >= 2 and lo < hi, got {lo!r}:{hi!r}:{count}")
    if spacing == "log":
        if lo <= 0.0:
            raise ParameterError("log spacing needs lo > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _model(args):
    if args.model == "matern":
        if args.nu is None or args.alpha is None:
            raise ParameterError("matern needs --nu and --alpha")
        return MaternParams(args.nu, args.alpha, args.sigma2)
    if args.delta is None or args.lam is None:
        raise ParameterError("cauchy needs --delta and --lambda")
    if (args.gamma is None) == (args.gamma_from_alpha is None):
        raise ParameterError("cauchy needs exactly one of --gamma, --gamma-from-alpha")
    if args.gamma_from_alpha is not None:
        return reparam_cauchy(args.delta, args.lam, args.gamma_from_alpha, args.sigma2)
    return CauchyParams(args.delta, args.lam, args.gamma, args.sigma2)


# each command returns (params, routes, columns, rows)


def cmd_eval(args):
    p = _model(args)
    r = _closed_points(args.grid, args.spacing)
    values = matern_eval(p, r) if isinstance(p, MaternParams) else cauchy_eval(p, r)
    return {"model": p}, [], ["r", "value"], list(zip(r, values))


def cmd_sdf(args):
    p = _model(args)
    z = _closed_points(args.grid, args.spacing)
    rows, routes = [], []
    for zi in map(float, z):
        if isinstance(p, MaternParams):
            res = matern_sdf(p, args.d, zi)
        else:
            try:
                res = cauchy_sdf(p, args.d, zi, tol=args.tol)
            except NumericalError as exc:
                raise _NumericalFailure(f"{p} d={args.d} z={zi!r}", exc) from exc
        rows.append((zi, res.value, res.route.value, res.abs_err_estimate))
        if res.route.value not in routes:
            routes.append(res.route.value)
    return {"model": p, "d": args.d, "tol": args.tol}, routes, ["z", "value", "route", "abs_err_estimate"], rows


def cmd_mae_table(args):
    grid = EvalGrid.span(*args.grid)
    table = mae_table(args.lambdas, args.alphas, grid)
    columns = ["alpha"] + [f"lambda={_fmt(lam)}" for lam in table.lambdas]
    rows = [(a, *row) for a, row in zip(table.alphas, table.cells)]
    params = {"lambdas": table.lambdas, "alphas": table.alphas, "grid": grid.description}
    for note in table.notes:
        params.setdefault("warning", []).append(note)
    return params, [], columns, rows


def cmd_error_curve(args):
    grid = EvalGrid.span(*args.grid)
    r = grid.points
    multi = len(args.lambdas) > 1
    columns = (["lambda"] if multi else []) + ["r", "cauchy", "matern", "abs_error"]
    rows = []
    maxima = []
    matern = matern_eval(MaternParams(0.5, args.alpha), r)
    for lam in args.lambdas:
        cauchy = cauchy_eval(reparam_cauchy(1.0, lam, args.alpha), r)
        err = abs_error_curve(lam, args.alpha, grid)
        maxima.append(mae(lam, args.alpha, grid))
        lead = (lam,) if multi else ()
        rows.extend((*lead, *row) for row in zip(r, cauchy, matern, err))
    params = {
        "alpha": args.alpha,
        "lambdas": args.lambdas,
        "grid": grid.description,
        "maxima": maxima,
    }
    return params, [], columns, rows


def cmd_limit_scan(args):
    if args.kind == "covariance":
        grid = EvalGrid.span(*args.grid)
        values = covariance_limit_scan(args.alpha, args.lambdas, grid)
        params = {"kind": "covariance", "alpha": args.alpha, "lambdas": args.lambdas, "grid": grid.description}
        return params, [], ["lambda", "mae"], list(zip(args.lambdas, values))

    lo, hi, count = args.grid
    pts = _closed_points(args.grid, args.spacing)
    z_grid = EvalGrid(pts, f"{args.spacing} on [{lo!r}, {hi!r}], {count} points")
    multi = len(args.deltas) > 1
    scans = {}
    for delta in args.deltas:
        try:
            scans[delta] = spectral_limit_scan(args.alpha, args.d, z_grid, args.lambdas, delta, tol=args.tol)
        except NumericalError as exc:
            raise _NumericalFailure(f"delta={delta!r} alpha={args.alpha!r} d={args.d}", exc) from exc
    rows = []
    # lambda-inner: for each delta sweep lambda (delta -> 1 first); delta-inner is the reverse
    if args.order == "lambda-inner":
        outer = itertools.product(args.deltas, enumerate(args.lambdas))
        keys = [(delta, i, lam) for delta, (i, lam) in outer]
    else:
        outer = itertools.product(enumerate(args.lambdas), args.deltas)
        keys = [(delta, i, lam) for (i, lam), delta in outer]
    for delta, i, lam in keys:
        for j, z in enumerate(z_grid.points):
            lead = (delta,) if multi else ()
            rows.append((*lead, lam, z, scans[delta][i, j]))
    columns = (["delta"] if multi else []) + ["lambda", "z", "error"]
    params = {
        "kind": "spectral",
        "alpha": args.alpha,
        "d": args.d,
        "deltas": args.deltas,
        "lambdas": args.lambdas,
        "order": args.order,
        "z_grid": z_grid.description,
        "tol": args.tol,
    }
    return params, [], columns, rows


def cmd_gamma_ratio(args):
    rows = [(lam, c, gamma_ratio_probe(lam, c)) for c in args.cs for lam in args.lambdas]
    return {"lambdas": args.lambdas, "cs": args.cs}, [], ["lambda", "c", "ratio"], rows


def _add_model_args(p):
    p.add_argument("--model", choices=["matern", "cauchy"], required=True)
    p.add_argument("--nu", type=parse_real)
    p.add_argument("--alpha", type=parse_real)
    p.add_argument("--delta", type=parse_real)
    p.add_argument("--lambda", dest="lam", type=parse_real)
    p.add_argument("--gamma", type=parse_real)
    p.add_argument("--gamma-from-alpha", type=parse_real, metavar="ALPHA",
                   help="set gamma = ALPHA * lambda")
    p.add_argument("--sigma2", type=parse_real, default=1.0)


def _add_common(p):
    p.add_argument("--output", "-o", default="-", help="output path (default: stdout)")
    p.add_argument("--tol", type=parse_real, default=1e-10)


def build_parser():
    parser = _ArgumentParser(prog="covbridge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("eval", help="covariance on a distance grid")
    _add_model_args(p)
    p.add_argument("--grid", type=parse_grid, required=True, help="lo:hi:count, endpoints included")
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sdf", help="spectral density on a frequency grid")
    _add_model_args(p)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--grid", type=parse_grid, required=True, help="lo:hi:count, endpoints included")
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    _add_common(p)
    p.set_defaults(func=cmd_sdf)

    p = sub.add_parser("mae-table", help="maximum absolute error table (alpha x lambda)")
    p.add_argument("--alphas", type=parse_list, required=True)
    p.add_argument("--lambdas", type=parse_list, required=True)
    p.add_argument("--grid", type=parse_grid, default=(0.0, 1.0, 10000),
                   help="lo:hi:count, count points on (lo, hi] (default 0:1:10000)")
    _add_common(p)
    p.set_defaults(func=cmd_mae_table)

    p = sub.add_parser("error-curve", help="absolute error between the two covariances")
    p.add_argument("--alpha", type=parse_real, required=True)
    p.add_argument("--lambdas", type=parse_list, required=True)
    p.add_argument("--grid", type=parse_grid, default=(0.0, 1.0, 10000),
                   help="lo:hi:count, count points on (lo, hi] (default 0:1:10000)")
    _add_common(p)
    p.set_defaults(func=cmd_error_curve)

    p = sub.add_parser("limit-scan", help="distance to the Matern(1/2) limit along a lambda ladder")
    p.add_argument("--kind", choices=["spectral", "covariance"], default="spectral")
    p.add_argument("--alpha", type=parse_real, required=True)
    p.add_argument("--lambdas", type=parse_list, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--deltas", type=parse_list, default=[1.0])
    p.add_argument("--order", choices=["lambda-inner", "delta-inner"], default="lambda-inner",
                   help="row order when several deltas are scanned")
    p.add_argument("--grid", type=parse_grid, required=True,
                   help="spectral: z grid lo:hi:count, endpoints included; covariance: r span (lo, hi]")
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    _add_common(p)
    p.set_defaults(func=cmd_limit_scan)

    p = sub.add_parser("gamma-ratio", help="Gamma(lambda - c) lambda^c / Gamma(lambda)")
    p.add_argument("--lambdas", type=parse_list, required=True)
    p.add_argument("--cs", type=parse_list, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_gamma_ratio)
    return parser


def _header(args, params, routes):
    lines = [
        f"covbridge {__version__}",
        f"created: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        f"command: {args.command}",
    ]
    for key, value in params.items():
        if isinstance(value, (list, tuple)):
            if key == "warning":
                lines.extend(f"warning: {v}" for v in value)
                continue
            value = ",".join(_fmt(v) for v in value)
        elif isinstance(value, float):
            value = _fmt(value)
        lines.append(f"{key}: {value}")
    lines.append(f"routes: {','.join(routes) if routes else 'n/a'}")
    return "".join(f"# {line}\n" for line in lines)


def render(args, params, routes, columns, rows):
    buf = io.StringIO()
    buf.write(_header(args, params, routes))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if not args.tol > 0.0:
            raise ParameterError("--tol must be > 0")
        params, routes, columns, rows = args.func(args)
        text = render(args, params, routes, columns, rows)
    except _NumericalFailure as exc:
        print(f"covbridge: numerical failure at {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as exc:
        print(f"covbridge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CovBridgeError, ValueError) as exc:
        print(f"covbridge: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if args.output == "-":
            sys.stdout.write(text)
        else:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"covbridge: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def parse_csv(text):
    """Split an emitted CSV into (header lines, column names, rows of strings)."""
    lines = text.splitlines()
    header = [line[2:] for line in lines if line.startswith("# ")]
    reader = csv.reader(line for line in lines if not line.startswith("#"))
    columns = next(reader)
    return header, columns, list(reader)
