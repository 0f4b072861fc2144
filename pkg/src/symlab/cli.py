"""Command-line surface binding the library into reproducible runs.

Subcommands: sieve, symmetry, chi-verify, decompose, lemma-scan, scan, fit.
Exit status 0 on success, 1 on validation errors, 2 when a verification
subcommand finds a violation above tolerance.  All numeric output goes to
the configured path or stdout as CSV/JSON; diagnostics go to stderr.  Every
parameter is validated before any computation starts, and outputs are fully
built in memory before being written, so invalid runs leave no partial
files behind.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import scaling, spectral, tables
from .chi import chi_direct_at, chi_fourier_eval
from .spectral import BudgetExceededError
from .symmetry import WindowParams, symmetry_integral, symmetry_series

__all__ = ["run_cli", "main", "read_grid_file"]

DEFAULT_CHI_TOLERANCE = 1e-9   # per-q scale factor for chi-verify
DEFAULT_RESIDUAL_TOLERANCE = 1e-8
CHI_VERIFY_HEADER = "q,h,x,chi_direct,chi_fourier,abs_err"


class CliError(Exception):
    """Validation failure; maps to exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _worker_cap() -> int:
    raw = os.environ.get("SYMLAB_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"SYMLAB_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise CliError(f"SYMLAB_THREADS must be >= 1, got {n}")
    return n


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# grid files

def read_grid_file(path) -> list:
    """Parse a ``function,N,h,Q`` grid CSV into cells.

    Blank lines and '#' comments are ignored; an optional header row is
    accepted.  Any malformed or constraint-violating row fails the whole
    file, with every offending line reported.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read grid file {path}: {exc}") from None
    cells = []
    problems = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "function,N,h,Q":
            continue
        parts = line.split(",")
        if len(parts) != 4:
            problems.append(f"line {lineno}: expected 'function,N,h,Q', got {line!r}")
            continue
        name = parts[0].strip()
        try:
            n_val, h_val, q_val = (int(p) for p in parts[1:])
        except ValueError:
            problems.append(f"line {lineno}: N, h, Q must be integers in {line!r}")
            continue
        if not (tables.is_standard_name(name) or name.startswith("g=")):
            problems.append(f"line {lineno}: unknown function {name!r}")
            continue
        if name.startswith("g="):
            try:
                tables.GeneratorSpec.parse(name[2:])
            except ValueError as exc:
                problems.append(f"line {lineno}: {exc}")
                continue
        if h_val < 1:
            problems.append(f"line {lineno}: need h >= 1, got h={h_val}")
        elif h_val >= n_val:
            problems.append(f"line {lineno}: need h < N, got h={h_val}, N={n_val}")
        elif not 1 <= q_val <= n_val:
            problems.append(f"line {lineno}: need 1 <= Q <= N, got Q={q_val}, N={n_val}")
        else:
            cells.append(scaling.GridCell(function=name, N=n_val, h=h_val, Q=q_val))
    if problems:
        raise CliError("invalid grid file:\n  " + "\n  ".join(problems))
    if not cells:
        raise CliError("empty grid")
    return cells


# ---------------------------------------------------------------------------
# subcommand handlers

def _table_for(args, M: int):
    """(table, generator-or-None) from --name / --generator arguments."""
    if args.name and args.generator:
        raise CliError("give either --name or --generator, not both")
    if args.name:
        if not tables.is_standard_name(args.name):
            raise CliError(f"unknown table name {args.name!r}")
        return tables.sieve_standard(args.name, M), None
    if args.generator:
        spec = tables.GeneratorSpec.parse(args.generator)
        q = args.Q if args.Q is not None else M
        if q < 1:
            raise CliError(f"need Q >= 1, got {q}")
        g = tables.build_generator(spec, q)
        return tables.convolve_with_ones(g, M), g
    raise CliError("one of --name or --generator is required")


def _cmd_sieve(args) -> int:
    if args.M < 1:
        raise CliError(f"need M >= 1, got {args.M}")
    table, g = _table_for(args, args.M)
    out = io.StringIO()
    if args.emit_generator:
        if g is None:
            raise CliError("--emit-generator needs --generator")
        g.write_csv(out)
    else:
        table.write_csv(out)
    _emit(out.getvalue(), args.output)
    return 0


def _cmd_symmetry(args) -> int:
    if args.generator and args.Q is None:
        args.Q = args.N  # default generator support: the largest allowed
    params = _window_params(args)
    table, g = _table_for(args, params.table_length)
    integral = symmetry_integral(table, params)
    payload = {
        "function": table.name if g is None else f"g={g.name}*1",
        "N": params.N,
        "h": params.h,
        "Q": params.Q,
        "integral": integral,
        "ratio": integral / (params.N * params.h),
        "max_g": g.max_abs if g is not None else table.max_abs,
        "theorem_regime": params.theorem_regime,
        "level": params.level,
    }
    if args.series:
        out = io.StringIO()
        symmetry_series(table, params).write_csv(out)
        with open(args.series, "w", encoding="utf-8", newline="") as fh:
            fh.write(out.getvalue())
    _emit(_json_text(payload), args.output)
    return 0


def _window_params(args) -> WindowParams:
    q = args.Q if args.Q is not None else args.N
    try:
        return WindowParams(N=args.N, h=args.h, Q=q)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _cmd_chi_verify(args) -> int:
    if args.qmax < 1 or args.h < 1 or args.N < 1 or args.samples < 1:
        raise CliError("qmax, h, N and samples must all be >= 1")
    if args.N <= args.h:
        raise CliError(f"need N > h so sampled windows stay valid, got N={args.N}, h={args.h}")
    rng = np.random.default_rng(args.seed)
    lines = [CHI_VERIFY_HEADER]
    failures = 0
    for q in range(1, args.qmax + 1):
        xs = rng.integers(args.N + 1, 2 * args.N + 1, size=args.samples)
        direct = chi_direct_at(q, xs, args.h)
        series = chi_fourier_eval(q, xs, args.h)
        err = np.abs(direct - series)
        worst = int(np.argmax(err))
        lines.append(
            f"{q},{args.h},{int(xs[worst])},{float(direct[worst])!r},"
            f"{float(series[worst])!r},{float(err[worst])!r}"
        )
        if err[worst] > args.tolerance * q:
            failures += 1
    _emit("\n".join(lines) + "\n", args.output)
    if failures:
        print(
            f"chi-verify: {failures} modulus value(s) above tolerance "
            f"{args.tolerance!r} * q",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_decompose(args) -> int:
    params = _window_params(args)
    spec = tables.GeneratorSpec.parse(args.generator)
    g = tables.build_generator(spec, params.Q)
    try:
        report = spectral.reconcile(
            g, params, max_q=args.max_q, pair_budget=args.pair_budget
        )
    except BudgetExceededError as exc:
        raise CliError(str(exc)) from None
    _emit(_json_text(report.as_dict()), args.output)
    if abs(report.residual) > args.tolerance * max(1.0, report.i_direct):
        print(
            f"decompose: |residual| = {abs(report.residual)!r} above "
            f"{args.tolerance!r} * max(1, i_direct)",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_lemma_scan(args) -> int:
    if args.qmax < 2:
        raise CliError(f"need qmax >= 2, got {args.qmax}")
    if args.A is not None and args.A < 1:
        raise CliError(f"need A >= 1, got {args.A}")
    lines = ["Q,A,near_pair_count"]
    offenders = []
    for q in range(2, args.qmax + 1):
        a = args.A if args.A is not None else 2 * q + 1
        near = spectral.classify_near_integer_pairs(q, a)
        lines.append(f"{q},{a},{len(near)}")
        offenders.extend(near)
    _emit("\n".join(lines) + "\n", args.output)
    if args.pairs and offenders:
        out = io.StringIO()
        spectral.write_pairs_csv(offenders, out)
        with open(args.pairs, "w", encoding="utf-8", newline="") as fh:
            fh.write(out.getvalue())
    if args.A is None and offenders:
        print(
            f"lemma-scan: {len(offenders)} near-integer pair(s) found below "
            "the emptiness threshold",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_scan(args) -> int:
    cells = read_grid_file(args.grid)
    rows = scaling.run_scan(cells, max_workers=_worker_cap())
    if len(rows) != len(cells):
        raise CliError("scan produced no output for some cells; see warnings")
    out = io.StringIO()
    scaling.write_scan_csv(rows, out)
    _emit(out.getvalue(), args.output)
    return 0


def _cmd_fit(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            rows = scaling.read_scan_csv(fh)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read scan CSV {args.input}: {exc}") from None
    if args.function:
        rows = [r for r in rows if r.function_name == args.function]
    try:
        fit = scaling.fit_power_law(rows)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    payload = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }
    _emit(_json_text(payload), args.output)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="symlab",
        description="Window-sum symmetry statistics of arithmetic functions.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sieve", help="write a function table as CSV")
    p.add_argument("--name", help="standard table: d, d_<k>, Lambda, moebius, moebius_sq")
    p.add_argument("--generator", help="generator spec, e.g. ones, delta_at:5")
    p.add_argument("--Q", type=int, help="generator support bound (default: M)")
    p.add_argument("--M", type=int, required=True, help="table length")
    p.add_argument("--emit-generator", action="store_true",
                   help="write the generator table instead of its convolution")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("symmetry", help="mean square of the signed window sums")
    p.add_argument("--name", help="standard table name")
    p.add_argument("--generator", help="generator spec for f = g * 1")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--Q", type=int, help="generator support bound (default: N)")
    p.add_argument("--series", help="also write the x,value series CSV here")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_symmetry)

    p = sub.add_parser("chi-verify",
                       help="check the sine expansion of the divisibility indicator")
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--N", type=int, required=True, help="sample x from (N, 2N]")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=DEFAULT_CHI_TOLERANCE,
                   help="allowed |direct - series| per unit of q")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_chi_verify)

    p = sub.add_parser("decompose", help="three-route decomposition report")
    p.add_argument("--generator", required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--max-q", type=int, default=spectral.DEFAULT_MAX_Q,
                   help="reconcile budget on Q")
    p.add_argument("--pair-budget", type=int, default=spectral.DEFAULT_PAIR_BUDGET)
    p.add_argument("--tolerance", type=float, default=DEFAULT_RESIDUAL_TOLERANCE,
                   help="allowed |residual| per unit of max(1, i_direct)")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("lemma-scan",
                       help="census of near-integer fraction pairs per support bound")
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--A", type=int,
                   help="fixed closeness threshold (default: 2Q+1 per Q, asserted empty)")
    p.add_argument("--pairs", help="write offending pairs as CSV here")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_lemma_scan)

    p = sub.add_parser("scan", help="run a grid of experiment cells")
    p.add_argument("--grid", required=True, help="CSV grid file: function,N,h,Q")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("fit", help="power-law fit of a scan CSV")
    p.add_argument("--input", required=True, help="scan CSV produced by 'scan'")
    p.add_argument("--function", help="restrict the fit to one function name")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_fit)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, BudgetExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
