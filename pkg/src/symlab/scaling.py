"""Experiment grids and power-law fits for the window mean square.

A grid cell names a function (a sieved table or a generator to convolve),
a range base N, a half-width h and a support bound Q.  run_scan computes
the mean square for every cell and its ratio against N*h; fit_power_law
regresses log(mean square) on log(N*h) to expose the growth exponent.
flagship_cells() is the default experiment: the 2-fold and 3-fold divisor
counts plus the prime-power table on N = 2^12 .. 2^17 with h = floor(N^0.3),
all inside the h^2 <= N regime.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .symmetry import WindowParams, symmetry_integral
from .tables import (
    FunctionTable,
    GeneratorSpec,
    build_generator,
    convolve_with_ones,
    is_standard_name,
    sieve_standard,
)

__all__ = [
    "GridCell",
    "ScanRow",
    "FitResult",
    "run_scan",
    "fit_power_law",
    "regime_check",
    "flagship_cells",
    "write_scan_csv",
    "read_scan_csv",
    "SCAN_CSV_HEADER",
]

log = logging.getLogger(__name__)

SCAN_CSV_HEADER = "function,N,h,Q,integral,ratio,max_g,theorem_regime"

FLAGSHIP_FUNCTIONS = ("d", "d_3", "Lambda")
FLAGSHIP_EXPONENTS = range(12, 18)


@dataclass(frozen=True)
class GridCell:
    """One experiment cell: which function, and the window parameters."""

    function: str
    N: int
    h: int
    Q: int


@dataclass(frozen=True)
class ScanRow:
    """Result of one cell.

    ``max_g`` reports the essential-boundedness proxy of whatever drives
    the cell: the generator's largest |value| on the convolution route, the
    table's largest |value| on the sieve route.  ``theorem_regime`` flags
    h^2 <= N; cells outside the regime are flagged, never rejected.
    """

    function_name: str
    N: int
    h: int
    Q: int
    integral: float
    ratio: float
    max_g: float
    theorem_regime: bool


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def regime_check(N: int, h: int) -> bool:
    """True iff h^2 <= N, the short-window hypothesis at finite scale."""
    return h * h <= N


def _build_cell_table(cell: GridCell) -> tuple:
    """Table for one cell plus its max_g report value."""
    M = 2 * cell.N + cell.h
    if is_standard_name(cell.function):
        table = sieve_standard(cell.function, M)
        return table, table.max_abs
    if cell.function.startswith("g="):
        spec = GeneratorSpec.parse(cell.function[2:])
        g = build_generator(spec, cell.Q)
        return convolve_with_ones(g, M), g.max_abs
    raise ValueError(
        f"unknown scan function {cell.function!r}; use a standard table name "
        "(d, d_<k>, Lambda, moebius, moebius_sq) or g=<generator>"
    )


def _run_cell(cell: GridCell) -> ScanRow:
    params = WindowParams(N=cell.N, h=cell.h, Q=cell.Q)
    table, max_g = _build_cell_table(cell)
    integral = symmetry_integral(table, params)
    return ScanRow(
        function_name=cell.function,
        N=cell.N,
        h=cell.h,
        Q=cell.Q,
        integral=integral,
        ratio=integral / (cell.N * cell.h),
        max_g=max_g,
        theorem_regime=regime_check(cell.N, cell.h),
    )


def run_scan(cells, max_workers: int = 1) -> list:
    """Run every cell; output order equals input order.

    Invalid cells are logged and skipped, the scan continues.  Cells are
    independent, so ``max_workers`` > 1 fans them out over threads without
    changing any result.
    """
    cells = list(cells)

    def attempt(indexed):
        idx, cell = indexed
        try:
            return _run_cell(cell)
        except (ValueError, ArithmeticError) as exc:
            log.warning("scan cell %d (%r) skipped: %s", idx + 1, cell, exc)
            return None

    if max_workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(attempt, enumerate(cells)))
    else:
        results = [attempt(item) for item in enumerate(cells)]
    return [row for row in results if row is not None]


def fit_power_law(rows) -> FitResult:
    """Least squares of log(integral) against log(N*h).

    Rows with a zero integral are excluded (their logs do not exist; the
    zero cases are exact identities tested elsewhere).  Needs at least 3
    surviving rows.
    """
    pts = [
        (math.log(row.N * row.h), math.log(row.integral))
        for row in rows
        if row.integral > 0.0
    ]
    if len(pts) < 3:
        raise ValueError(f"need >= 3 rows with positive integral, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        n_points=len(pts),
    )


def flagship_cells(functions=FLAGSHIP_FUNCTIONS, exponents=FLAGSHIP_EXPONENTS) -> list:
    """The default scaling experiment grid (minutes-scale, all in regime)."""
    cells = []
    for name in functions:
        for k in exponents:
            N = 1 << k
            h = int(N ** 0.3)
            cells.append(GridCell(function=name, N=N, h=h, Q=N))
    return cells


def write_scan_csv(rows, fh) -> None:
    fh.write(SCAN_CSV_HEADER + "\n")
    for row in rows:
        fh.write(
            f"{row.function_name},{row.N},{row.h},{row.Q},"
            f"{row.integral!r},{row.ratio!r},{row.max_g!r},"
            f"{str(row.theorem_regime).lower()}\n"
        )


def read_scan_csv(fh) -> list:
    """Parse a scan CSV back into ScanRow records (round-trip reader)."""
    header = fh.readline().strip()
    if header != SCAN_CSV_HEADER:
        raise ValueError(f"unexpected scan CSV header {header!r}")
    rows = []
    for lineno, raw in enumerate(fh, 2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise ValueError(f"line {lineno}: expected 8 fields, got {len(parts)}")
        try:
            rows.append(
                ScanRow(
                    function_name=parts[0],
                    N=int(parts[1]),
                    h=int(parts[2]),
                    Q=int(parts[3]),
                    integral=float(parts[4]),
                    ratio=float(parts[5]),
                    max_g=float(parts[6]),
                    theorem_regime={"true": True, "false": False}[parts[7]],
                )
            )
        except (ValueError, KeyError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return rows
