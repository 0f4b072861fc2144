"""Mean-square symmetry statistics of arithmetic functions in short intervals.

The library computes the signed, endpoint-halved window sums of an
arithmetic function f = g * 1 around every x in (N, 2N], their mean square,
and the exact spectral decomposition of that mean square into a diagonal
and off-diagonal cosine terms over pairs of reduced fractions.  A scaling
lab fits the growth of the mean square against N*h, and a CLI binds it all
into reproducible CSV/JSON runs.
"""

from .chi import (
    chi_direct,
    chi_fourier_eval,
    cosine_exp_sum,
    fourier_coefficient,
    fourier_weight,
    parseval_ratio_scan,
    parseval_sum,
)
from .scaling import (
    FitResult,
    GridCell,
    ScanRow,
    fit_power_law,
    flagship_cells,
    regime_check,
    run_scan,
)
from .spectral import (
    BudgetExceededError,
    DecompositionReport,
    FractionPair,
    aggregate_chi_series,
    classify_near_integer_pairs,
    diagonal_term,
    enumerate_offdiagonal_pairs,
    offdiagonal_term,
    ramanujan_coefficient,
    reconcile,
)
from .symmetry import (
    SymmetrySeries,
    WindowParams,
    blocked_sum,
    symmetry_integral,
    symmetry_integral_bruteforce,
    symmetry_integral_continuous,
    symmetry_series,
    symmetry_sum,
)
from .tables import (
    FunctionTable,
    GeneratorSpec,
    build_generator,
    convolve_with_ones,
    divisor_sum_oracle,
    sieve_standard,
)

__version__ = "0.1.0"

__all__ = [
    "FunctionTable",
    "GeneratorSpec",
    "build_generator",
    "convolve_with_ones",
    "divisor_sum_oracle",
    "sieve_standard",
    "WindowParams",
    "SymmetrySeries",
    "blocked_sum",
    "symmetry_sum",
    "symmetry_series",
    "symmetry_integral",
    "symmetry_integral_continuous",
    "symmetry_integral_bruteforce",
    "chi_direct",
    "chi_fourier_eval",
    "fourier_weight",
    "fourier_coefficient",
    "parseval_sum",
    "parseval_ratio_scan",
    "cosine_exp_sum",
    "FractionPair",
    "DecompositionReport",
    "BudgetExceededError",
    "ramanujan_coefficient",
    "aggregate_chi_series",
    "diagonal_term",
    "enumerate_offdiagonal_pairs",
    "offdiagonal_term",
    "classify_near_integer_pairs",
    "reconcile",
    "GridCell",
    "ScanRow",
    "FitResult",
    "run_scan",
    "fit_power_law",
    "regime_check",
    "flagship_cells",
    "__version__",
]
