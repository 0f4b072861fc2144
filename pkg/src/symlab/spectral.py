"""Spectral decomposition of the window mean square, with exact rationals.

For f = g * 1 with g supported on [1, Q] and Q <= N, the mean square of the
signed window sums splits exactly into

    I = diagonal + sum over ordered fraction pairs of
        R(l) R(t) W(j/l) W(r/t) * (C(delta) - C(sigma)),

where the pairs run over reduced fractions j/l > r/t drawn from moduli
2..Q with numerators up to half the denominator, W is the sine-expansion
weight, R the weighted generator sum per modulus, C the closed-form cosine
sum over N < x <= 2N, delta = j/l - r/t, and sigma the distance of
j/l + r/t to the nearest integer.  delta and sigma are carried as exact
rationals end to end; only the W and C evaluations are floating point.

reconcile() computes the direct route, the indicator route and the spectral
route for one configuration and reports the residual between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .chi import chi_direct_range, cosine_exp_sum, fourier_weight
from .symmetry import SymmetrySeries, WindowParams, blocked_sum, symmetry_series
from .tables import FunctionTable, convolve_with_ones

__all__ = [
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
    "default_near_threshold",
    "write_pairs_csv",
]

DEFAULT_PAIR_BUDGET = 1_000_000
DEFAULT_MAX_Q = 40

_HALF = Fraction(1, 2)


class BudgetExceededError(RuntimeError):
    """Raised when a pair enumeration or reconciliation exceeds its budget."""


@dataclass(frozen=True)
class FractionPair:
    """An ordered pair of reduced fractions with its exact delta and sigma."""

    first: Fraction
    second: Fraction
    delta: Fraction
    sigma: Fraction

    @classmethod
    def from_fractions(cls, first: Fraction, second: Fraction) -> "FractionPair":
        if not (0 < second < first <= _HALF):
            raise ValueError(f"need 0 < second < first <= 1/2, got {first}, {second}")
        s = (first + second) % 1
        return cls(first=first, second=second, delta=first - second, sigma=min(s, 1 - s))

    @property
    def forces_zero_weight(self) -> bool:
        """True when either fraction is 1/2, where the sine weight vanishes."""
        return self.first == _HALF or self.second == _HALF

    def csv_row(self) -> str:
        return (
            f"{self.first.numerator},{self.first.denominator},"
            f"{self.second.numerator},{self.second.denominator},"
            f"{self.delta.numerator},{self.delta.denominator},"
            f"{self.sigma.numerator},{self.sigma.denominator}"
        )


@dataclass(frozen=True)
class DecompositionReport:
    """The three-route comparison for one (g, N, h, Q) configuration.

    The off-diagonal pair sum carries prefactor 1 on C(delta) - C(sigma)
    over ordered pairs with delta > 0 (the convention that closes the
    residual), so

        residual = i_direct - diagonal - (offdiag_delta - offdiag_sigma).
    """

    i_direct: float
    i_via_chi: float
    diagonal: float
    offdiag_delta: float
    offdiag_sigma: float
    residual: float
    pair_count: int
    near_pair_count: int

    def as_dict(self) -> dict:
        return {
            "i_direct": self.i_direct,
            "i_via_chi": self.i_via_chi,
            "diagonal": self.diagonal,
            "offdiag_delta": self.offdiag_delta,
            "offdiag_sigma": self.offdiag_sigma,
            "residual": self.residual,
            "pair_count": self.pair_count,
            "near_pair_count": self.near_pair_count,
        }


def _require_supported(g: FunctionTable, Q: int) -> None:
    if g.length > Q and np.any(g.values[Q + 1:] != 0.0):
        raise ValueError(f"generator {g.name!r} has support above Q = {Q}")


def ramanujan_coefficient(g: FunctionTable, Q: int, l: int) -> float:
    """Weighted generator sum R(l) = sum_{d <= Q/l} g(l d) / (l d).

    Moduli above Q give an empty sum (0.0); l <= 1 is rejected.
    """
    if l <= 1:
        raise ValueError(f"modulus must exceed 1, got {l}")
    if Q < 1:
        raise ValueError(f"support bound must be >= 1, got {Q}")
    gv = g.values
    sup = g.length
    total = 0.0
    for d in range(1, Q // l + 1):
        m = l * d
        if m <= sup and gv[m] != 0.0:
            total += gv[m] / m
    return total


def aggregate_chi_series(g: FunctionTable, params: WindowParams) -> SymmetrySeries:
    """A(x) = sum_{q <= Q} g(q) chi_direct(q, x, h) for all N < x <= 2N.

    Equals the negated window-sum series of f = g * 1, exactly so on
    integer-valued generators.
    """
    _require_supported(g, params.Q)
    N, h = params.N, params.h
    acc = np.zeros(N)
    gv = g.values
    for q in range(1, min(params.Q, g.length) + 1):
        gq = gv[q]
        if gq != 0.0:
            acc += gq * chi_direct_range(q, N, h)
    return SymmetrySeries(params=params, values=acc)


def default_near_threshold(params: WindowParams) -> int:
    """Default near-integer threshold A = max(N ceil(log N), 2Q + 1).

    N log N mirrors the scale on which near pairs are split off in the
    asymptotic argument; 2Q + 1 is the finite bound above which the
    near-pair set is provably empty, so the default always clears it.
    """
    return max(params.N * math.ceil(math.log(params.N)), 2 * params.Q + 1)


def _reduced_fractions(Q: int) -> list:
    """All reduced j/l with 1 < l <= Q, 1 <= j <= l/2, ascending."""
    out = []
    for l in range(2, Q + 1):
        for j in range(1, l // 2 + 1):
            if gcd(j, l) == 1:
                out.append(Fraction(j, l))
    out.sort()
    return out


def enumerate_offdiagonal_pairs(Q: int, pair_budget: int = DEFAULT_PAIR_BUDGET) -> list:
    """All ordered pairs of reduced fractions with positive difference.

    Output is sorted ascending by (first, second).  Raises
    BudgetExceededError when the pair count would exceed ``pair_budget``,
    which signals that Q is too large for exact reconciliation.
    """
    if Q < 2:
        raise ValueError(f"need Q >= 2, got {Q}")
    fracs = _reduced_fractions(Q)
    n = len(fracs)
    count = n * (n - 1) // 2
    if count > pair_budget:
        raise BudgetExceededError(
            f"{count} pairs at Q = {Q} exceed the budget of {pair_budget}"
        )
    pairs = []
    for i in range(1, n):
        first = fracs[i]
        for k in range(i):
            pairs.append(FractionPair.from_fractions(first, fracs[k]))
    return pairs


def classify_near_integer_pairs(Q: int, A: int) -> list:
    """The sublist of enumerate_offdiagonal_pairs(Q) with sigma <= 1/A.

    Implemented as a windowed search on the sorted fraction list (sigma is
    small only when the two fractions sum near 0 or near 1), then confirmed
    pair by pair in exact rational arithmetic, so the result equals the
    brute filter of the full enumeration, in the same order.
    """
    if Q < 2:
        raise ValueError(f"need Q >= 2, got {Q}")
    if A < 1:
        raise ValueError(f"threshold parameter must be >= 1, got {A}")
    bound = Fraction(1, A)
    fracs = _reduced_fractions(Q)
    keys = np.array([float(v) for v in fracs])
    inv_a = 1.0 / A
    guard = 1e-9
    out = []
    for i in range(1, len(fracs)):
        first = fracs[i]
        fkey = keys[i]
        # sums near 0: second <= 1/A - first
        lo_stop = int(np.searchsorted(keys, inv_a - fkey + guard, side="right"))
        # sums near 1: second >= 1 - 1/A - first
        hi_start = int(np.searchsorted(keys, 1.0 - inv_a - fkey - guard, side="left"))
        lo_stop = min(lo_stop, i)
        hi_start = max(hi_start, lo_stop)  # keep candidate index ranges disjoint
        for k in [*range(lo_stop), *range(hi_start, i)]:
            pair = FractionPair.from_fractions(first, fracs[k])
            if pair.sigma <= bound:
                out.append(pair)
    return out


def diagonal_term(g: FunctionTable, params: WindowParams) -> float:
    """The coinciding-fraction part: nonnegative by construction.

    Per modulus l it contributes R(l)^2 times the weighted sum over reduced
    j <= l/2 of W(j/l)^2 * sum_x sin^2(2 pi x j / l), the sine square sum
    evaluated in closed form as (N - C(2j/l mod 1)) / 2.
    """
    _require_supported(g, params.Q)
    N, h, Q = params.N, params.h, params.Q
    terms = []
    for l in range(2, Q + 1):
        r = ramanujan_coefficient(g, Q, l)
        if r == 0.0:
            continue
        r2 = r * r
        for j in range(1, l // 2 + 1):
            if gcd(j, l) != 1:
                continue
            w = fourier_weight(Fraction(j, l), h)
            if w == 0.0:
                continue
            doubled = Fraction(2 * j, l) % 1
            sin_sq_sum = 0.5 * (N - cosine_exp_sum(doubled, N))
            terms.append(r2 * w * w * sin_sq_sum)
    return blocked_sum(np.asarray(terms)) if terms else 0.0


def offdiagonal_term(
    g: FunctionTable,
    params: WindowParams,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> tuple:
    """Off-diagonal sums (delta part, sigma part), returned separately.

    The total off-diagonal contribution to the mean square is
    offdiag_delta - offdiag_sigma.
    """
    pairs = enumerate_offdiagonal_pairs(params.Q, pair_budget)
    return _offdiagonal_from_pairs(g, params, pairs)


def _offdiagonal_from_pairs(g: FunctionTable, params: WindowParams, pairs) -> tuple:
    _require_supported(g, params.Q)
    N, h, Q = params.N, params.h, params.Q
    ram_cache: dict = {}
    weight_cache: dict = {}
    cosine_cache: dict = {}

    def ram(l: int) -> float:
        if l not in ram_cache:
            ram_cache[l] = ramanujan_coefficient(g, Q, l)
        return ram_cache[l]

    def weight(a: Fraction) -> float:
        if a not in weight_cache:
            weight_cache[a] = fourier_weight(a, h)
        return weight_cache[a]

    def cosine(theta: Fraction) -> float:
        if theta not in cosine_cache:
            cosine_cache[theta] = cosine_exp_sum(theta, N)
        return cosine_cache[theta]

    delta_terms = []
    sigma_terms = []
    for pair in pairs:
        coef = ram(pair.first.denominator) * ram(pair.second.denominator)
        if coef == 0.0:
            continue
        coef *= weight(pair.first) * weight(pair.second)
        if coef == 0.0:
            continue
        delta_terms.append(coef * cosine(pair.delta))
        sigma_terms.append(coef * cosine(pair.sigma))
    return (
        blocked_sum(np.asarray(delta_terms)) if delta_terms else 0.0,
        blocked_sum(np.asarray(sigma_terms)) if sigma_terms else 0.0,
    )


def reconcile(
    g: FunctionTable,
    params: WindowParams,
    max_q: int = DEFAULT_MAX_Q,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    near_threshold: int | None = None,
) -> DecompositionReport:
    """Compute all three routes for one configuration and their residual.

    Routes: direct window sums on f = g * 1, the aggregated indicator
    series, and diagonal + off-diagonal closed forms.  ``near_threshold``
    overrides the default A used only for the near-pair census in the
    report.
    """
    if params.Q > max_q:
        raise BudgetExceededError(
            f"Q = {params.Q} exceeds the reconcile budget of {max_q}"
        )
    _require_supported(g, params.Q)
    f = convolve_with_ones(g, params.table_length)
    series = symmetry_series(f, params)
    i_direct = blocked_sum(series.values * series.values)
    agg = aggregate_chi_series(g, params)
    i_via_chi = blocked_sum(agg.values * agg.values)
    diagonal = diagonal_term(g, params)
    pairs = enumerate_offdiagonal_pairs(params.Q, pair_budget)
    od_delta, od_sigma = _offdiagonal_from_pairs(g, params, pairs)
    a_threshold = near_threshold if near_threshold is not None else default_near_threshold(params)
    near_bound = Fraction(1, a_threshold)
    near = sum(1 for p in pairs if p.sigma <= near_bound)
    return DecompositionReport(
        i_direct=i_direct,
        i_via_chi=i_via_chi,
        diagonal=diagonal,
        offdiag_delta=od_delta,
        offdiag_sigma=od_sigma,
        residual=i_direct - (diagonal + od_delta - od_sigma),
        pair_count=len(pairs),
        near_pair_count=near,
    )


def write_pairs_csv(pairs, fh) -> None:
    fh.write("j,l,r,t,delta_num,delta_den,sigma_num,sigma_den\n")
    for pair in pairs:
        fh.write(pair.csv_row() + "\n")
