"""Signed short-interval window sums and their mean square.

The basic statistic is the endpoint-halved signed window sum

    S(x) = sum_{x < n <= x+h} f(n) - sum_{x-h <= n < x} f(n)
           - (f(x+h) - f(x-h)) / 2,

which vanishes exactly when f is symmetric around x on [x-h, x+h].  Its
mean square over N < x <= 2N is the headline quantity of the library; this
module computes it by prefix sums, by a naive double loop (the test
oracle), and as a genuine integral over real x.

Floating-point accumulation order is pinned everywhere: arrays are summed
sequentially inside blocks of 2**14 consecutive entries and the block
partials are combined in index order, so results do not depend on how work
might be partitioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tables import FunctionTable

__all__ = [
    "WindowParams",
    "SymmetrySeries",
    "blocked_sum",
    "symmetry_sum",
    "symmetry_series",
    "symmetry_integral",
    "symmetry_integral_continuous",
    "symmetry_integral_bruteforce",
]

_BLOCK = 1 << 14
_BRUTEFORCE_MAX_N = 100_000


@dataclass(frozen=True)
class WindowParams:
    """The experiment triple (N, h, Q).

    x ranges over N < x <= 2N, windows are [x-h, x+h], and Q bounds the
    generator support used by the spectral routines.  Q <= N is enforced:
    it keeps every window to the right of the generator support, which is
    what makes the spectral side conditions vacuous.
    """

    N: int
    h: int
    Q: int

    def __post_init__(self) -> None:
        if self.h < 1:
            raise ValueError(f"window half-width must be >= 1, got {self.h}")
        if self.h >= self.N:
            raise ValueError(f"need h < N, got h={self.h}, N={self.N}")
        if not 1 <= self.Q <= self.N:
            raise ValueError(f"need 1 <= Q <= N, got Q={self.Q}, N={self.N}")

    @property
    def level(self) -> float:
        """log Q / log N, the support exponent relative to N."""
        return math.log(self.Q) / math.log(self.N)

    @property
    def theorem_regime(self) -> bool:
        """Finite proxy for h growing slower than sqrt(N)."""
        return self.h * self.h <= self.N

    @property
    def table_length(self) -> int:
        """Tables must reach 2N + h; no window looks further."""
        return 2 * self.N + self.h


@dataclass(frozen=True)
class SymmetrySeries:
    """All window sums S(x) for N < x <= 2N, in x order."""

    params: WindowParams
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.shape != (self.params.N,):
            raise ValueError("series must hold exactly N values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def value_at(self, x: int) -> float:
        lo = self.params.N
        if not lo < x <= 2 * lo:
            raise IndexError(f"x = {x} outside ({lo}, {2 * lo}]")
        return float(self.values[x - lo - 1])

    def write_csv(self, fh) -> None:
        fh.write("x,value\n")
        for i, v in enumerate(self.values):
            fh.write(f"{self.params.N + 1 + i},{float(v)!r}\n")


def blocked_sum(values) -> float:
    """Sum a float array with the fixed block accumulation order."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    total = 0.0
    for start in range(0, arr.shape[0], _BLOCK):
        chunk = arr[start: start + _BLOCK]
        total += float(np.cumsum(chunk)[-1])
    return total


def symmetry_sum(f: FunctionTable, x: int, h: int) -> float:
    """One endpoint-halved signed window sum (direct slice evaluation)."""
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    if x - h < 1 or x + h > f.length:
        raise ValueError(
            f"window [{x - h}, {x + h}] leaves the table range [1, {f.length}]"
        )
    v = f.values
    upper = float(np.sum(v[x + 1: x + h + 1]))
    lower = float(np.sum(v[x - h: x]))
    return upper - lower - (float(v[x + h]) - float(v[x - h])) / 2.0


def symmetry_series(f: FunctionTable, params: WindowParams) -> SymmetrySeries:
    """All S(x) for N < x <= 2N from a single prefix-sum array.

    Amortized O(1) per x.  On integer-valued tables this agrees bit for bit
    with per-x symmetry_sum calls (all arithmetic is exact); on real tables
    the two routes agree to ~1e-9 relative, which is what the tests pin.
    """
    N, h = params.N, params.h
    if f.length < params.table_length:
        raise ValueError(
            f"table of length {f.length} too short; need {params.table_length}"
        )
    prefix = np.cumsum(f.values)
    xs = np.arange(N + 1, 2 * N + 1)
    upper = prefix[xs + h] - prefix[xs]
    lower = prefix[xs - 1] - prefix[xs - h - 1]
    halving = 0.5 * (f.values[xs + h] - f.values[xs - h])
    return SymmetrySeries(params=params, values=upper - lower - halving)


def symmetry_integral(f: FunctionTable, params: WindowParams) -> float:
    """Sum of |S(x)|^2 over N < x <= 2N."""
    series = symmetry_series(f, params)
    return blocked_sum(series.values * series.values)


def symmetry_integral_continuous(f: FunctionTable, params: WindowParams) -> float:
    """Exact integral over real x in (N, 2N] of the squared signed window sum.

    For non-integer x the un-halved signed sum is constant on each open unit
    cell (m, m+1), where it equals P(m+h) - 2 P(m) + P(m-h) in terms of the
    prefix sums P, so the integral is the sum of N squared cell values.
    """
    N, h = params.N, params.h
    if f.length < params.table_length:
        raise ValueError(
            f"table of length {f.length} too short; need {params.table_length}"
        )
    prefix = np.cumsum(f.values)
    ms = np.arange(N, 2 * N)
    cell = prefix[ms + h] - 2.0 * prefix[ms] + prefix[ms - h]
    return blocked_sum(cell * cell)


def symmetry_integral_bruteforce(f: FunctionTable, params: WindowParams) -> float:
    """Naive double loop over x and n; the independent oracle.

    Guarded to N <= 1e5 against quadratic blowup.  Uses exact (fsum)
    accumulation so the only rounding under test is the fast route's.
    """
    N, h = params.N, params.h
    if N > _BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force is guarded to N <= {_BRUTEFORCE_MAX_N}")
    if f.length < params.table_length:
        raise ValueError(
            f"table of length {f.length} too short; need {params.table_length}"
        )
    v = f.values
    squares = []
    for x in range(N + 1, 2 * N + 1):
        terms = []
        for n in range(x - h, x + h + 1):
            if n > x:
                terms.append(float(v[n]))
            elif n < x:
                terms.append(-float(v[n]))
        terms.append(-(float(v[x + h]) - float(v[x - h])) / 2.0)
        s = math.fsum(terms)
        squares.append(s * s)
    return math.fsum(squares)
