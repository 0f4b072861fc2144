"""Short-interval divisibility indicators and their finite sine expansions.

chi_direct(q, x, h) is the negated, endpoint-halved signed count of the
multiples of q inside [x-h, x+h] (negative weight below x, positive above).
It is always a multiple of 1/2 and is computed with integer floor divisions
only.  chi_fourier_eval reproduces the same number through a finite sine
series over the divisors of q, with weights

    fourier_weight(a, h) = 4 * cot(pi a) * sin^2(pi a h),   0 < a <= 1/2,

evaluated at reduced fractions j/l.  The weight vanishes identically at
a = 1/2 and whenever a*h is an integer; both zeros are detected by exact
rational pre-tests so they come out as exact 0.0, never as trig round-off.

Phases are reduced in exact integer arithmetic ((x*j) mod l before the
division by l) because sin(2 pi x j / l) evaluated naively loses every
significant digit once x reaches ~1e7.

cosine_exp_sum supplies the closed-form geometric cosine sum used to
evaluate every x-sum appearing in the spectral decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

__all__ = [
    "chi_direct",
    "chi_direct_at",
    "chi_direct_range",
    "fourier_weight",
    "fourier_coefficient",
    "chi_fourier_eval",
    "parseval_sum",
    "parseval_ratio_scan",
    "ParsevalScan",
    "cosine_exp_sum",
]

_HALF = Fraction(1, 2)


def chi_direct(q: int, x: int, h: int) -> float:
    """Negated dashed signed count of multiples of q in [x-h, x+h].

    Exact: two floor-division counts (above and below x) plus halved
    endpoint indicators.  The result is a multiple of 1/2 with
    |result| <= h/q + 1.
    """
    _check_window(q, x, h)
    up = (x + h) // q - x // q                # multiples in (x, x+h]
    down = (x - 1) // q - (x - h - 1) // q    # multiples in [x-h, x)
    end_up = 1 if (x + h) % q == 0 else 0
    end_down = 1 if (x - h) % q == 0 else 0
    return -(2 * (up - down) - (end_up - end_down)) / 2.0


def chi_direct_at(q: int, xs: np.ndarray, h: int) -> np.ndarray:
    """chi_direct over an int array of window centres."""
    xs = np.asarray(xs, dtype=np.int64)
    if xs.size:
        _check_window(q, int(xs.min()), h)
    up = (xs + h) // q - xs // q
    down = (xs - 1) // q - (xs - h - 1) // q
    end_up = ((xs + h) % q == 0).astype(np.int64)
    end_down = ((xs - h) % q == 0).astype(np.int64)
    return -(2 * (up - down) - (end_up - end_down)) / 2.0


def chi_direct_range(q: int, N: int, h: int) -> np.ndarray:
    """chi_direct for every x in (N, 2N]."""
    return chi_direct_at(q, np.arange(N + 1, 2 * N + 1, dtype=np.int64), h)


def _check_window(q: int, x: int, h: int) -> None:
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    if x - h < 0:
        raise ValueError(f"window [{x - h}, {x + h}] extends below 0")


def fourier_weight(a: Union[Fraction, tuple], h: int) -> float:
    """4 * cot(pi a) * sin^2(pi a h) for a rational a in (0, 1/2].

    Returns exact 0.0 at a = 1/2 and whenever a*h is an integer; both are
    decided on the rational representation, not by evaluating trig.
    """
    a = Fraction(*a) if isinstance(a, tuple) else Fraction(a)
    if not 0 < a <= _HALF:
        raise ValueError(f"phase must lie in (0, 1/2], got {a}")
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    if a == _HALF:
        return 0.0
    ah = (a * h) % 1
    if ah == 0:
        return 0.0
    af = float(a)
    s = math.sin(math.pi * float(ah))
    return 4.0 * (math.cos(math.pi * af) / math.sin(math.pi * af)) * s * s


def fourier_coefficient(j: int, q: int, h: int) -> float:
    """Expansion coefficient (4/q) cot(pi j/q) sin^2(pi j h/q) for 0 < j <= q.

    The j = q slot is defined as 0 (its sine factor in the expansion
    vanishes identically, and cot(pi) does not exist).
    """
    if q < 1 or not 0 < j <= q:
        raise ValueError(f"need 0 < j <= q, got j={j}, q={q}")
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    if j == q or 2 * j == q:
        return 0.0
    red = (j * h) % q
    s = math.sin(math.pi * red / q)
    return (4.0 / q) * (math.cos(math.pi * j / q) / math.sin(math.pi * j / q)) * s * s


@lru_cache(maxsize=None)
def _expansion_basis(q: int):
    """Per-modulus term list: (l, j) with l | q, l > 1, j <= l/2, gcd(j, l) = 1.

    The cotangent factor is h-independent and cached alongside, with the
    l = 2 slot forced to exact 0.0 (the weight's analytic zero at 1/2).
    """
    ells, js = [], []
    for l in range(2, q + 1):
        if q % l == 0:
            for j in range(1, l // 2 + 1):
                if math.gcd(j, l) == 1:
                    ells.append(l)
                    js.append(j)
    ell_arr = np.array(ells, dtype=np.int64)
    j_arr = np.array(js, dtype=np.int64)
    with np.errstate(divide="ignore"):
        cot = np.cos(np.pi * j_arr / ell_arr) / np.sin(np.pi * j_arr / ell_arr)
    cot[2 * j_arr == ell_arr] = 0.0
    cot.flags.writeable = False
    ell_arr.flags.writeable = False
    j_arr.flags.writeable = False
    return ell_arr, j_arr, cot


@lru_cache(maxsize=200_000)
def _expansion_coefficients(q: int, h: int) -> np.ndarray:
    """Per-(q, h) coefficient vector (4/q) cot(pi j/l) sin^2(pi j h/l)."""
    ells, js, cot = _expansion_basis(q)
    red = (js * h) % ells
    s = np.sin(np.pi * red / ells)
    coef = (4.0 / q) * cot * s * s
    coef.flags.writeable = False
    return coef


def chi_fourier_eval(q: int, x, h: int):
    """Finite sine-series value of the divisibility indicator.

    Sums, over divisors l > 1 of q and reduced j <= l/2, the weighted sines
    sin(2 pi x j / l) with exact integer phase reduction.  ``x`` may be a
    single integer or an integer array; the array form is a single batched
    evaluation of the identical series.
    """
    if q < 1:
        raise ValueError(f"modulus must be >= 1, got {q}")
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    xs = np.asarray(x, dtype=np.int64)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if q == 1:
        out = np.zeros(xs.shape[0])
        return 0.0 if scalar else out
    ells, js, _ = _expansion_basis(q)
    coef = _expansion_coefficients(q, h)
    red = (xs[:, None] * js[None, :]) % ells[None, :]
    terms = np.sin((2.0 * np.pi) * red / ells[None, :])
    out = (terms * coef).sum(axis=1)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Parseval machinery

def _coefficient_row(q: int, h: int) -> np.ndarray:
    """All coefficients for j = 1 .. q-1 (vectorised, exact zero at j = q/2)."""
    js = np.arange(1, q, dtype=np.int64)
    with np.errstate(divide="ignore"):
        cot = np.cos(np.pi * js / q) / np.sin(np.pi * js / q)
    cot[2 * js == q] = 0.0
    red = (js * h) % q
    s = np.sin(np.pi * red / q)
    return (4.0 / q) * cot * s * s


def parseval_sum(q: int, h: int) -> float:
    """Sum of squared expansion coefficients over 0 < j < q.

    The j = q term is 0 by definition, so the sum stops at q - 1.
    """
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    if h < 1:
        raise ValueError(f"window half-width must be >= 1, got {h}")
    c = _coefficient_row(q, h)
    return float(np.sum(c * c))


@dataclass(frozen=True)
class ParsevalScan:
    """Outcome of a full (q, h) grid scan of parseval_sum bounds.

    ``max_ratio`` is the largest parseval_sum / min(1, h/q); this is the
    asserted bound shape.  ``max_ratio_norm`` tracks the sharper candidate
    denominator ||h/q|| (distance of h/q to the nearest integer); cells
    with h divisible by q have an exactly zero sum and are excluded from
    the norm ratio (and counted in ``zero_cells``).
    """

    max_ratio: float
    argmax: tuple
    max_ratio_norm: float
    argmax_norm: tuple
    zero_cells: int


def parseval_ratio_scan(q_max: int, h_max: int) -> ParsevalScan:
    """Scan parseval_sum(q, h) / bound over 2 <= q <= q_max, 1 <= h <= h_max."""
    if q_max < 2 or h_max < 1:
        raise ValueError("scan needs q_max >= 2 and h_max >= 1")
    best = (0.0, (0, 0))
    best_norm = (0.0, (0, 0))
    zero_cells = 0
    hs = np.arange(1, h_max + 1, dtype=np.int64)
    for q in range(2, q_max + 1):
        # coefficients are antisymmetric about q/2, so square-sum over
        # j < q/2 twice (the middle slot, if any, is exactly 0)
        js = np.arange(1, (q + 1) // 2, dtype=np.int64)
        if js.size == 0:  # q = 2: the single coefficient is exactly 0
            sums = np.zeros(h_max)
        else:
            cot = np.cos(np.pi * js / q) / np.sin(np.pi * js / q)
            base = 2.0 * (16.0 / (q * q)) * cot * cot
            red = np.outer(hs, js) % q
            s2 = np.sin(np.pi * red / q)
            s2 *= s2
            sums = (s2 * s2) @ base
        r = hs % q
        min_bound = np.minimum(1.0, hs / q)
        ratios = sums / min_bound
        i = int(np.argmax(ratios))
        if ratios[i] > best[0]:
            best = (float(ratios[i]), (q, int(hs[i])))
        norm = np.minimum(r, q - r) / q
        nonzero = norm > 0
        zero_cells += int(np.count_nonzero(~nonzero))
        if np.any(nonzero):
            nr = sums[nonzero] / norm[nonzero]
            k = int(np.argmax(nr))
            if nr[k] > best_norm[0]:
                best_norm = (float(nr[k]), (q, int(hs[nonzero][k])))
    return ParsevalScan(
        max_ratio=best[0],
        argmax=best[1],
        max_ratio_norm=best_norm[0],
        argmax_norm=best_norm[1],
        zero_cells=zero_cells,
    )


# ---------------------------------------------------------------------------
# closed-form cosine geometric sum

def cosine_exp_sum(theta, N: int) -> float:
    """Sum of cos(2 pi theta x) over N < x <= 2N in closed form.

    For a Fraction phase all period reductions happen in exact rational
    arithmetic, so the analytic zeros (theta*N integral) and the constant
    case (theta integral, sum = N) are exact.  A float phase is evaluated
    directly and is only intended for irrational-phase experiments.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if isinstance(theta, Fraction):
        t = theta % 1
        if t == 0:
            return float(N)
        envelope = Fraction(t.numerator * N, t.denominator) % 2
        if envelope.denominator == 1:
            return 0.0  # sin(pi * theta * N) = 0 exactly
        carrier = Fraction(t.numerator * (3 * N + 1), t.denominator) % 2
        num = math.sin(math.pi * float(envelope)) * math.cos(math.pi * float(carrier))
        return num / math.sin(math.pi * float(t))
    t = float(theta) % 1.0
    if t == 0.0:
        return float(N)
    return (
        math.sin(math.pi * t * N)
        * math.cos(math.pi * t * (3 * N + 1))
        / math.sin(math.pi * t)
    )
