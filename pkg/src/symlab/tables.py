"""Arithmetic function tables built by sieving and Dirichlet convolution.

Everything downstream consumes tables produced here: a generator table g
supported on [1, Q], the convolved function f = g * 1 (so f(n) sums g over
the divisors of n), and the standard sieved functions (k-fold divisor
counts, the prime-power log weight, the squarefree sign) used by the
scaling experiments.

Tables are immutable after construction and safe to share across threads.
Values are stored in float64; integer-valued tables stay exact because all
magnitudes handled here are far below 2**53.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "FunctionTable",
    "GeneratorSpec",
    "build_generator",
    "convolve_with_ones",
    "sieve_standard",
    "divisor_sum_oracle",
]

GENERATOR_KINDS = (
    "delta_one",
    "delta_at",
    "ones",
    "moebius",
    "neg_moebius_log",
    "divisor_k_minus_1",
    "custom",
)

_STANDARD_NAMES = ("d", "Lambda", "moebius", "moebius_sq")
_DK_PATTERN = re.compile(r"d_(\d+)\Z")


@dataclass(frozen=True)
class FunctionTable:
    """Values of an arithmetic function on [1, M].

    Attributes:
        name: Label used in CSV output and log messages.
        values: float64 array of length M + 1, indexed directly by n.
            Slot 0 is unused and pinned to 0.
        exact: True when every value is a mathematical integer.
    """

    name: str
    values: np.ndarray
    exact: bool

    #: Tables always start at n = 1; index 0 carries no meaning.
    start = 1

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 1 or vals.shape[0] < 2:
            raise ValueError("table must define at least n = 1")
        vals[0] = 0.0
        if self.exact and not np.all(vals == np.rint(vals)):
            raise ValueError(f"table {self.name!r} marked exact but holds non-integers")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return self.values.shape[0] - 1

    @property
    def max_abs(self) -> float:
        """Largest |value| on [1, M]; the essential-boundedness proxy."""
        return float(np.max(np.abs(self.values[1:])))

    def value(self, n: int) -> float:
        if not 1 <= n <= self.length:
            raise IndexError(f"n = {n} outside [1, {self.length}]")
        return float(self.values[n])

    def __getitem__(self, n: int) -> float:
        return self.value(n)

    def write_csv(self, fh) -> None:
        """Write the table as CSV with header ``n,value``."""
        fh.write("n,value\n")
        for n in range(1, self.length + 1):
            fh.write(f"{n},{float(self.values[n])!r}\n")


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a generator table supported on [1, Q].

    ``kind`` selects the family; ``q0``, ``k``, ``path`` carry the single
    parameter taken by delta_at, divisor_k_minus_1 and custom respectively.
    """

    kind: str
    q0: Optional[int] = None
    k: Optional[int] = None
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "delta_at" and (self.q0 is None or self.q0 < 1):
            raise ValueError("delta_at needs a positive target index")
        if self.kind == "divisor_k_minus_1" and (self.k is None or self.k < 1):
            raise ValueError("divisor_k_minus_1 needs k >= 1")
        if self.kind == "custom" and not self.path:
            raise ValueError("custom generator needs a file path")

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        """Parse ``kind`` or ``kind:arg`` strings, e.g. ``delta_at:5``."""
        kind, _, arg = text.partition(":")
        if kind == "delta_at":
            return cls(kind, q0=_parse_int(arg, "delta_at index"))
        if kind == "divisor_k_minus_1":
            return cls(kind, k=_parse_int(arg, "divisor order"))
        if kind == "custom":
            return cls(kind, path=arg)
        if arg:
            raise ValueError(f"generator kind {kind!r} takes no argument")
        return cls(kind)

    def label(self) -> str:
        if self.kind == "delta_at":
            return f"delta_at:{self.q0}"
        if self.kind == "divisor_k_minus_1":
            return f"divisor_k_minus_1:{self.k}"
        if self.kind == "custom":
            return f"custom:{self.path}"
        return self.kind


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"cannot parse {what} from {text!r}") from None


def build_generator(spec: GeneratorSpec, Q: int) -> FunctionTable:
    """Build the generator table g on [1, Q].

    Args:
        spec: Which generator family to build.
        Q: Support bound; g(q) = 0 is enforced for q > Q by clipping the
            table length to Q.

    Returns:
        FunctionTable of length Q.  Deterministic for a given spec.
    """
    if Q < 1:
        raise ValueError(f"support bound must be >= 1, got {Q}")
    vals = np.zeros(Q + 1)
    exact = True
    if spec.kind == "delta_one":
        vals[1] = 1.0
    elif spec.kind == "delta_at":
        if spec.q0 <= Q:
            vals[spec.q0] = 1.0
    elif spec.kind == "ones":
        vals[1:] = 1.0
    elif spec.kind == "moebius":
        vals = _moebius_values(Q)
    elif spec.kind == "neg_moebius_log":
        mu = _moebius_values(Q)
        with np.errstate(divide="ignore"):
            logs = np.log(np.arange(Q + 1, dtype=np.float64))
        logs[0] = 0.0
        vals = -mu * logs
        exact = False
    elif spec.kind == "divisor_k_minus_1":
        if spec.k == 1:
            vals[1] = 1.0  # unit of Dirichlet convolution
        else:
            vals = _divisor_count_values(spec.k - 1, Q)
    elif spec.kind == "custom":
        vals = _read_custom_generator(spec.path, Q)
        exact = bool(np.all(vals == np.rint(vals)))
    return FunctionTable(name=spec.label(), values=vals, exact=exact)


def convolve_with_ones(g: FunctionTable, M: int) -> FunctionTable:
    """Dirichlet convolution f = g * 1 on [1, M].

    f(n) = sum of g(q) over the divisors q of n with q inside g's support.
    Runs the harmonic sieve loop (one strided pass per supported q), so the
    total work is proportional to sum_q M/q rather than to divisor counts.
    """
    if M < 1:
        raise ValueError(f"table length must be >= 1, got {M}")
    out = np.zeros(M + 1)
    gv = g.values
    for q in range(1, min(g.length, M) + 1):
        gq = gv[q]
        if gq != 0.0:
            out[q::q] += gq
    return FunctionTable(name=f"{g.name}*1", values=out, exact=g.exact)


def sieve_standard(name: str, M: int) -> FunctionTable:
    """Sieve one of the standard tables on [1, M].

    Accepted names: ``d``, ``d_<k>`` (k >= 1), ``Lambda``, ``moebius``,
    ``moebius_sq``.  The k-fold divisor count is produced by (k-1) harmonic
    sieve passes over the all-ones table; the prime-power table by a direct
    sieve over prime powers.
    """
    if M < 1:
        raise ValueError(f"table length must be >= 1, got {M}")
    m = _DK_PATTERN.match(name)
    if m:
        k = int(m.group(1))
        if k == 0:
            raise ValueError("d_0 is rejected; k must be >= 1")
        return FunctionTable(name=name, values=_divisor_count_values(k, M), exact=True)
    if name == "d":
        return FunctionTable(name="d", values=_divisor_count_values(2, M), exact=True)
    if name == "Lambda":
        return FunctionTable(name="Lambda", values=_von_mangoldt_values(M), exact=False)
    if name == "moebius":
        return FunctionTable(name="moebius", values=_moebius_values(M), exact=True)
    if name == "moebius_sq":
        mu = _moebius_values(M)
        return FunctionTable(name="moebius_sq", values=mu * mu, exact=True)
    raise ValueError(f"unknown standard table {name!r}")


def divisor_sum_oracle(n: int, g: FunctionTable) -> float:
    """Pointwise f(n) = sum_{q | n} g(q) by trial division.

    Independent of the sieve route on purpose; used by tests to check
    convolve_with_ones one value at a time.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gv = g.values
    sup = g.length
    total = 0.0
    for q in range(1, math.isqrt(n) + 1):
        if n % q == 0:
            if q <= sup:
                total += gv[q]
            partner = n // q
            if partner != q and partner <= sup:
                total += gv[partner]
    return total


def is_standard_name(name: str) -> bool:
    return name in _STANDARD_NAMES or bool(_DK_PATTERN.match(name))


# ---------------------------------------------------------------------------
# sieves

def _primes_upto(M: int) -> np.ndarray:
    if M < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(M + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(M) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.nonzero(is_prime)[0].astype(np.int64)


def _moebius_values(M: int) -> np.ndarray:
    mu = np.ones(M + 1)
    mu[0] = 0.0
    for p in _primes_upto(M):
        mu[p::p] *= -1.0
        sq = p * p
        if sq <= M:
            mu[sq::sq] = 0.0
    return mu


def _von_mangoldt_values(M: int) -> np.ndarray:
    out = np.zeros(M + 1)
    primes = _primes_upto(M)
    if primes.size:
        out[primes] = np.log(primes.astype(np.float64))
        for p in primes[primes <= math.isqrt(M)]:
            log_p = math.log(p)
            pk = p * p
            while pk <= M:
                out[pk] = log_p
                pk *= p
    return out


def _divisor_count_values(k: int, M: int) -> np.ndarray:
    """k-fold divisor count via repeated harmonic sieving; d_1 is all ones."""
    vals = np.zeros(M + 1)
    vals[1:] = 1.0
    for _ in range(k - 1):
        nxt = np.zeros(M + 1)
        for q in range(1, M + 1):
            nxt[q::q] += vals[1: M // q + 1]
        vals = nxt
    return vals


# ---------------------------------------------------------------------------
# custom generator files

def _read_custom_generator(path: str, Q: int) -> np.ndarray:
    """Parse an ``index value`` pair file into a length-Q table.

    One pair per line, separated by whitespace or a comma; indices missing
    from the file are 0, indices above Q are dropped (support bound), and
    an optional ``n,value``/``q,value`` header plus ``#`` comments and blank
    lines are ignored, so CSV tables written by this package read back in.
    """
    vals = np.zeros(Q + 1)
    seen: set[int] = set()
    saw_data = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if not saw_data and parts[0] in ("n", "q"):
                continue  # header row from a CSV export
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'index value', got {line!r}")
            try:
                q = int(parts[0])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad index {parts[0]!r}") from None
            try:
                value = float(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad value {parts[1]!r}") from None
            if not math.isfinite(value):
                raise ValueError(f"{path}:{lineno}: value must be finite")
            if q < 1:
                raise ValueError(f"{path}:{lineno}: index must be >= 1")
            saw_data = True
            if q in seen:
                raise ValueError(f"{path}:{lineno}: duplicate index {q}")
            seen.add(q)
            if q <= Q:
                vals[q] = value
    return vals
