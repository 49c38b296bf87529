"""
Exact integer and rational sequences behind every series term: factorials,
derangement numbers, signed Stirling numbers of the first kind and the
alternating tail R(k) = sum_{l>k} (-1)^l / l!.
"""
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .decorators import log_result
from .errors import PreconditionError

BigRational = Fraction
Rational = Union[int, Fraction]


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints"""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise PreconditionError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @classmethod
    def between(cls, a: Rational, b: Rational) -> "RationalInterval":
        """Interval spanned by two endpoints given in either order"""
        return cls(min(a, b), max(a, b))

    @classmethod
    def point(cls, q: Rational) -> "RationalInterval":
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def magnitude(self) -> Fraction:
        """Upper bound on |x| for x in the interval"""
        return max(abs(self.lo), abs(self.hi))

    @property
    def mignitude(self) -> Fraction:
        """Lower bound on |x| for x in the interval"""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))

    def contains(self, q: Rational) -> bool:
        return self.lo <= q <= self.hi

    def scale(self, q: Rational) -> "RationalInterval":
        return RationalInterval.between(self.lo * q, self.hi * q)

    def shift(self, q: Rational) -> "RationalInterval":
        return RationalInterval(self.lo + q, self.hi + q)

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other: Union["RationalInterval", Rational]) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo + other.lo, self.hi + other.hi)
        return self.shift(other)

    __radd__ = __add__

    def __sub__(self, other: Union["RationalInterval", Rational]) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return RationalInterval(self.lo - other.hi, self.hi - other.lo)
        return self.shift(-other)


class _GrowingTable:
    """Append-only integer sequence a(0), a(1), ... extended by a recurrence.

    A single writer extends the table under a lock; completed prefixes are
    never modified, so readers may share them freely.
    """

    def __init__(self, seed: List[int], step):
        self._values = list(seed)
        self._step = step
        self._lock = threading.Lock()

    def __getitem__(self, k: int) -> int:
        if k >= len(self._values):
            with self._lock:
                while len(self._values) <= k:
                    n = len(self._values)
                    self._values.append(self._step(n, self._values[n - 1]))
        return self._values[k]


_FACTORIALS = _GrowingTable([1], lambda n, prev: n * prev)
_DERANGEMENTS = _GrowingTable([1], lambda n, prev: n * prev + (-1) ** n)


def _check_nonneg(name: str, k: int):
    if k < 0:
        raise PreconditionError(f"{name} requires k >= 0, got {k}")


def factorial(k: int) -> int:
    """k! as an exact integer"""
    _check_nonneg("factorial", k)
    return _FACTORIALS[k]


def derangement(k: int) -> int:
    """Derangement number !k via !k = k*!(k-1) + (-1)^k, !0 = 1"""
    _check_nonneg("derangement", k)
    return _DERANGEMENTS[k]


def alternating_exp_partial(n: int) -> Fraction:
    """E_n = sum_{l=0}^{n} (-1)^l / l!, the truncation of 1/e"""
    _check_nonneg("alternating_exp_partial", n)
    return Fraction(derangement(n), factorial(n))


def derangement_by_sum(k: int) -> Fraction:
    """Defining sum k! * sum_{l=0}^{k} (-1)^l / l!, evaluated term by term"""
    _check_nonneg("derangement_by_sum", k)
    total = Fraction(0)
    for ell in range(k + 1):
        total += Fraction((-1) ** ell, factorial(ell))
    return factorial(k) * total


class StirlingTable:
    """Signed Stirling numbers of the first kind, s(k, n).

    Stored column by column: column n holds s(k, n) for every k computed so
    far. Extending column n to row k needs column n-1 to row k-1 only, so
    requests for small n never pay for the full triangle.
    """

    def __init__(self):
        # column 0 is s(k, 0) = [k == 0]
        self._columns: List[List[int]] = [[1]]
        self._lock = threading.Lock()

    def _extend(self, k: int, n: int):
        while len(self._columns) <= n:
            self._columns.append([0])
        for j in range(1, n + 1):
            prev = self._columns[j - 1]
            col = self._columns[j]
            while len(col) <= k:
                i = len(col) - 1
                # s(i+1, j) = s(i, j-1) - i * s(i, j)
                below = prev[i] if i < len(prev) else 0
                col.append(below - i * col[i])
        return self._columns[n][k]

    def get(self, k: int, n: int) -> int:
        if n < 1 or n > k:
            raise PreconditionError(f"stirling_first requires 1 <= n <= k, got k={k}, n={n}")
        cols = self._columns
        if n < len(cols) and k < len(cols[n]):
            return cols[n][k]
        with self._lock:
            return self._extend(k, n)

    def row(self, k: int, n_max: int) -> List[int]:
        """[s(k, 1), ..., s(k, n_max)]"""
        return [self.get(k, n) for n in range(1, min(n_max, k) + 1)]


_STIRLING = StirlingTable()


def stirling_first(k: int, n: int) -> int:
    """Signed Stirling number of the first kind s(k, n), 1 <= n <= k"""
    return _STIRLING.get(k, n)


def scaled_tail_enclosure(k: int, extra_terms: int) -> RationalInterval:
    """Exact enclosure of rho_k = (-1)^(k+1) (k+1)! R(k).

    rho_k = 1 - 1/(k+2) + 1/((k+2)(k+3)) - ... ; the endpoints are the
    partial sums with extra_terms - 1 and extra_terms terms.
    """
    if k < 1:
        raise PreconditionError(f"tail enclosure requires k >= 1, got {k}")
    if extra_terms < 2:
        raise PreconditionError(f"tail enclosure requires extra_terms >= 2, got {extra_terms}")
    partial = Fraction(0)
    term = Fraction(1)
    previous = partial
    for i in range(extra_terms):
        previous = partial
        partial += term if i % 2 == 0 else -term
        term /= k + 2 + i
    return RationalInterval.between(previous, partial)


def e_tail_enclosure(k: int, extra_terms: int) -> RationalInterval:
    """Exact enclosure of R(k) = sum_{l=k+1}^inf (-1)^l / l!.

    Endpoints are consecutive partial sums of the tail, so the width is
    exactly 1/(k + extra_terms)! and !k/k! - 1/e = -R(k).
    """
    scaled = scaled_tail_enclosure(k, extra_terms)
    sign = 1 if (k + 1) % 2 == 0 else -1
    return scaled.scale(Fraction(sign, factorial(k + 1)))


def tail_terms_for_digits(k: int, digits: int) -> int:
    """Number of tail terms that pins rho_k down to 10^-digits"""
    target = 10 ** digits
    product = 1
    j = 1
    while product <= target:
        product *= k + 1 + j
        j += 1
    return max(j, 2)


def telescoping_sum(m: int, K: int) -> Fraction:
    """sum_{k=2}^{K} [(k-1)!/(k+m-1)! - k!/(k+m)!], summed term by term.

    Telescopes to 1/(m+1)! - K!/(K+m)!.
    """
    if m < 1:
        raise PreconditionError(f"telescoping_sum requires m >= 1, got {m}")
    if K < 2:
        raise PreconditionError(f"telescoping_sum requires K >= 2, got {K}")
    total = Fraction(0)
    for k in range(2, K + 1):
        # (k-1)!/(k+m-1)! = 1 / (k (k+1) ... (k+m-1))
        total += Fraction(1, math.prod(range(k, k + m))) - Fraction(1, math.prod(range(k + 1, k + m + 1)))
    return total


def telescoping_closed_form(m: int, K: int) -> Fraction:
    return Fraction(1, factorial(m + 1)) - Fraction(factorial(K), factorial(K + m))


@log_result()
def telescoping_mismatches(m_max: int = 50, K_max: int = 500) -> List[Tuple[int, int]]:
    """Every (m, K) with m <= m_max, 2 <= K <= K_max where the running sum misses the closed form.

    One pass per m: the sum up to K extends the sum up to K - 1 by one term.
    """
    if m_max < 1 or K_max < 2:
        raise PreconditionError(f"telescoping grid needs m_max >= 1 and K_max >= 2, got {m_max}, {K_max}")
    mismatches = []
    for m in range(1, m_max + 1):
        total = Fraction(0)
        for K in range(2, K_max + 1):
            total += Fraction(1, math.prod(range(K, K + m))) - Fraction(1, math.prod(range(K + 1, K + m + 1)))
            if total != telescoping_closed_form(m, K):
                mismatches.append((m, K))
    return mismatches


def partial_fraction_split(m: int) -> Tuple[Fraction, Fraction]:
    """(1/(m m!), 1/(m+1)!) with 1/(m (m+1)!) = first - second"""
    if m < 1:
        raise PreconditionError(f"partial_fraction_split requires m >= 1, got {m}")
    return Fraction(1, m * factorial(m)), Fraction(1, factorial(m + 1))


def partial_fraction_residual(m: int) -> Fraction:
    first, second = partial_fraction_split(m)
    return Fraction(1, m * factorial(m + 1)) - (first - second)
