"""
The coefficient alpha in S_gamma + alpha * S_delta, and exact linear forms a + b*alpha.

Alpha keeps 1/e symbolic: the reciprocal_e kind is 1/e plus an exact rational
offset, and every gap !k/k! - alpha it produces is built from the exact tail
enclosure instead of a subtraction of two nearly equal numbers.
"""
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .combinatorics import (
    RationalInterval,
    derangement,
    e_tail_enclosure,
    factorial,
    scaled_tail_enclosure,
    tail_terms_for_digits,
)
from .errors import PreconditionError
from .precision import PrecisionConfig, PrecisionReal, reciprocal_e

Weight = Union[int, Fraction]

_RECIPROCAL_E = re.compile(r"^1\s*/\s*e(?:\s*([+-])\s*(\S.*))?$")


class AlphaKind(Enum):
    RATIONAL = "rational"
    RECIPROCAL_E = "reciprocal_e"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Alpha:
    """alpha as an exact rational, as 1/e + exact offset, or as a PrecisionReal"""

    kind: AlphaKind
    rational: Fraction = Fraction(0)
    numeric: Optional[PrecisionReal] = None

    @classmethod
    def exact(cls, q: Union[int, Fraction, str]) -> "Alpha":
        return cls(AlphaKind.RATIONAL, Fraction(q))

    @classmethod
    def reciprocal_e(cls, offset: Union[int, Fraction] = 0) -> "Alpha":
        return cls(AlphaKind.RECIPROCAL_E, Fraction(offset))

    @classmethod
    def from_real(cls, x: PrecisionReal) -> "Alpha":
        return cls(AlphaKind.NUMERIC, Fraction(0), x)

    @property
    def is_reciprocal_e(self) -> bool:
        """True only for exactly 1/e"""
        return self.kind is AlphaKind.RECIPROCAL_E and self.rational == 0

    @property
    def is_exact(self) -> bool:
        return self.kind is not AlphaKind.NUMERIC

    def value(self, config: PrecisionConfig) -> PrecisionReal:
        if self.kind is AlphaKind.RATIONAL:
            return PrecisionReal.from_rational(self.rational, config)
        if self.kind is AlphaKind.RECIPROCAL_E:
            base = reciprocal_e(config)
            return base if self.rational == 0 else base + self.rational
        return self.numeric.with_config(config)

    def offset_from_reciprocal_e(self, config: PrecisionConfig) -> PrecisionReal:
        """alpha - 1/e"""
        if self.kind is AlphaKind.RECIPROCAL_E:
            return PrecisionReal.from_rational(self.rational, config)
        return self.value(config) - reciprocal_e(config)

    def gap_enclosure(self, k: int, extra_terms: int = 30) -> RationalInterval:
        """Exact interval holding !k/k! - alpha"""
        if self.kind is AlphaKind.RATIONAL:
            return RationalInterval.point(Fraction(derangement(k), factorial(k)) - self.rational)
        if self.kind is AlphaKind.RECIPROCAL_E:
            # !k/k! - 1/e = -R(k)
            return -e_tail_enclosure(k, extra_terms) - self.rational
        raise PreconditionError("an exact gap needs a rational or 1/e-based alpha")

    def weighted_gap(self, weight: Weight, k: int, config: PrecisionConfig) -> PrecisionReal:
        """weight * (!k/k! - alpha) at the configured precision"""
        weight = Fraction(weight)
        wn, wd = weight.numerator, weight.denominator
        if self.kind is AlphaKind.RATIONAL:
            num, den = self.rational.numerator, self.rational.denominator
            kf = factorial(k)
            return PrecisionReal.from_ratio(wn * (derangement(k) * den - kf * num), wd * kf * den, config)
        if self.kind is AlphaKind.RECIPROCAL_E:
            # !k/k! - 1/e = (-1)^k rho_k / (k+1)!
            rho = PrecisionReal.from_interval(
                scaled_tail_enclosure(k, tail_terms_for_digits(k, config.working_digits)), config
            )
            sign = 1 if k % 2 == 0 else -1
            gap = PrecisionReal.from_ratio(sign * wn, wd * factorial(k + 1), config) * rho
            if self.rational:
                gap = gap - PrecisionReal.from_rational(weight * self.rational, config)
            return gap
        ratio = PrecisionReal.from_ratio(wn * derangement(k), wd * factorial(k), config)
        return ratio - self.numeric.with_config(config) * weight

    def __str__(self) -> str:
        if self.kind is AlphaKind.RATIONAL:
            return str(self.rational)
        if self.kind is AlphaKind.RECIPROCAL_E:
            if self.rational == 0:
                return "1/e"
            sign = "+" if self.rational > 0 else "-"
            return f"1/e{sign}{abs(self.rational)}"
        return self.numeric.nstr(20)


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"not an exact rational or decimal: {text!r}")


def parse_alpha(text: str) -> Alpha:
    """Parse "1/3", "0.3", "1e-3", "1/e", "1/e+1e-8" or "1/e-1/1000"; decimals stay exact"""
    if not isinstance(text, str) or not text.strip():
        raise PreconditionError(f"empty alpha string: {text!r}")
    cleaned = text.strip().lower()
    match = _RECIPROCAL_E.match(cleaned)
    if match:
        sign, rest = match.groups()
        if sign is None:
            return Alpha.reciprocal_e()
        offset = _parse_rational(rest)
        return Alpha.reciprocal_e(offset if sign == "+" else -offset)
    if "e" in cleaned and not re.match(r"^[+-]?[\d.]+e[+-]?\d+$", cleaned):
        raise PreconditionError(f"unrecognised alpha string: {text!r}")
    return Alpha.exact(_parse_rational(cleaned))


@dataclass(frozen=True)
class LinearFormCoefficient:
    """Exact linear form a + b*alpha"""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __add__(self, other: "LinearFormCoefficient") -> "LinearFormCoefficient":
        return LinearFormCoefficient(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "LinearFormCoefficient") -> "LinearFormCoefficient":
        return LinearFormCoefficient(self.a - other.a, self.b - other.b)

    def scale(self, q: Weight) -> "LinearFormCoefficient":
        return LinearFormCoefficient(self.a * q, self.b * q)

    def exact_at(self, q: Union[int, Fraction]) -> Fraction:
        return self.a + self.b * Fraction(q)

    def zero_crossing(self) -> Optional[Fraction]:
        """The alpha at which the form vanishes, None when b = 0"""
        if self.b == 0:
            return None
        return -self.a / self.b

    def at(self, alpha: Alpha, config: PrecisionConfig) -> PrecisionReal:
        """Substitute alpha; exact alphas go through exact arithmetic first"""
        if alpha.kind is AlphaKind.RATIONAL:
            return PrecisionReal.from_rational(self.exact_at(alpha.rational), config)
        if alpha.kind is AlphaKind.RECIPROCAL_E:
            base = PrecisionReal.from_rational(self.exact_at(alpha.rational), config)
            if self.b == 0:
                return base
            return base + reciprocal_e(config) * self.b
        return PrecisionReal.from_rational(self.a, config) + alpha.value(config) * self.b
