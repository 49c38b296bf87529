"""
Configurable-precision reals with tracked error radii.

A PrecisionReal is a midpoint/radius pair over mpmath floats. Every operation
runs at the working precision of its config (digits + guard digits) and
widens the radius by the propagated input error plus one rounding error.
"""
import functools
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from mpmath import mp, mpf

from .combinatorics import RationalInterval
from .errors import DomainError, PrecisionError, PreconditionError

Number = Union[int, Fraction, float, "mpf", "PrecisionReal"]

DEFAULT_DIGITS = 60
DEFAULT_GUARD_DIGITS = 10


@dataclass(frozen=True)
class PrecisionConfig:
    """Decimal working precision for a computation"""

    digits: int = DEFAULT_DIGITS
    guard_digits: int = DEFAULT_GUARD_DIGITS

    def __post_init__(self):
        if self.digits < 10:
            raise PreconditionError(f"digits must be >= 10, got {self.digits}")
        if self.guard_digits < 5:
            raise PreconditionError(f"guard_digits must be >= 5, got {self.guard_digits}")

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None, **overrides) -> "PrecisionConfig":
        """Build a config from PYBOREL_DIGITS / PYBOREL_GUARD_DIGITS, then apply overrides"""
        environ = os.environ if environ is None else environ
        values = {}
        for field, var in (("digits", "PYBOREL_DIGITS"), ("guard_digits", "PYBOREL_GUARD_DIGITS")):
            raw = environ.get(var)
            if raw:
                try:
                    values[field] = int(raw)
                except ValueError:
                    raise PreconditionError(f"{var} must be an integer, got {raw!r}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def working_digits(self) -> int:
        return self.digits + self.guard_digits

    @property
    def target(self) -> mpf:
        """10^-digits, the radius every finished result should stay under"""
        with self.workdps():
            return mpf(10) ** (-self.digits)

    @property
    def agreement(self) -> mpf:
        """10^-(digits - guard), the tolerance for cross-route agreement"""
        with self.workdps():
            return mpf(10) ** (-(self.digits - self.guard_digits))

    def workdps(self):
        return mp.workdps(self.working_digits)

    def with_digits(self, digits: int) -> "PrecisionConfig":
        return replace(self, digits=digits)


def to_fraction(x: mpf) -> Fraction:
    """Exact rational value of a finite mpf"""
    if not mp.isfinite(x):
        raise DomainError(f"cannot convert non-finite value {x} to a rational", x)
    man, exp = x.man_exp
    q = Fraction(abs(int(man))) * Fraction(2) ** int(exp)
    return -q if x < 0 else q


def _upper(q: Fraction) -> mpf:
    """Nonnegative rational rounded up to the current precision"""
    return mp.fdiv(abs(q.numerator), q.denominator, rounding="u")


def _rounding(v: mpf) -> mpf:
    # one rounding at the current precision plus slack for the radius arithmetic itself
    return abs(v) * mp.eps * 2


class PrecisionReal:
    """Real number v with a rigorous radius r: the true value lies in [v - r, v + r]"""

    __slots__ = ("value", "radius", "config")

    def __init__(self, value, radius=0, config: Optional[PrecisionConfig] = None):
        config = config or PrecisionConfig()
        with config.workdps():
            value = mpf(value)
            radius = abs(mpf(radius))
        if not mp.isfinite(value) or not mp.isfinite(radius):
            raise DomainError(f"non-finite value {value} ± {radius}", value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "config", config)

    def __setattr__(self, name, value):
        raise AttributeError("PrecisionReal is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rational(cls, q: Union[int, Fraction], config: Optional[PrecisionConfig] = None) -> "PrecisionReal":
        config = config or PrecisionConfig()
        q = Fraction(q)
        with config.workdps():
            v = mp.fdiv(q.numerator, q.denominator)
            radius = mpf(0) if to_fraction(v) == q else _rounding(v)
        return cls(v, radius, config)

    @classmethod
    def from_ratio(cls, numerator: int, denominator: int, config: Optional[PrecisionConfig] = None) -> "PrecisionReal":
        """numerator/denominator rounded once, without reducing the fraction first"""
        config = config or PrecisionConfig()
        if denominator == 0:
            raise DomainError("zero denominator", numerator)
        with config.workdps():
            v = mp.fdiv(numerator, denominator)
            return cls(v, _rounding(v), config)

    @classmethod
    def from_interval(cls, interval: RationalInterval, config: Optional[PrecisionConfig] = None) -> "PrecisionReal":
        config = config or PrecisionConfig()
        mid = cls.from_rational(interval.midpoint, config)
        with config.workdps():
            radius = mid.radius + _upper(interval.width / 2)
        return cls(mid.value, radius, config)

    @classmethod
    def exact(cls, value, config: Optional[PrecisionConfig] = None) -> "PrecisionReal":
        """Wrap an int, float or mpf whose value is taken as exact"""
        if isinstance(value, Fraction):
            return cls.from_rational(value, config)
        return cls(value, 0, config)

    @classmethod
    def rounded(cls, value, config: Optional[PrecisionConfig] = None, extra_radius=0) -> "PrecisionReal":
        """Wrap a library result correct up to one rounding, plus any known extra error"""
        config = config or PrecisionConfig()
        with config.workdps():
            v = mpf(value)
            return cls(v, _rounding(v) + abs(mpf(extra_radius)), config)

    @classmethod
    def sum(cls, terms: Iterable["PrecisionReal"], config: Optional[PrecisionConfig] = None) -> "PrecisionReal":
        """Sum in index order with one compensated accumulator"""
        terms = list(terms)
        if config is None:
            config = terms[0].config if terms else PrecisionConfig()
        with config.workdps():
            total = mp.fsum(t.value for t in terms)
            radius = mp.fsum(t.radius for t in terms) + _rounding(total)
        return cls(total, radius, config)

    def _coerce(self, other: Number) -> "PrecisionReal":
        if isinstance(other, PrecisionReal):
            return other
        if isinstance(other, (int, Fraction)):
            return PrecisionReal.from_rational(other, self.config)
        if isinstance(other, (float, mpf)):
            return PrecisionReal(other, 0, self.config)
        return NotImplemented

    def _merged_config(self, other: "PrecisionReal") -> PrecisionConfig:
        return self.config if self.config.working_digits >= other.config.working_digits else other.config

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Number) -> "PrecisionReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        cfg = self._merged_config(other)
        with cfg.workdps():
            v = self.value + other.value
            r = self.radius + other.radius + _rounding(v)
        return PrecisionReal(v, r, cfg)

    __radd__ = __add__

    def __neg__(self) -> "PrecisionReal":
        # exact at any precision, so the radius carries over unchanged
        return PrecisionReal(mp.fneg(self.value, exact=True), self.radius, self.config)

    def __sub__(self, other: Number) -> "PrecisionReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other: Number) -> "PrecisionReal":
        return (-self) + other

    def __mul__(self, other: Number) -> "PrecisionReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        cfg = self._merged_config(other)
        with cfg.workdps():
            a, b = self.value, other.value
            v = a * b
            r = abs(a) * other.radius + abs(b) * self.radius + self.radius * other.radius + _rounding(v)
        return PrecisionReal(v, r, cfg)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "PrecisionReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        cfg = self._merged_config(other)
        with cfg.workdps():
            b = other.value
            if abs(b) <= other.radius:
                raise DomainError(f"division by a value that may be zero: {mp.nstr(b, 10)} ± {mp.nstr(other.radius, 5)}", b)
            v = self.value / b
            r = (self.radius + abs(v) * other.radius) / (abs(b) - other.radius) + _rounding(v)
        return PrecisionReal(v, r, cfg)

    def __rtruediv__(self, other: Number) -> "PrecisionReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int) -> "PrecisionReal":
        if not isinstance(n, int) or n < 0:
            raise PreconditionError(f"only nonnegative integer powers are supported, got {n!r}")
        result = PrecisionReal(1, 0, self.config)
        for _ in range(n):
            result = result * self
        return result

    def __abs__(self) -> "PrecisionReal":
        return -self if self.value < 0 else self

    # -- inspection ---------------------------------------------------------

    @property
    def lower(self) -> mpf:
        with self.config.workdps():
            return self.value - self.radius

    @property
    def upper(self) -> mpf:
        with self.config.workdps():
            return self.value + self.radius

    def is_positive(self) -> bool:
        """True when every point of the enclosure is > 0"""
        return self.lower > 0

    def is_negative(self) -> bool:
        return self.upper < 0

    def enclosure(self) -> RationalInterval:
        """Exact rational interval containing the true value"""
        q = to_fraction(self.value)
        r = to_fraction(self.radius)
        return RationalInterval(q - r, q + r)

    def contains(self, x: Number) -> bool:
        if isinstance(x, PrecisionReal):
            x = x.value
        if isinstance(x, (int, Fraction)):
            return self.enclosure().contains(Fraction(x))
        return self.enclosure().contains(to_fraction(mpf(x)))

    def close_to(self, other: Number, tolerance) -> bool:
        """|self - other| < tolerance, valid only when both radii are below tolerance/4"""
        other = self._coerce(other)
        with self._merged_config(other).workdps():
            tol = mpf(tolerance)
            for operand in (self, other):
                if operand.radius >= tol / 4:
                    raise PrecisionError(
                        f"radius {mp.nstr(operand.radius, 5)} too wide for tolerance {mp.nstr(tol, 5)}"
                    )
            return abs(self.value - other.value) < tol

    def distance(self, other: Number) -> mpf:
        other = self._coerce(other)
        with self._merged_config(other).workdps():
            return abs(self.value - other.value)

    def with_config(self, config: PrecisionConfig) -> "PrecisionReal":
        return PrecisionReal(self.value, self.radius, config)

    def nstr(self, digits: Optional[int] = None) -> str:
        return mp.nstr(self.value, digits or self.config.digits)

    def to_dict(self) -> dict:
        return {"value": self.nstr(), "radius": mp.nstr(self.radius, 5)}

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.nstr()

    def __repr__(self) -> str:
        return f"PrecisionReal({self.nstr(20)} ± {mp.nstr(self.radius, 3)})"


@functools.lru_cache(maxsize=None)
def const_e(config: PrecisionConfig = PrecisionConfig()) -> PrecisionReal:
    """e at the configured precision"""
    with config.workdps():
        return PrecisionReal.rounded(+mp.e, config)


@functools.lru_cache(maxsize=None)
def const_pi(config: PrecisionConfig = PrecisionConfig()) -> PrecisionReal:
    with config.workdps():
        return PrecisionReal.rounded(+mp.pi, config)


@functools.lru_cache(maxsize=None)
def reciprocal_e(config: PrecisionConfig = PrecisionConfig()) -> PrecisionReal:
    """1/e, rounded once instead of divided"""
    with config.workdps():
        return PrecisionReal.rounded(mp.exp(-1), config)


def eval_exp(x: PrecisionReal) -> PrecisionReal:
    """exp(x); radius e^v (e^r - 1) plus rounding"""
    with x.config.workdps():
        v = mp.exp(x.value)
        r = v * mp.expm1(x.radius) + _rounding(v)
    return PrecisionReal(v, r, x.config)


def eval_ln(x: PrecisionReal) -> PrecisionReal:
    """ln(x) for an enclosure lying strictly right of zero"""
    with x.config.workdps():
        if x.value - x.radius <= 0:
            raise DomainError(f"ln of a value that may be nonpositive: {x!r}", x.value)
        v = mp.ln(x.value)
        r = -mp.log1p(-x.radius / x.value) + _rounding(v)
    return PrecisionReal(v, r, x.config)
