"""
Reference evaluations of Ein, Ei, the Euler-Mascheroni constant gamma and the
Euler-Gompertz constant delta, each by at least two independent routes.

gamma is never derived from the identity gamma + delta/e = Ein(1): its primary
route is Euler-Maclaurin on harmonic numbers, so that identity stays a test.
"""
import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from mpmath import mp, mpf

from .decorators import log_experiment
from .errors import PoleError, PreconditionError, RangeError, ToleranceNotMetError
from .precision import PrecisionConfig, PrecisionReal, const_e, eval_ln
from .quadrature import Z_MAX, QuadratureConfig, integrate

logger = logging.getLogger(__name__)

CONSTANT_NAMES = ("gamma", "delta", "ein1", "ei1")


def _exponential_series(x: mpf, digits: int) -> Tuple[mpf, mpf]:
    """(sum, error bound) of sum x^k/(k k!) accurate to about 10^-digits absolute"""
    # terms of size e^|x| cancel down to O(1) for negative x
    with mp.workdps(digits + int(float(abs(x)) / math.log(10)) + 5):
        target = mpf(10) ** (-(digits + 2))
        power = x  # x^k / k!
        terms = []
        k = 1
        while True:
            term = power / k
            terms.append(term)
            # past k >= 2|x| successive terms at least halve, so the tail is < 2|next|
            if k + 1 >= 2 * abs(x) and abs(term) < target:
                break
            k += 1
            power = power * x / k
        total = mp.fsum(terms)
        next_term = abs(power * x / (k + 1)) / (k + 1)
        peak = max(abs(t) for t in terms)
        error = 2 * next_term + (len(terms) + 1) * peak * mp.eps
    return total, error


def sigma(x: mpf) -> mpf:
    """sum x^k/(k k!) at the current mpmath precision, for quadrature integrands"""
    return +_exponential_series(x, mp.dps)[0]


def exponential_series(z: PrecisionReal) -> PrecisionReal:
    """sum_{k>=1} z^k / (k k!) = -Ein(-z), with truncation, rounding and input error in the radius"""
    config = z.config
    total, error = _exponential_series(z.value, config.working_digits)
    with mp.workdps(config.working_digits + 10):
        # d/dz of the series is (e^z - 1)/z, bounded by e^|z|
        error += z.radius * mp.exp(abs(z.value) + z.radius)
    return PrecisionReal.rounded(total, config, extra_radius=error)


def ein(z: PrecisionReal) -> PrecisionReal:
    """Ein(z) = sum_{k>=1} (-1)^(k+1) z^k / (k k!)"""
    return -exponential_series(-z)


def ei(z: PrecisionReal) -> PrecisionReal:
    """Ei(z) = gamma + ln|z| + sum z^k/(k k!) for 0 < |z| <= Z_MAX"""
    if z.value == 0 or abs(z.value) <= z.radius:
        raise PoleError(f"Ei has a logarithmic pole at 0, got {z!r}", z.value)
    if abs(z.value) > Z_MAX:
        raise RangeError(
            f"|z| = {z.nstr(8)} exceeds Z_max = {Z_MAX}; use pyborel.borel.ei_asymptotic", z.value
        )
    return euler_gamma(z.config) + eval_ln(abs(z)) + exponential_series(z)


@functools.lru_cache(maxsize=None)
def _gamma_euler_maclaurin(config: PrecisionConfig) -> PrecisionReal:
    with config.workdps():
        n = max(10, config.working_digits)
        threshold = mpf(10) ** (-(config.working_digits + 2))
        terms = [mp.fsum(mp.fdiv(1, j) for j in range(1, n + 1)), -mp.log(n), -mp.fdiv(1, 2 * n)]
        k = 1
        while True:
            p, q = mp.bernfrac(2 * k)
            term = mp.fdiv(p, q * 2 * k * n ** (2 * k))
            if abs(term) < threshold:
                break
            terms.append(term)
            k += 1
        value = mp.fsum(terms)
        # remainder is bounded by the first omitted correction
        radius = abs(term) + (n + k + 3) * mp.eps
    return PrecisionReal.rounded(value, config, extra_radius=radius)


def euler_gamma(config: Optional[PrecisionConfig] = None) -> PrecisionReal:
    """gamma = H_N - ln N - 1/(2N) + sum B_2k / (2k N^2k)"""
    return _gamma_euler_maclaurin(config or PrecisionConfig())


def gamma_by_quadrature(config: PrecisionConfig, quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """gamma = -int_0^inf ln(t) e^-t dt"""
    return integrate(lambda t: -mp.log(t) * mp.exp(-t), [0, 1, mp.inf], config, quad, label="gamma")


@functools.lru_cache(maxsize=32)
def _delta_quadrature(config: PrecisionConfig, quad: Optional[QuadratureConfig]) -> PrecisionReal:
    return integrate(lambda t: mp.exp(-t) / (t + 1), [0, 1, mp.inf], config, quad, label="delta")


def gompertz_delta(config: Optional[PrecisionConfig] = None,
                   quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """delta = int_0^inf e^-t / (t + 1) dt by quadrature"""
    return _delta_quadrature(config or PrecisionConfig(), quad)


def delta_by_ei(config: PrecisionConfig) -> PrecisionReal:
    """delta = -e Ei(-1)"""
    return -(const_e(config) * ei(PrecisionReal(-1, 0, config)))


def ein1_by_integral(config: PrecisionConfig, quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """Ein(1) = int_0^1 (1 - e^-t)/t dt"""
    return integrate(lambda t: -mp.expm1(-t) / t, [0, 1], config, quad, label="ein1")


def _library(fn: Callable[[], mpf]) -> Callable[[PrecisionConfig, Optional[QuadratureConfig]], PrecisionReal]:
    def route(config, quad=None):
        with config.workdps():
            return PrecisionReal.rounded(fn(), config, extra_radius=mp.eps * 4)
    return route


_ROUTES: Dict[str, Tuple[Tuple[str, Callable], ...]] = {
    "gamma": (
        ("euler-maclaurin", lambda cfg, quad: euler_gamma(cfg)),
        ("laplace-quadrature", gamma_by_quadrature),
        ("library", _library(lambda: +mp.euler)),
    ),
    "delta": (
        ("defining-integral", gompertz_delta),
        ("ei-series", lambda cfg, quad: delta_by_ei(cfg)),
        ("library", _library(lambda: mp.e * mp.e1(1))),
    ),
    "ein1": (
        ("power-series", lambda cfg, quad: ein(PrecisionReal(1, 0, cfg))),
        ("integral", ein1_by_integral),
    ),
    "ei1": (
        ("series", lambda cfg, quad: ei(PrecisionReal(1, 0, cfg))),
        ("library", _library(lambda: mp.ei(1))),
    ),
}


@dataclass
class ConstantReport:
    name: str
    routes: List[Tuple[str, PrecisionReal]]
    max_pairwise_discrepancy: mpf = field(default=None)

    def __post_init__(self):
        if len(self.routes) < 2:
            raise PreconditionError(f"{self.name}: a constant report needs at least two routes")
        if self.max_pairwise_discrepancy is None:
            self.max_pairwise_discrepancy = max(
                a.distance(b) for (_, a), (_, b) in itertools.combinations(self.routes, 2)
            )

    @property
    def value(self) -> PrecisionReal:
        return self.routes[0][1]

    def route(self, name: str) -> PrecisionReal:
        for route_name, value in self.routes:
            if route_name == name:
                return value
        raise KeyError(name)

    def check(self, tolerance) -> "ConstantReport":
        if self.max_pairwise_discrepancy >= tolerance:
            raise ToleranceNotMetError(
                f"{self.name}: routes disagree by {mp.nstr(self.max_pairwise_discrepancy, 5)}",
                achieved=self.max_pairwise_discrepancy, tolerance=tolerance,
            )
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value.nstr(),
            "routes": {name: value.to_dict() for name, value in self.routes},
            "max_pairwise_discrepancy": mp.nstr(self.max_pairwise_discrepancy, 5),
        }


@log_experiment()
def constant_report(name: str, config: Optional[PrecisionConfig] = None,
                    quad: Optional[QuadratureConfig] = None) -> ConstantReport:
    """Evaluate one constant by every route registered for it"""
    if name not in _ROUTES:
        raise PreconditionError(f"unknown constant {name!r}, expected one of {CONSTANT_NAMES}")
    config = config or PrecisionConfig()
    routes = [(route_name, fn(config, quad)) for route_name, fn in _ROUTES[name]]
    return ConstantReport(name, routes)


@log_experiment()
def identity_residuals(config: Optional[PrecisionConfig] = None,
                       quad: Optional[QuadratureConfig] = None) -> Dict[str, PrecisionReal]:
    """|Ein(1) - (gamma + delta/e)| and |delta + e (gamma - Ein(1))|"""
    config = config or PrecisionConfig()
    gamma = euler_gamma(config)
    delta = gompertz_delta(config, quad)
    e = const_e(config)
    ein1 = ein(PrecisionReal(1, 0, config))
    return {
        "ein1_identity": abs(ein1 - (gamma + delta / e)),
        "hardy_identity": abs(delta + e * (gamma - ein1)),
    }
