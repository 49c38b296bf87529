"""
Moments of the standard Gumbel distribution, density exp(-x - e^-x).

With v = e^-x every integral becomes int (-ln v)^n e^-v dv over (0, 1),
(1, inf) or (0, inf); the logarithmic endpoint singularity at v = 0 is left
to the tanh-sinh rule. QuadratureConfig(transform="none") integrates in x.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np
from mpmath import mp, mpf

from .combinatorics import factorial
from .decorators import log_experiment
from .errors import PreconditionError, RangeError, ToleranceNotMetError
from .precision import PrecisionConfig, PrecisionReal, const_e
from .quadrature import QuadratureConfig, integrate

logger = logging.getLogger(__name__)

MAX_ORDER = 12
MC_BLOCK_SIZE = 65536
# j + 1/2 stays exact below 2^52, so the largest uniform is 1 - 2^-53
UNIFORM_STEPS = 2 ** 52
MC_MIN_SAMPLES = 10 ** 4


def _check_order(n: int):
    if not isinstance(n, int) or not 0 <= n <= MAX_ORDER:
        raise RangeError(f"moment order must lie in [0, {MAX_ORDER}], got {n!r}", n)


def _log_power(n: int):
    return lambda v: (-mp.log(v)) ** n


def _density_power(n: int):
    return lambda x: x ** n * mp.exp(-x - mp.exp(-x))


def moment_full(n: int, config: Optional[PrecisionConfig] = None,
                quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """gamma^(n) = E[X^n]"""
    _check_order(n)
    config = config or PrecisionConfig()
    quad = quad or QuadratureConfig()
    if quad.transform == "none":
        return integrate(_density_power(n), [-mp.inf, 0, mp.inf], config, quad, label=f"E[X^{n}]")
    power = _log_power(n)
    return integrate(lambda v: power(v) * mp.exp(-v), [0, 1, mp.inf], config, quad, label=f"E[X^{n}]")


def _nonpositive_integral(n: int, config: PrecisionConfig, quad: QuadratureConfig) -> PrecisionReal:
    """int_{x<=0} x^n exp(-x - e^-x) dx"""
    if quad.transform == "none":
        return integrate(_density_power(n), [-mp.inf, -1, 0], config, quad, label=f"E[X^{n}; X<=0]")
    power = _log_power(n)
    return integrate(lambda v: power(v) * mp.exp(-v), [1, 2, mp.inf], config, quad, label=f"E[X^{n}; X<=0]")


def moment_conditional(n: int, config: Optional[PrecisionConfig] = None,
                       quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """delta^(n) = -e int_{-inf}^0 x^n exp(-x - e^-x) dx"""
    _check_order(n)
    config = config or PrecisionConfig()
    quad = quad or QuadratureConfig()
    return -(const_e(config) * _nonpositive_integral(n, config, quad))


def positive_moment_series(n: int, config: PrecisionConfig) -> PrecisionReal:
    """n! sum_{k>=1} (-1)^(k+1) / (k^n k!) in exact rationals, radius = first omitted term"""
    _check_order(n)
    threshold = Fraction(1, 10 ** (config.working_digits + 2))
    total = Fraction(0)
    k = 1
    while True:
        term = Fraction(1, k ** n * factorial(k))
        if term < threshold:
            break
        total += term if k % 2 else -term
        k += 1
    scale = factorial(n)
    value = PrecisionReal.from_rational(scale * total, config)
    return value + PrecisionReal(0, mp.fdiv(scale, k ** n * factorial(k), rounding="u"), config)


def positive_moment_quadrature(n: int, config: PrecisionConfig,
                               quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """int_0^inf x^n exp(-x - e^-x) dx"""
    _check_order(n)
    quad = quad or QuadratureConfig()
    if quad.transform == "none":
        return integrate(_density_power(n), [0, 1, mp.inf], config, quad, label=f"E[(X+)^{n}]")
    power = _log_power(n)
    return integrate(lambda v: power(v) * mp.exp(-v), [0, 1], config, quad, label=f"E[(X+)^{n}]")


def moment_positive_routes(n: int, config: Optional[PrecisionConfig] = None,
                           quad: Optional[QuadratureConfig] = None) -> Dict[str, PrecisionReal]:
    config = config or PrecisionConfig()
    return {
        "series": positive_moment_series(n, config),
        "quadrature": positive_moment_quadrature(n, config, quad),
    }


def moment_positive(n: int, config: Optional[PrecisionConfig] = None,
                    quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """E[(X+)^n]; the series value, cross-checked against quadrature"""
    config = config or PrecisionConfig()
    routes = moment_positive_routes(n, config, quad)
    gap = routes["series"].distance(routes["quadrature"])
    tolerance = (quad or QuadratureConfig()).target(config) * 10
    if gap > tolerance:
        raise ToleranceNotMetError(
            f"E[(X+)^{n}]: series and quadrature disagree by {mp.nstr(gap, 5)}",
            achieved=gap, tolerance=tolerance,
        )
    return routes["series"]


def prob_nonpositive(config: Optional[PrecisionConfig] = None,
                     quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """Pr{X <= 0}"""
    config = config or PrecisionConfig()
    return _nonpositive_integral(0, config, quad or QuadratureConfig())


def e_function(n: int, t, config: Optional[PrecisionConfig] = None,
               quad: Optional[QuadratureConfig] = None) -> PrecisionReal:
    """F_n(t) = int_0^inf x^n exp(-x - t e^-x) dx = int_0^1 (-ln v)^n e^(-t v) dv"""
    _check_order(n)
    config = config or PrecisionConfig()
    t = t if isinstance(t, PrecisionReal) else PrecisionReal.exact(t, config)
    if t.value - t.radius < 0:
        raise PreconditionError(f"e_function needs t >= 0, got {t!r}")
    quad = quad or QuadratureConfig()
    tv = t.value
    if quad.transform == "none":
        value = integrate(lambda x: x ** n * mp.exp(-x - tv * mp.exp(-x)), [0, 1, mp.inf],
                          config, quad, label=f"F_{n}")
    else:
        power = _log_power(n)
        value = integrate(lambda v: power(v) * mp.exp(-tv * v), [0, 1], config, quad, label=f"F_{n}")
    # |dF/dt| <= int_0^1 (-ln v)^n dv = n!
    return value + PrecisionReal(0, t.radius * factorial(n), config)


# -- reports ----------------------------------------------------------------

@dataclass
class MonteCarloMoments:
    n: int
    samples: int
    seed: int
    full: Tuple[float, float]
    positive_part: Tuple[float, float]
    nonpositive: Tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n, "samples": self.samples, "seed": self.seed,
            "full": {"mean": self.full[0], "std_error": self.full[1]},
            "positive_part": {"mean": self.positive_part[0], "std_error": self.positive_part[1]},
            "nonpositive": {"mean": self.nonpositive[0], "std_error": self.nonpositive[1]},
        }


@dataclass
class MomentReport:
    n: int
    full: PrecisionReal
    conditional: PrecisionReal
    positive_part: PrecisionReal
    routes: Dict[str, Dict[str, PrecisionReal]]
    identity_residual: mpf
    monte_carlo: Optional[MonteCarloMoments] = field(default=None)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "full": self.full.to_dict(),
            "conditional": self.conditional.to_dict(),
            "positive_part": self.positive_part.to_dict(),
            "routes": {name: {route: v.nstr(30) for route, v in values.items()}
                       for name, values in self.routes.items()},
            "identity_residual": mp.nstr(self.identity_residual, 5),
            "monte_carlo": self.monte_carlo.to_dict() if self.monte_carlo else None,
        }


def _mean_and_error(total: float, total_sq: float, count: int) -> Tuple[float, float]:
    mean = total / count
    variance = max(total_sq - count * mean * mean, 0.0) / (count - 1)
    return mean, math.sqrt(variance / count)


def open_uniforms(j: np.ndarray) -> np.ndarray:
    """(j + 1/2) / 2^52 for integers 0 <= j < 2^52, strictly inside (0, 1) in binary64"""
    return (np.asarray(j, dtype=np.uint64) + 0.5) / float(UNIFORM_STEPS)


@log_experiment()
def monte_carlo_moments(n: int, samples: int, seed: int) -> MonteCarloMoments:
    """Sample moments of X^n, (X+)^n and 1{X <= 0} by inverse-CDF sampling X = -ln(-ln U).

    Block i of 65536 samples draws from PCG64 seeded by the i-th child of
    SeedSequence(seed); uniforms come from open_uniforms. Block sums are
    reduced in block order.
    """
    _check_order(n)
    if samples < MC_MIN_SAMPLES:
        raise PreconditionError(f"monte_carlo_moments needs at least {MC_MIN_SAMPLES} samples, got {samples}")
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise PreconditionError(f"seed must be a 64-bit nonnegative integer, got {seed!r}")

    blocks = -(-samples // MC_BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(blocks)
    sums = {name: ([], []) for name in ("full", "positive_part", "nonpositive")}
    remaining = samples
    for child in children:
        size = min(MC_BLOCK_SIZE, remaining)
        remaining -= size
        rng = np.random.Generator(np.random.PCG64(child))
        u = open_uniforms(rng.integers(0, UNIFORM_STEPS, size=size, dtype=np.uint64))
        x = -np.log(-np.log(u))
        values = {
            "full": x ** n,
            "positive_part": np.where(x > 0, x, 0.0) ** n if n else (x > 0).astype(float),
            "nonpositive": (x <= 0).astype(float),
        }
        for name, arr in values.items():
            sums[name][0].append(float(np.sum(arr)))
            sums[name][1].append(float(np.sum(arr * arr)))

    stats = {name: _mean_and_error(math.fsum(s), math.fsum(sq), samples) for name, (s, sq) in sums.items()}
    return MonteCarloMoments(n, samples, seed, stats["full"], stats["positive_part"], stats["nonpositive"])


@log_experiment()
def moment_report(n: int, config: Optional[PrecisionConfig] = None,
                  quad: Optional[QuadratureConfig] = None,
                  samples: Optional[int] = None, seed: Optional[int] = None) -> MomentReport:
    """All routes for order n and the residual of gamma^(n) + delta^(n)/e = E[(X+)^n]"""
    _check_order(n)
    config = config or PrecisionConfig()
    full = moment_full(n, config, quad)
    conditional = moment_conditional(n, config, quad)
    positive_routes = moment_positive_routes(n, config, quad)
    positive = positive_routes["series"]
    residual = (full + conditional / const_e(config) - positive).distance(PrecisionReal(0, 0, config))
    monte_carlo = None
    if samples is not None:
        if seed is None:
            raise PreconditionError("a Monte Carlo route needs an explicit seed")
        monte_carlo = monte_carlo_moments(n, samples, seed)
    return MomentReport(
        n=n,
        full=full,
        conditional=conditional,
        positive_part=positive,
        routes={
            "full": {"quadrature": full},
            "conditional": {"quadrature": conditional},
            "positive_part": positive_routes,
        },
        identity_residual=residual,
        monte_carlo=monte_carlo,
    )
