"""
The one quadrature code path: mpmath's doubly-exponential (tanh-sinh) rule,
or Gauss-Legendre on request, wrapped so results come back as PrecisionReal
with the achieved error as radius.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from mpmath import mp, mpf
from mpmath.libmp import dps_to_prec

from .errors import PreconditionError, QuadratureError
from .precision import PrecisionConfig, PrecisionReal

logger = logging.getLogger(__name__)

SCHEMES = ("tanh-sinh", "gauss-legendre")
TRANSFORMS = ("log", "none")

# Ei power series is trusted up to |z| <= Z_MAX; the Laplace cut-off stays below it
Z_MAX = 30


@dataclass(frozen=True)
class QuadratureConfig:
    scheme: str = "tanh-sinh"
    node_budget: int = 4096
    tolerance: Optional[float] = None
    transform: str = "log"
    interval_cap: int = 20

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise PreconditionError(f"unknown quadrature scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.transform not in TRANSFORMS:
            raise PreconditionError(f"unknown transform {self.transform!r}, expected one of {TRANSFORMS}")
        if self.node_budget < 16:
            raise PreconditionError(f"node_budget must be >= 16, got {self.node_budget}")
        if not 1 <= self.interval_cap <= Z_MAX - 1:
            raise PreconditionError(f"interval_cap must lie in [1, {Z_MAX - 1}], got {self.interval_cap}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise PreconditionError(f"tolerance must be positive, got {self.tolerance}")

    def max_degree(self, config: PrecisionConfig) -> int:
        """Refinement levels allowed by the node budget, never below mpmath's own guess"""
        prec_bits = dps_to_prec(config.working_digits)
        guess = int(4 + max(0, math.log2(prec_bits / 30.0))) + 2
        return max(guess, int(math.log2(self.node_budget)) - 3)

    def target(self, config: PrecisionConfig) -> mpf:
        if self.tolerance is not None:
            with config.workdps():
                return mpf(self.tolerance)
        return config.agreement

    def with_budget(self, node_budget: int) -> "QuadratureConfig":
        return replace(self, node_budget=node_budget)


def integrate(f: Callable, points: Sequence, config: PrecisionConfig,
              quad: Optional[QuadratureConfig] = None, label: str = "integral") -> PrecisionReal:
    """Integrate f over the piecewise interval given by points.

    Raises QuadratureError when mpmath's error estimate stays above the
    tolerance after the allowed refinement levels.
    """
    quad = quad or QuadratureConfig()
    tolerance = quad.target(config)
    with config.workdps():
        value, error = mp.quad(f, list(points), method=quad.scheme, error=True,
                               maxdegree=quad.max_degree(config))
        error = abs(mpf(error))
        logger.debug("quadrature %s: value=%s error=%s", label, mp.nstr(value, 15), mp.nstr(error, 3))
        if not mp.isfinite(value) or error > tolerance:
            raise QuadratureError(
                f"{label}: quadrature error {mp.nstr(error, 3)} above tolerance {mp.nstr(tolerance, 3)}",
                achieved=error, tolerance=tolerance,
            )
        return PrecisionReal.rounded(value, config, extra_radius=error)
