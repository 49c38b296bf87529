"""
Order-n series S^(n)(alpha) = S_gamma^(n) + alpha S_delta^(n), built on signed
Stirling numbers of the first kind:

    t_k^(n) = (-1)^n n! s(k, n) (!k/k! - alpha),   k >= n.

At n = 1 this is the term of pyborel.series. At alpha = 1/e the sum converges
to E[(X+)^n] for a standard Gumbel X; everywhere else the terms grow
factorially.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np
from mpmath import mp, mpf

from .alpha import Alpha, LinearFormCoefficient
from .borel import StokesEstimate
from .combinatorics import (
    RationalInterval,
    derangement,
    e_tail_enclosure,
    factorial,
    stirling_first,
)
from .decorators import log_experiment
from .errors import PreconditionError
from .precision import PrecisionConfig, PrecisionReal
from .series import PartialSumTrace, as_alpha, build_trace

logger = logging.getLogger(__name__)

MAX_ORDER = 6
MAX_BOUND_INDEX = 2000
STOKES_KINDS = ("gamma", "delta")


def _check_order(n: int):
    if not isinstance(n, int) or not 1 <= n <= MAX_ORDER:
        raise PreconditionError(f"generalized order must lie in [1, {MAX_ORDER}], got {n!r}")


def _check_index(n: int, k: int):
    if k < n:
        raise PreconditionError(f"order-{n} terms start at k = {n}, got k = {k}")


def _weight(n: int, k: int) -> int:
    """(-1)^n n! s(k, n)"""
    return (-1) ** n * factorial(n) * stirling_first(k, n)


@dataclass
class GeneralizedTerm:
    n: int
    k: int
    form: LinearFormCoefficient
    at_alpha: Optional[PrecisionReal] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "a": str(self.form.a),
            "b": str(self.form.b),
            "at_alpha": self.at_alpha.to_dict() if self.at_alpha is not None else None,
        }


def generalized_term(n: int, k: int, alpha=None, config: Optional[PrecisionConfig] = None) -> GeneralizedTerm:
    """Exact linear form (-1)^n n! s(k,n) !k/k! + alpha (-1)^(n+1) n! s(k,n)"""
    _check_order(n)
    _check_index(n, k)
    weight = _weight(n, k)
    form = LinearFormCoefficient(Fraction(weight * derangement(k), factorial(k)), -weight)
    if alpha is None:
        return GeneralizedTerm(n, k, form)
    config = config or PrecisionConfig()
    return GeneralizedTerm(n, k, form, as_alpha(alpha).weighted_gap(weight, k, config))


@log_experiment()
def generalized_partial_sums(n: int, alpha, K: int,
                             config: Optional[PrecisionConfig] = None) -> PartialSumTrace:
    """Trace of S^(n)(alpha) for k = n..K"""
    _check_order(n)
    if K < 10 * n:
        raise PreconditionError(f"generalized_partial_sums needs K >= {10 * n} for n = {n}, got {K}")
    config = config or PrecisionConfig()
    alpha = as_alpha(alpha)
    terms = [alpha.weighted_gap(_weight(n, k), k, config) for k in range(n, K + 1)]
    return build_trace(alpha, terms, start=n, n=n)


@dataclass
class CancellationBound:
    n: int
    k: int
    term: RationalInterval
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.term.magnitude <= self.bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "term_magnitude": float(self.term.magnitude),
            "bound": float(self.bound),
            "holds": self.holds,
        }


def generalized_cancellation_bound(n: int, k: int) -> CancellationBound:
    """Exact enclosure of t_k^(n)(1/e) against n! |s(k,n)| / (k+1)!"""
    _check_order(n)
    _check_index(n, k)
    if k > MAX_BOUND_INDEX:
        raise PreconditionError(f"cancellation bound is certified for k <= {MAX_BOUND_INDEX}, got {k}")
    weight = _weight(n, k)
    # !k/k! - 1/e = -R(k)
    term = (-e_tail_enclosure(k, 3)).scale(weight)
    return CancellationBound(n, k, term, Fraction(abs(weight), factorial(k + 1)))


def _tail_coefficients(n: int) -> tuple:
    """Taylor coefficients at z = 0 of h0 = 1/Gamma(1+z) and h1 = h0 (z(z-1)/2 - 2), to z^(n-1)"""
    h0 = mp.taylor(mp.rgamma, 1, n - 1)
    h1 = []
    for j in range(n):
        c = -2 * h0[j]
        if j >= 1:
            c -= h0[j - 1] / 2
        if j >= 2:
            c += h0[j - 2] / 2
        h1.append(c)
    return h0, h1


def _asymptotic_tail(n: int, K: int, config: PrecisionConfig) -> mpf:
    """sum_{k>K} t_k^(n)(1/e) from |s(k,n)|/(k-1)! ~ [z^(n-1)] k^z (1 + z(z-1)/(2k)) / Gamma(1+z)

    With t_k ~ n! |s(k,n)|/(k-1)! (1/k^2 - 2/k^3) and the sum replaced by the
    integral from K + 1/2, each (ln x)^i / x^2 and (ln x)^i / x^3 piece
    integrates to an upper incomplete gamma function in Y = ln(K + 1/2).
    """
    with config.workdps():
        h0, h1 = _tail_coefficients(n)
        Y = mp.log(mpf(K) + mpf(1) / 2)
        total = mpf(0)
        for i in range(n):
            j = n - 1 - i
            total += (h0[j] * mp.gammainc(i + 1, Y)
                      + h1[j] * mp.gammainc(i + 1, 2 * Y) / mpf(2) ** (i + 1)) / mp.factorial(i)
        return factorial(n) * total


@log_experiment()
def generalized_limit_estimate(n: int, K: int, tail_correction: bool = True,
                               config: Optional[PrecisionConfig] = None) -> PrecisionReal:
    """S^(n)(1/e) from the partial sum at K plus the asymptotic tail.

    The tail radius is a heuristic 10/K times the correction, covering the
    omitted 1/k^4 order of the expansion.
    """
    _check_order(n)
    _check_index(n, K)
    config = config or PrecisionConfig()
    alpha = Alpha.reciprocal_e()
    partial = PrecisionReal.sum(
        (alpha.weighted_gap(_weight(n, k), k, config) for k in range(n, K + 1)), config
    )
    if not tail_correction:
        return partial
    correction = _asymptotic_tail(n, K, config)
    with config.workdps():
        radius = abs(correction) * 10 / K
    return partial + PrecisionReal(correction, radius, config)


# -- Borel side ---------------------------------------------------------------

def combined_borel_coefficient(n: int, k: int) -> RationalInterval:
    """Exact enclosure of the u^k coefficient of B_gamma^(n) + B_delta^(n)/e, t_k^(n)(1/e) / k!"""
    _check_order(n)
    _check_index(n, k)
    gap = Alpha.reciprocal_e().gap_enclosure(k, extra_terms=2)
    return gap.scale(Fraction(_weight(n, k), factorial(k)))


def _log_power_coefficient(n: int, k: int) -> Fraction:
    """n! s(k,n)/k!, the u^k coefficient of (ln(1+u))^n"""
    return Fraction(factorial(n) * stirling_first(k, n), factorial(k))


@log_experiment()
def coefficient_stokes(n: int, kind: str = "gamma", K: int = 40,
                       config: Optional[PrecisionConfig] = None) -> StokesEstimate:
    """Ratio of each Borel coefficient of B^(n) to that of (ln(1+u))^n.

    The delta-kind ratio is (-1)^(n+1) at every k. The gamma-kind ratio is
    (-1)^n !k/k!, which tends to (-1)^n/e with error below 1/(k+1)!; the
    estimate at K carries that bound in its radius.
    """
    _check_order(n)
    if kind not in STOKES_KINDS:
        raise PreconditionError(f"coefficient_stokes kind must be one of {STOKES_KINDS}, got {kind!r}")
    if K < n + 2:
        raise PreconditionError(f"coefficient_stokes needs K >= n + 2, got {K}")
    config = config or PrecisionConfig()

    samples = []
    for k in range(n, K + 1):
        form = generalized_term(n, k).form
        # Borel coefficients are the series coefficients over k!
        series_coefficient = form.b if kind == "delta" else form.a
        ratio = series_coefficient / factorial(k) / _log_power_coefficient(n, k)
        samples.append((mpf(k), PrecisionReal.from_rational(ratio, config)))

    last = samples[-1][1]
    if kind == "delta":
        extrapolated = last
    else:
        with config.workdps():
            extrapolated = last + PrecisionReal(0, mp.fdiv(1, factorial(K + 1), rounding="u"), config)
    return StokesEstimate(f"generalized({n}, {kind})", samples, extrapolated, "coefficient-ratio")


@dataclass
class LogPowerFit:
    n: int
    kind: str
    exponent: float
    constant: float
    window: List[int]

    @property
    def expected(self) -> int:
        return self.n - 1

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n, "kind": self.kind,
            "exponent": self.exponent, "constant": self.constant,
            "expected": self.expected, "window": self.window,
        }


@log_experiment()
def log_power_fit(n: int, kind: str = "delta", K: int = 400) -> LogPowerFit:
    """Least-squares fit of |b_k| k ~ C (ln k)^p over k in [K/2, K].

    The leading asymptotics give p = n - 1; lower-order logarithms pull the
    fitted exponent below that at any finite K.
    """
    _check_order(n)
    if kind not in STOKES_KINDS:
        raise PreconditionError(f"log_power_fit kind must be one of {STOKES_KINDS}, got {kind!r}")
    if K < max(20, 4 * n):
        raise PreconditionError(f"log_power_fit needs K >= {max(20, 4 * n)}, got {K}")

    ks = np.arange(max(K // 2, n), K + 1)
    values = []
    for k in ks:
        coefficient = abs(_log_power_coefficient(n, int(k)))
        if kind == "gamma":
            coefficient *= Fraction(derangement(int(k)), factorial(int(k)))
        values.append(float(coefficient * int(k)))
    y = np.log(np.asarray(values))
    X = np.column_stack([np.ones(len(ks)), np.log(np.log(ks.astype(float)))])
    (log_c, p), _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    logger.debug("log-power fit n=%s kind=%s: p=%s", n, kind, p)
    return LogPowerFit(n, kind, float(p), float(np.exp(log_c)), [int(ks[0]), int(ks[-1])])
