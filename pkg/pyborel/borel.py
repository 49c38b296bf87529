"""
Borel transforms of S_gamma and S_delta, their Laplace (Borel) sums, the
singularity at u = -1 and the Stokes constants attached to it.

Closed forms never evaluate Ei(u) - ln(u) verbatim. With
sigma(z) = sum z^k/(k k!) = Ei(z) - gamma - ln z they read

    B_gamma(u) = sigma(u) + (sigma(1) - sigma(u+1) - ln(u+1)) / e
    B_delta(u) = ln(u+1)

so B_gamma + B_delta/e = sigma(u) + (sigma(1) - sigma(u+1))/e is regular at -1.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import mp, mpf

from .alpha import Alpha, LinearFormCoefficient, parse_alpha
from .combinatorics import RationalInterval, derangement, factorial
from .decorators import log_experiment
from .errors import DomainError, EstimationError, PreconditionError
from .precision import PrecisionConfig, PrecisionReal, const_e, eval_exp, eval_ln
from .quadrature import Z_MAX, QuadratureConfig, integrate
from .special import ei, euler_gamma, exponential_series, sigma

logger = logging.getLogger(__name__)

TAIL_METHODS = ("telescoping", "asymptotic")


class TransformKind(Enum):
    GAMMA = "gamma"
    DELTA = "delta"
    COMBINED = "combined"

    @classmethod
    def parse(cls, kind: Union["TransformKind", str]) -> "TransformKind":
        if isinstance(kind, cls):
            return kind
        try:
            return cls(str(kind).lower())
        except ValueError:
            raise PreconditionError(f"unknown transform kind {kind!r}, expected gamma, delta or combined")


def _as_alpha(alpha) -> Optional[Alpha]:
    if alpha is None or isinstance(alpha, Alpha):
        return alpha
    if isinstance(alpha, PrecisionReal):
        return Alpha.from_real(alpha)
    if isinstance(alpha, str):
        return parse_alpha(alpha)
    return Alpha.exact(alpha)


# -- coefficients -----------------------------------------------------------

def gamma_coefficient(k: int) -> Fraction:
    """(-1)^k !k / (k k!)"""
    return Fraction((-1) ** k * derangement(k), k * factorial(k))


def delta_coefficient(k: int) -> Fraction:
    """(-1)^(k-1) / k, the u^k coefficient of ln(1+u)"""
    return Fraction((-1) ** (k - 1), k)


@dataclass
class TransformSeries:
    kind: TransformKind
    coefficients: List[LinearFormCoefficient]
    alpha: Optional[Alpha] = None

    @property
    def K(self) -> int:
        return len(self.coefficients)

    def coefficient(self, k: int) -> LinearFormCoefficient:
        """Coefficient of u^k, 1 <= k <= K"""
        return self.coefficients[k - 1]

    def _alpha(self, alpha) -> Alpha:
        alpha = _as_alpha(alpha) or self.alpha
        if alpha is None:
            raise PreconditionError("a combined transform needs alpha to be evaluated")
        return alpha

    def numeric_coefficient(self, k: int, config: PrecisionConfig, alpha=None) -> PrecisionReal:
        form = self.coefficient(k)
        if self.kind is TransformKind.GAMMA:
            return PrecisionReal.from_rational(form.a, config)
        if self.kind is TransformKind.DELTA:
            return PrecisionReal.from_rational(form.b, config)
        # a + b alpha = ((-1)^k / k) (!k/k! - alpha)
        return self._alpha(alpha).weighted_gap(Fraction((-1) ** k, k), k, config)

    def numeric_coefficients(self, config: PrecisionConfig, alpha=None) -> List[PrecisionReal]:
        return [self.numeric_coefficient(k, config, alpha) for k in range(1, self.K + 1)]

    def evaluate(self, u: PrecisionReal, alpha=None) -> PrecisionReal:
        """Truncated series sum_{k<=K} c_k u^k by Horner's rule"""
        total = PrecisionReal(0, 0, u.config)
        for c in reversed(self.numeric_coefficients(u.config, alpha)):
            total = (total + c) * u
        return total

    def remainder_bound(self, u, alpha=None) -> mpf:
        """Bound on |sum_{k>K} c_k u^k| for |u| < 1, from |c_k| <= (1 + |alpha|)/k"""
        config = u.config if isinstance(u, PrecisionReal) else PrecisionConfig()
        with config.workdps():
            x = abs(mpf(u.value if isinstance(u, PrecisionReal) else u))
            if isinstance(u, PrecisionReal):
                x += u.radius
            if x >= 1:
                raise DomainError(f"remainder bound needs |u| < 1, got {x}", x)
            scale = mpf(1)
            if self.kind is TransformKind.COMBINED:
                value = self._alpha(alpha).value(config)
                scale += abs(value.value) + value.radius
            return mp.fdiv(scale * x ** (self.K + 1), (self.K + 1) * (1 - x), rounding="u")


def transform_coefficients(kind, K: int, alpha=None) -> TransformSeries:
    """Exact coefficients of B_gamma, B_delta or B_gamma + alpha B_delta as linear forms in alpha"""
    kind = TransformKind.parse(kind)
    if K < 1:
        raise PreconditionError(f"K must be >= 1, got {K}")
    forms = []
    for k in range(1, K + 1):
        a = gamma_coefficient(k) if kind is not TransformKind.DELTA else Fraction(0)
        b = delta_coefficient(k) if kind is not TransformKind.GAMMA else Fraction(0)
        forms.append(LinearFormCoefficient(a, b))
    return TransformSeries(kind, forms, _as_alpha(alpha))


def combined_coefficient_enclosure(k: int) -> RationalInterval:
    """Exact interval holding the combined coefficient at alpha = 1/e, ((-1)^k/k)(!k/k! - 1/e)"""
    return Alpha.reciprocal_e().gap_enclosure(k, extra_terms=2).scale(Fraction((-1) ** k, k))


def combined_decay_bound(k: int) -> Fraction:
    """1/(k (k+1)!), the bound on |c_k| at alpha = 1/e"""
    return Fraction(1, k * factorial(k + 1))


# -- closed forms -----------------------------------------------------------

def _require_domain(u: PrecisionReal, name: str):
    if u.value - u.radius <= -1:
        raise DomainError(f"{name} is defined for u > -1 only, got {u!r}", u.value)


def ei_asymptotic(z: PrecisionReal) -> PrecisionReal:
    """Ei(z) for large positive z: e^z/z sum m!/z^m truncated at its smallest term"""
    if z.value < 1:
        raise PreconditionError(f"asymptotic Ei needs z >= 1, got {z!r}")
    config = z.config
    with config.workdps():
        x = z.value
        terms = [mpf(1)]
        m = 1
        while True:
            nxt = terms[-1] * m / x
            if nxt >= terms[-1]:
                break
            terms.append(nxt)
            m += 1
        prefactor = mp.exp(x) / x
        value = prefactor * mp.fsum(terms)
        # optimal truncation leaves about sqrt(2 pi z) times the smallest term
        error = prefactor * terms[-1] * mp.sqrt(2 * mp.pi * x)
        # dEi/dz = e^z/z
        error += z.radius * prefactor * mp.exp(z.radius) * 2
    return PrecisionReal.rounded(value, config, extra_radius=error)


def bgamma_closed(u: PrecisionReal) -> PrecisionReal:
    """B_gamma(u) for u > -1, regular at u = 0"""
    _require_domain(u, "B_gamma")
    config = u.config
    e = const_e(config)
    one = PrecisionReal(1, 0, config)
    if u.value + 1 <= Z_MAX:
        return exponential_series(u) + (exponential_series(one) - exponential_series(u + 1) - eval_ln(u + 1)) / e
    return exponential_series(u) + (ei(one) - ei_asymptotic(u + 1)) / e


def bdelta_closed(u: PrecisionReal) -> PrecisionReal:
    """B_delta(u) = ln(u+1)"""
    _require_domain(u, "B_delta")
    return eval_ln(u + 1)


def regular_part(u: PrecisionReal) -> PrecisionReal:
    """B_gamma(u) + B_delta(u)/e without forming either singular summand"""
    _require_domain(u, "the regular part")
    one = PrecisionReal(1, 0, u.config)
    return exponential_series(u) + (exponential_series(one) - exponential_series(u + 1)) / const_e(u.config)


def combined_closed(u: PrecisionReal, alpha) -> PrecisionReal:
    """B_gamma(u) + alpha B_delta(u), written as regular part + (alpha - 1/e) ln(u+1)"""
    alpha = _as_alpha(alpha)
    if alpha.is_reciprocal_e:
        return regular_part(u)
    return regular_part(u) + alpha.offset_from_reciprocal_e(u.config) * bdelta_closed(u)


# -- Laplace sums -----------------------------------------------------------

def delta_laplace_tail(cutoff: int, config: PrecisionConfig) -> PrecisionReal:
    """int_U^inf ln(1+u) e^-u du = e^-U ln(1+U) + e E1(U+1)"""
    U = PrecisionReal(cutoff, 0, config)
    return eval_exp(-U) * eval_ln(U + 1) - const_e(config) * ei(-(U + 1))


def gamma_laplace_tail(cutoff: int, config: PrecisionConfig, quad: Optional[QuadratureConfig] = None,
                       method: str = "telescoping") -> PrecisionReal:
    """int_U^inf B_gamma(u) e^-u du.

    e^-u B_gamma(u) = f(u) - f(u+1) - e^-u (gamma + ln u) + e^-(u+1) Ei(1) with
    f(u) = e^-u Ei(u), so the algebraically decaying part telescopes onto [U, U+1].
    """
    if method not in TAIL_METHODS:
        raise PreconditionError(f"unknown tail method {method!r}, expected one of {TAIL_METHODS}")
    U = PrecisionReal(cutoff, 0, config)
    one = PrecisionReal(1, 0, config)
    if method == "telescoping":
        strip = integrate(lambda u: mp.exp(-u) * (mp.log(u) + sigma(u)), [cutoff, cutoff + 1],
                          config, quad, label="gamma tail strip")
        return (strip - eval_exp(-U) * eval_ln(U)
                + eval_exp(-(U + 1)) * exponential_series(one) + ei(-U))

    # analytic integral of the 1/u expansions of f(u) - f(u+1)
    with config.workdps():
        x = mpf(cutoff)
        pieces = [mp.log((x + 1) / x)]
        m = 1
        while True:
            term = mp.factorial(m - 1) * (x ** (-m) - (x + 1) ** (-m))
            if term >= pieces[-1]:
                break
            pieces.append(term)
            m += 1
        # error estimate: twice the first omitted term
        expansion = PrecisionReal.rounded(mp.fsum(pieces), config, extra_radius=2 * term)
    gamma = euler_gamma(config)
    return (expansion - eval_exp(-U) * (eval_ln(U) + gamma)
            + eval_exp(-(U + 1)) * ei(one) + ei(-U))


def _head(integrand, cutoff: int, config: PrecisionConfig, quad: QuadratureConfig, label: str) -> PrecisionReal:
    return integrate(lambda u: mp.exp(-u) * integrand(u), [0, 1, cutoff], config, quad, label=label)


@log_experiment()
def laplace_borel_sum(kind, alpha=None, quad: Optional[QuadratureConfig] = None,
                      config: Optional[PrecisionConfig] = None,
                      tail_method: str = "telescoping") -> PrecisionReal:
    """int_0^inf B(u) e^-u du as quadrature on [0, U] plus an analytic tail"""
    kind = TransformKind.parse(kind)
    config = config or PrecisionConfig()
    quad = quad or QuadratureConfig()
    cutoff = quad.interval_cap
    alpha = _as_alpha(alpha)
    if kind is TransformKind.COMBINED and alpha is None:
        raise PreconditionError("the combined Laplace sum needs alpha")

    with config.workdps():
        s1 = sigma(mpf(1))
        e = +mp.e

    if kind is TransformKind.DELTA:
        head = _head(lambda u: mp.log1p(u), cutoff, config, quad, "delta head")
        return head + delta_laplace_tail(cutoff, config)

    if kind is TransformKind.GAMMA:
        head = _head(lambda u: sigma(u) + (s1 - sigma(u + 1) - mp.log1p(u)) / e,
                     cutoff, config, quad, "gamma head")
        return head + gamma_laplace_tail(cutoff, config, quad, tail_method)

    offset = alpha.offset_from_reciprocal_e(config)
    d = offset.value
    head = _head(lambda u: sigma(u) + (s1 - sigma(u + 1)) / e + d * mp.log1p(u),
                 cutoff, config, quad, "combined head")
    # int_0^U ln(1+u) e^-u du < delta < 1 bounds the effect of the offset's radius
    head = head + PrecisionReal(0, offset.radius, config)
    tails = gamma_laplace_tail(cutoff, config, quad, tail_method) + alpha.value(config) * delta_laplace_tail(cutoff, config)
    logger.debug("combined Laplace sum at alpha=%s: head=%s", alpha, head.nstr(15))
    return head + tails


# -- radius of convergence --------------------------------------------------

@log_experiment()
def radius_of_convergence(ts: TransformSeries, alpha=None,
                          config: Optional[PrecisionConfig] = None) -> PrecisionReal:
    """Root-test radius from the last K/2 coefficients.

    Fits -ln|c_k|/k = ln(rho) + a ln(k)/k + b/k by least squares; the radius
    of the result is the fit's two-standard-error band on rho.
    """
    if ts.K < 50:
        raise PreconditionError(f"radius_of_convergence needs K >= 50, got {ts.K}")
    config = config or PrecisionConfig()
    ks, ys = [], []
    with config.workdps():
        for k in range(ts.K // 2 + 1, ts.K + 1):
            c = ts.numeric_coefficient(k, config, alpha)
            if c.value == 0:
                continue
            ks.append(k)
            ys.append(float(-mp.log(abs(c.value)) / k))
    if not ks:
        raise EstimationError("all coefficients vanish; the root test is undefined")
    if len(ks) < 4:
        raise EstimationError(f"only {len(ks)} nonzero coefficients, too few for the root-test fit")

    k_arr = np.asarray(ks, dtype=float)
    y = np.asarray(ys)
    X = np.column_stack([np.ones_like(k_arr), np.log(k_arr) / k_arr, 1.0 / k_arr])
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = max(len(y) - X.shape[1], 1)
    cov = (resid @ resid / dof) * np.linalg.pinv(X.T @ X)
    se = float(np.sqrt(max(cov[0, 0], 0.0)))
    rho = float(np.exp(coef[0]))
    band = rho * float(np.expm1(2 * se))
    logger.debug("root test on %s terms: rho=%s band=%s", len(ks), rho, band)
    return PrecisionReal(rho, band, config)


# -- Stokes constants -------------------------------------------------------

@dataclass
class StokesEstimate:
    target: str
    samples: List[Tuple[mpf, PrecisionReal]]
    extrapolated: PrecisionReal
    method: str

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "method": self.method,
            "extrapolated": self.extrapolated.to_dict(),
            "samples": [[mp.nstr(u, 12), r.nstr(20)] for u, r in self.samples],
        }


def neville_at_zero(hs: Sequence[mpf], values: Sequence[mpf], max_order: int = 6) -> Tuple[mpf, mpf]:
    """Polynomial extrapolation of values(h) to h = 0 along the last row of Neville's table.

    Returns the table entry with the smallest change from its predecessor and
    that change as an error estimate.
    """
    n = len(values)
    table = [[v] for v in values]
    for i in range(1, n):
        for m in range(1, min(i, max_order) + 1):
            h_far, h_near = hs[i - m], hs[i]
            table[i].append((h_far * table[i][m - 1] - h_near * table[i - 1][m - 1]) / (h_far - h_near))
    row = table[-1]
    best, change = row[0], mpf("inf")
    for m in range(1, len(row)):
        delta = abs(row[m] - row[m - 1])
        if delta < change:
            best, change = row[m], delta
    return best, change


def extrapolate_ladder(hs: Sequence[mpf], values: Sequence[PrecisionReal]) -> Tuple[mpf, mpf, str]:
    """Limit of values as h -> 0, with the correction order read off the differences"""
    vs = [v.value for v in values]
    noise = max(v.radius for v in values) * 4 + mp.eps * max(abs(v) for v in vs) * 16
    diffs = [b - a for a, b in zip(vs, vs[1:])]
    if all(abs(d) <= noise for d in diffs):
        return vs[-1], noise, "constant"

    ratios = [diffs[i + 1] / diffs[i] for i in range(max(len(diffs) - 5, 0), len(diffs) - 1) if diffs[i] != 0]
    if len(ratios) >= 3:
        recent = ratios[-3:]
        q = recent[-1]
        if max(recent) - min(recent) < mpf("0.05") and abs(q) < mpf("0.7"):
            value = vs[-1] + diffs[-1] * q / (1 - q)
            error = abs(diffs[-1]) * abs(q) / (1 - abs(q)) * (max(recent) - min(recent)) + noise
            return value, error, "geometric"

    value, change = neville_at_zero(hs, vs)
    return value, change + noise, "richardson-log"


def _parse_target(target) -> Tuple[str, Optional[int]]:
    text = str(target.value if isinstance(target, TransformKind) else target).strip().lower()
    if text.startswith("generalized"):
        inner = text[len("generalized"):].strip("()= ")
        try:
            return "generalized", int(inner)
        except ValueError:
            raise PreconditionError(f"generalized Stokes target needs an order, got {target!r}")
    if text not in ("gamma", "delta", "combined"):
        raise PreconditionError(f"unknown Stokes target {target!r}")
    return text, None


@log_experiment()
def stokes_constant(target, samples: int = 24, alpha=None,
                    config: Optional[PrecisionConfig] = None, start: int = 8) -> StokesEstimate:
    """Extrapolate r(u) = B(u)/ln(u+1) along u_j = -1 + 2^-j to u = -1.

    The correction r(u) - r(-1) behaves like C/ln(u+1), so extrapolation runs
    in h = 1/|ln(u+1)| unless the samples show geometric convergence.
    """
    if samples < 5:
        raise PreconditionError(f"samples must be >= 5, got {samples}")
    config = config or PrecisionConfig()
    name, order = _parse_target(target)
    if name == "generalized":
        from .generalized import coefficient_stokes
        return coefficient_stokes(order, "gamma", config=config)

    alpha = _as_alpha(alpha)
    if name == "combined" and alpha is None:
        alpha = Alpha.reciprocal_e()

    ladder, hs, ratios = [], [], []
    for j in range(start, start + samples):
        with config.workdps():
            u_value = mpf(2) ** (-j) - 1
        u = PrecisionReal(u_value, 0, config)
        log_term = bdelta_closed(u)
        if name == "delta":
            numerator = bdelta_closed(u)
        elif name == "gamma":
            numerator = bgamma_closed(u)
        else:
            numerator = combined_closed(u, alpha)
        ratio = numerator / log_term
        ladder.append((u_value, ratio))
        ratios.append(ratio)
        with config.workdps():
            hs.append(1 / abs(log_term.value))

    with config.workdps():
        value, error, method = extrapolate_ladder(hs, ratios)
    label = name if name != "combined" else f"combined(alpha={alpha})"
    return StokesEstimate(label, ladder, PrecisionReal(value, error, config), method)
