"""
Term algebra and partial-sum diagnostics for S(alpha) = S_gamma + alpha S_delta,
with t_k = (-1)^k (k-1)! (!k/k! - alpha).

At alpha = 1/e the term is t_k = rho_k / (k (k+1)) with
rho_k = 1 - 1/(k+2) + 1/((k+2)(k+3)) - ..., always taken from an exact enclosure.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpf

from .alpha import Alpha, AlphaKind, LinearFormCoefficient, parse_alpha
from .combinatorics import (
    RationalInterval,
    alternating_exp_partial,
    derangement,
    factorial,
    scaled_tail_enclosure,
    telescoping_closed_form,
    telescoping_sum,
)
from .decorators import log_experiment
from .errors import PreconditionError
from .precision import PrecisionConfig, PrecisionReal
from .special import ein, euler_gamma, gompertz_delta

logger = logging.getLogger(__name__)

# coefficient of k log k in log|t_k| above which growth counts as factorial
FACTORIAL_GROWTH_THRESHOLD = 0.5


class Verdict(Enum):
    CONVERGING = "converging"
    DIVERGING = "diverging"
    UNDECIDED = "undecided"


def as_alpha(alpha) -> Alpha:
    if isinstance(alpha, Alpha):
        return alpha
    if isinstance(alpha, str):
        return parse_alpha(alpha)
    if isinstance(alpha, PrecisionReal):
        return Alpha.from_real(alpha)
    return Alpha.exact(alpha)


@dataclass
class SeriesTerm:
    k: int
    form: LinearFormCoefficient
    at_alpha: Optional[PrecisionReal] = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "a": str(self.form.a),
            "b": str(self.form.b),
            "at_alpha": self.at_alpha.to_dict() if self.at_alpha is not None else None,
        }


def combined_form(k: int) -> LinearFormCoefficient:
    """(-1)^k !k / k + alpha (-1)^(k-1) (k-1)!"""
    if k < 1:
        raise PreconditionError(f"series terms start at k = 1, got {k}")
    return LinearFormCoefficient(Fraction((-1) ** k * derangement(k), k), (-1) ** (k + 1) * factorial(k - 1))


def combined_term(k: int, alpha=None, config: Optional[PrecisionConfig] = None) -> SeriesTerm:
    form = combined_form(k)
    if alpha is None:
        return SeriesTerm(k, form)
    config = config or PrecisionConfig()
    value = as_alpha(alpha).weighted_gap((-1) ** k * factorial(k - 1), k, config)
    return SeriesTerm(k, form, value)


def combined_term_enclosure(k: int, extra_terms: int = 3) -> RationalInterval:
    """Exact interval holding t_k at alpha = 1/e"""
    if k < 1:
        raise PreconditionError(f"series terms start at k = 1, got {k}")
    return scaled_tail_enclosure(k, extra_terms).scale(Fraction(1, k * (k + 1)))


# -- traces -----------------------------------------------------------------

@dataclass
class TraceRow:
    k: int
    term: PrecisionReal
    cumulative: PrecisionReal

    @property
    def magnitude(self) -> mpf:
        return abs(self.term.value)

    def csv_row(self, digits: int = 17) -> List[str]:
        return [
            str(self.k),
            mp.nstr(self.term.value, digits),
            mp.nstr(self.cumulative.value, digits),
            mp.nstr(self.magnitude, digits),
        ]


@dataclass
class PartialSumTrace:
    alpha: Alpha
    rows: List[TraceRow]
    verdict: Verdict
    evidence: Dict[str, object] = field(default_factory=dict)
    n: int = 1

    CSV_HEADER = ("k", "term", "cumulative", "abs_term")

    @property
    def final(self) -> PrecisionReal:
        return self.rows[-1].cumulative

    @property
    def max_abs_term(self) -> mpf:
        return max(row.magnitude for row in self.rows)

    def cumulative(self, k: int) -> PrecisionReal:
        for row in self.rows:
            if row.k == k:
                return row.cumulative
        raise KeyError(k)

    def to_dict(self, include_rows: bool = False) -> dict:
        result = {
            "alpha": str(self.alpha),
            "n": self.n,
            "K": self.rows[-1].k,
            "verdict": self.verdict.value,
            "evidence": self.evidence,
            "final": self.final.to_dict(),
            "max_abs_term": mp.nstr(self.max_abs_term, 10),
        }
        if include_rows:
            result["rows"] = [dict(zip(self.CSV_HEADER, row.csv_row())) for row in self.rows]
        return result


def _lstsq(columns: Sequence[np.ndarray], y: np.ndarray) -> np.ndarray:
    X = np.column_stack(columns)
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    return coef


def classify_trace(ks: Sequence[int], terms: Sequence[mpf]) -> Tuple[Verdict, Dict[str, object]]:
    """Convergence verdict from the trailing quarter of a term sequence.

    log|t_k| grows like c k log k for factorial blowup; the slope of successive
    log-ratios against log k estimates c. Decay is read from the log-log slope.
    """
    pairs = [(k, t) for k, t in zip(ks, terms) if t != 0]
    window = pairs[-max(len(ks) // 4, 6):]
    if len(window) < 4:
        return Verdict.UNDECIDED, {"reason": "too few nonzero terms"}

    k_arr = np.asarray([k for k, _ in window], dtype=float)
    logs = np.asarray([float(mp.log(abs(t))) for _, t in window])

    steps = np.diff(logs) / np.diff(k_arr)
    mids = (k_arr[1:] + k_arr[:-1]) / 2
    growth_rate = float(_lstsq([np.ones_like(mids), np.log(mids)], steps)[1])
    decay_slope = float(_lstsq([np.ones_like(k_arr), np.log(k_arr)], logs)[1])
    magnitudes = [abs(t) for _, t in window]
    monotone = all(b <= a * (1 + mpf(10) ** -12) for a, b in zip(magnitudes, magnitudes[1:]))

    evidence = {
        "window": [int(k_arr[0]), int(k_arr[-1])],
        "growth_rate": round(growth_rate, 6),
        "decay_slope": round(decay_slope, 6),
        "monotone": monotone,
    }
    if growth_rate > FACTORIAL_GROWTH_THRESHOLD:
        return Verdict.DIVERGING, evidence
    if decay_slope < -1 and monotone:
        return Verdict.CONVERGING, evidence
    return Verdict.UNDECIDED, evidence


def build_trace(alpha: Alpha, terms: Sequence[PrecisionReal], start: int = 1, n: int = 1) -> PartialSumTrace:
    """Cumulative sums in index order and the verdict for the term sequence"""
    rows = []
    cumulative = None
    for offset, term in enumerate(terms):
        cumulative = term if cumulative is None else cumulative + term
        rows.append(TraceRow(start + offset, term, cumulative))
    verdict, evidence = classify_trace([r.k for r in rows], [r.term.value for r in rows])
    return PartialSumTrace(alpha, rows, verdict, evidence, n)


@log_experiment()
def partial_sums(alpha, K: int, config: Optional[PrecisionConfig] = None) -> PartialSumTrace:
    """Trace of S(alpha) up to k = K"""
    if K < 10:
        raise PreconditionError(f"partial_sums needs K >= 10, got {K}")
    config = config or PrecisionConfig()
    alpha = as_alpha(alpha)
    terms = [alpha.weighted_gap((-1) ** k * factorial(k - 1), k, config) for k in range(1, K + 1)]
    return build_trace(alpha, terms)


def limit_tail_enclosure(K: int) -> RationalInterval:
    """Exact enclosure of sum_{k>K} t_k at alpha = 1/e.

    From rho_k in [1 - 1/(k+2), 1 - 1/(k+2) + 1/((k+2)(k+3))] and the
    telescoping sums of 1/(k(k+1)...(k+j)).
    """
    lower = Fraction(1, K + 1) - Fraction(1, 2 * (K + 1) * (K + 2))
    width = Fraction(1, 3 * (K + 1) * (K + 2) * (K + 3))
    return RationalInterval(lower, lower + width)


@log_experiment()
def limit_estimate(K: int, tail_correction: bool = True,
                   config: Optional[PrecisionConfig] = None) -> PrecisionReal:
    """S(1/e) from the partial sum at K, plus the enclosed tail when asked"""
    if K < 1:
        raise PreconditionError(f"K must be >= 1, got {K}")
    config = config or PrecisionConfig()
    alpha = Alpha.reciprocal_e()
    partial = PrecisionReal.sum(
        (alpha.weighted_gap((-1) ** k * factorial(k - 1), k, config) for k in range(1, K + 1)), config
    )
    if not tail_correction:
        return partial
    return partial + PrecisionReal.from_interval(limit_tail_enclosure(K), config)


# -- optimal truncation -----------------------------------------------------

@dataclass
class OptimalTruncationReport:
    alpha: Alpha
    k_star: int
    min_term: mpf
    best_error: mpf
    borel_error: mpf
    scanned: int

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "k_star": self.k_star,
            "min_term": mp.nstr(self.min_term, 10),
            "best_error": mp.nstr(self.best_error, 10),
            "borel_error": mp.nstr(self.borel_error, 10),
            "scanned": self.scanned,
        }


@log_experiment()
def optimal_truncation(alpha, config: Optional[PrecisionConfig] = None, max_terms: int = 400) -> OptimalTruncationReport:
    """Smallest term of the divergent series and the accuracy of truncating there"""
    config = config or PrecisionConfig()
    alpha = as_alpha(alpha)
    if alpha.is_reciprocal_e:
        raise PreconditionError("optimal truncation is undefined at alpha = 1/e, where the series converges")
    offset = alpha.offset_from_reciprocal_e(config)
    if abs(offset.value) <= 10 * offset.radius:
        raise PreconditionError(f"alpha = {alpha} is indistinguishable from 1/e at {config.digits} digits")

    cumulative = PrecisionReal(0, 0, config)
    best_k, best_term, best_sum = None, None, None
    k = 0
    for k in range(1, max_terms + 1):
        term = alpha.weighted_gap((-1) ** k * factorial(k - 1), k, config)
        cumulative = cumulative + term
        size = abs(term.value)
        if best_term is None or size < best_term:
            best_k, best_term, best_sum = k, size, cumulative
        elif size > best_term * 10 ** 6 and k > best_k + 3:
            break

    one = PrecisionReal(1, 0, config)
    borel_sum = euler_gamma(config) + alpha.value(config) * gompertz_delta(config)
    return OptimalTruncationReport(
        alpha=alpha,
        k_star=best_k,
        min_term=best_term,
        best_error=best_sum.distance(ein(one)),
        borel_error=best_sum.distance(borel_sum),
        scanned=k,
    )


# -- exact finite form of the rearrangement --------------------------------

@dataclass
class FiniteIdentityReport:
    """Every intermediate of the rearrangement, truncated at N = K + M"""

    alpha: Fraction
    K: int
    M: int
    left: Fraction
    delta_part: Fraction
    swapped_direct: Fraction
    swapped_telescoped: Fraction
    main_part: Fraction
    boundary: Fraction
    right: Fraction

    @property
    def residual(self) -> Fraction:
        return self.left - self.right

    @property
    def swap_residual(self) -> Fraction:
        return self.swapped_direct - self.swapped_telescoped

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha), "K": self.K, "M": self.M,
            "left": str(self.left), "main_part": str(self.main_part),
            "boundary": str(self.boundary), "residual": str(self.residual),
            "swap_residual": str(self.swap_residual),
        }


def finite_identity_report(alpha, K: int, M: int) -> FiniteIdentityReport:
    """Both sides of the summation swap, truncated at N = K + M, in exact arithmetic.

    left  = sum_{k<=K} t_k
    right = (alpha - E_N) sum_{k<=K} (-1)^(k-1) (k-1)!
            + sum_{m<=M} (-1)^(m+1)/(m m!) + boundary
    with K_m = min(K, N - m) and
    boundary = sum_{M<m<N} (-1)^(m+1)/(m m!) + sum_{m<N} (-1)^m K_m!/(m (K_m+m)!).
    """
    alpha = as_alpha(alpha)
    if alpha.kind is not AlphaKind.RATIONAL:
        raise PreconditionError("the finite identity needs an exact rational alpha")
    if K < 2 or M < 2:
        raise PreconditionError(f"K and M must be >= 2, got K={K}, M={M}")
    q = alpha.rational
    N = K + M
    E_N = alternating_exp_partial(N)

    left = sum((combined_form(k).exact_at(q) for k in range(1, K + 1)), Fraction(0))
    delta_sum = sum(((-1) ** (k + 1) * factorial(k - 1) for k in range(1, K + 1)))
    delta_part = (q - E_N) * delta_sum

    # sum_k (-1)^(k+1) (k-1)! (E_N - E_k), row by row
    swapped_direct = sum(
        ((-1) ** (k + 1) * factorial(k - 1) * (E_N - alternating_exp_partial(k)) for k in range(1, K + 1)),
        Fraction(0),
    )

    swapped_telescoped = Fraction(0)
    boundary = Fraction(0)
    main_part = Fraction(0)
    for m in range(1, N):
        K_m = min(K, N - m)
        # sum_{k<=K_m} (k-1)!/(k+m)! = (1/m) [1/m! - 1/(m+1)! + telescoping_sum(m, K_m)]
        inner = Fraction(1, factorial(m)) - Fraction(1, factorial(m + 1))
        if K_m >= 2:
            inner += telescoping_sum(m, K_m)
        swapped_telescoped += Fraction((-1) ** (m + 1), m) * inner

        head = Fraction((-1) ** (m + 1), m * factorial(m))
        if m <= M:
            main_part += head
        else:
            boundary += head
        boundary += Fraction((-1) ** m * factorial(K_m), m * factorial(K_m + m))

    right = delta_part + main_part + boundary
    return FiniteIdentityReport(
        alpha=q, K=K, M=M, left=left, delta_part=delta_part,
        swapped_direct=swapped_direct, swapped_telescoped=swapped_telescoped,
        main_part=main_part, boundary=boundary, right=right,
    )


def prop1_finite_identity(alpha, K: int, M: int) -> Fraction:
    """left - right of the truncated rearrangement; exactly zero"""
    return finite_identity_report(alpha, K, M).residual


def telescoping_residual(m: int, K: int) -> Fraction:
    return telescoping_sum(m, K) - telescoping_closed_form(m, K)
