"""
The acceptance criteria as runnable checks, driven by ``pyborel verify-all``.

Digit-dependent thresholds scale with the requested precision: route
agreement is held to 10^-(digits - guard) and identities to
max(1e-40, 10^-(digits - guard)). Fixed thresholds are relaxed only when the
precision cannot reach them.
"""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from mpmath import mp, mpf

from . import borel, generalized, gumbel, series, special
from .alpha import Alpha
from .combinatorics import (
    derangement,
    derangement_by_sum,
    partial_fraction_residual,
    telescoping_mismatches,
)
from .decorators import log_experiment
from .errors import PyBorelError
from .precision import PrecisionConfig, PrecisionReal, const_pi, reciprocal_e
from .quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
MONTE_CARLO_SAMPLES = 10 ** 6

DIVERGENT_ALPHAS = ("0", "3/10", "1", "1/e+1/1000", "1/e-1/1000", "1/e+1e-8", "1/e-1e-8")


@dataclass
class AcceptanceContext:
    config: PrecisionConfig = field(default_factory=PrecisionConfig)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    seed: int = DEFAULT_SEED
    samples: int = MONTE_CARLO_SAMPLES

    def threshold(self, fixed: float) -> mpf:
        """fixed, unless 10^-(digits - guard) is coarser"""
        with self.config.workdps():
            return max(mpf(fixed), self.config.agreement * 10)

    @property
    def identity_threshold(self) -> mpf:
        return self.threshold(1e-40)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "details": self.details,
            "runtime_ms": round(self.runtime_ms, 1),
        }


@dataclass
class AcceptanceReport:
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [r.to_dict() for r in self.results]}


class _Recorder:
    """Collects named comparisons for one criterion"""

    def __init__(self):
        self.details: Dict[str, object] = {}
        self.passed = True

    def expect(self, name: str, ok: bool, **info):
        self.details[name] = dict(info, ok=bool(ok)) if info else bool(ok)
        self.passed = self.passed and bool(ok)

    def close(self, name: str, value: PrecisionReal, reference, tolerance):
        gap = value.distance(reference)
        self.expect(name, gap < tolerance, gap=mp.nstr(gap, 5), tolerance=mp.nstr(mpf(tolerance), 3))


def check_constants(ctx: AcceptanceContext, rec: _Recorder):
    # routes must agree to 10^-(digits - guard) itself, 1e-50 at the default precision
    agreement = ctx.config.agreement
    for name, prefix in (("gamma", "0.577215"), ("delta", "0.596347"), ("ein1", None), ("ei1", None)):
        report = special.constant_report(name, ctx.config, ctx.quad)
        if prefix:
            rec.expect(f"{name}_prefix", report.value.nstr(10).startswith(prefix), value=report.value.nstr(20))
        rec.expect(f"{name}_routes", report.max_pairwise_discrepancy < agreement,
                   discrepancy=mp.nstr(report.max_pairwise_discrepancy, 5))


def check_identities(ctx: AcceptanceContext, rec: _Recorder):
    for name, residual in special.identity_residuals(ctx.config, ctx.quad).items():
        rec.expect(name, residual.value < ctx.identity_threshold, residual=mp.nstr(residual.value, 5))


def check_borel_sums(ctx: AcceptanceContext, rec: _Recorder):
    cfg, quad = ctx.config, ctx.quad
    rec.close("delta_kind", borel.laplace_borel_sum("delta", quad=quad, config=cfg),
              special.gompertz_delta(cfg, quad), ctx.threshold(1e-30))
    rec.close("gamma_kind", borel.laplace_borel_sum("gamma", quad=quad, config=cfg),
              special.euler_gamma(cfg), ctx.threshold(1e-12))
    rec.close("combined_at_reciprocal_e",
              borel.laplace_borel_sum("combined", alpha=Alpha.reciprocal_e(), quad=quad, config=cfg),
              special.ein(PrecisionReal(1, 0, cfg)), ctx.threshold(1e-12))


def check_stokes(ctx: AcceptanceContext, rec: _Recorder):
    cfg = ctx.config
    delta = borel.stokes_constant("delta", config=cfg)
    rec.expect("delta_ratio_exact", all(ratio.value == 1 for _, ratio in delta.samples))
    gamma = borel.stokes_constant("gamma", config=cfg)
    rec.close("gamma", gamma.extrapolated, -reciprocal_e(cfg), 1e-6)
    combined = borel.stokes_constant("combined", alpha=Alpha.reciprocal_e(), config=cfg)
    rec.close("combined_at_reciprocal_e", combined.extrapolated, 0, 1e-6)


def check_exact_layer(ctx: AcceptanceContext, rec: _Recorder):
    rec.expect("derangement_sum", all(derangement_by_sum(k) == derangement(k) for k in range(501)))
    mismatches = telescoping_mismatches(50, 500)
    rec.expect("telescoping", not mismatches, mismatches=mismatches[:5])
    rec.expect("partial_fractions", all(partial_fraction_residual(m) == 0 for m in range(1, 1001)))

    rng = np.random.default_rng(ctx.seed)
    residuals = []
    for _ in range(20):
        alpha = Fraction(int(rng.integers(-100, 101)), int(rng.integers(1, 101)))
        K, M = int(rng.integers(2, 51)), int(rng.integers(2, 21))
        residuals.append(series.prop1_finite_identity(alpha, K, M))
    rec.expect("finite_identity", all(r == 0 for r in residuals), cases=len(residuals))


def check_dichotomy(ctx: AcceptanceContext, rec: _Recorder):
    cfg = ctx.config
    ein1 = special.ein(PrecisionReal(1, 0, cfg))
    rec.close("partial_sum_1000", series.limit_estimate(1000, tail_correction=False, config=cfg), ein1, 2e-3)
    rec.close("tail_corrected_1000", series.limit_estimate(1000, config=cfg), ein1, 1e-5)
    for text in DIVERGENT_ALPHAS:
        trace = series.partial_sums(text, 400, cfg)
        rec.expect(f"diverging[{text}]",
                   trace.verdict is series.Verdict.DIVERGING and trace.max_abs_term > 10 ** 10,
                   verdict=trace.verdict.value, max_abs_term=mp.nstr(trace.max_abs_term, 5))


def check_entire_transform(ctx: AcceptanceContext, rec: _Recorder):
    rec.expect("coefficient_bound", all(
        borel.combined_coefficient_enclosure(k).magnitude <= borel.combined_decay_bound(k) for k in range(1, 301)
    ))
    cfg = ctx.config
    combined = borel.radius_of_convergence(
        borel.transform_coefficients("combined", 200, Alpha.reciprocal_e()), config=cfg
    )
    rec.expect("combined_radius", combined.value > 10, radius=combined.nstr(8))
    for kind in ("gamma", "delta"):
        rho = borel.radius_of_convergence(borel.transform_coefficients(kind, 200), config=cfg)
        rec.expect(f"{kind}_radius", abs(rho.value - 1) < mpf("0.05"), radius=rho.nstr(8))


def check_gumbel(ctx: AcceptanceContext, rec: _Recorder):
    cfg, quad = ctx.config, ctx.quad
    for n in range(0, 9):
        report = gumbel.moment_report(n, cfg, quad)
        rec.expect(f"closure[{n}]", report.identity_residual < ctx.threshold(1e-25),
                   residual=mp.nstr(report.identity_residual, 5))
    gamma = special.euler_gamma(cfg)
    rec.close("mean", gumbel.moment_full(1, cfg, quad), gamma, ctx.threshold(1e-30))
    rec.close("conditional_mean", gumbel.moment_conditional(1, cfg, quad),
              special.gompertz_delta(cfg, quad), ctx.threshold(1e-30))
    rec.close("prob_nonpositive", gumbel.prob_nonpositive(cfg, quad), reciprocal_e(cfg), ctx.threshold(1e-30))
    rec.close("second_moment", gumbel.moment_full(2, cfg, quad),
              gamma * gamma + const_pi(cfg) * const_pi(cfg) / 6, ctx.threshold(1e-20))
    for n in range(0, 7):
        rec.close(f"e_function[{n}]", gumbel.e_function(n, 1, cfg, quad),
                  gumbel.moment_positive(n, cfg, quad), ctx.threshold(1e-20))


def check_generalized(ctx: AcceptanceContext, rec: _Recorder):
    cfg = ctx.config
    rec.expect("reduction", all(
        generalized.generalized_term(1, k).form == series.combined_form(k) for k in range(1, 301)
    ))
    for n in (2, 3):
        rec.close(f"limit[{n}]", generalized.generalized_limit_estimate(n, 3000, config=cfg),
                  gumbel.moment_positive(n, cfg, ctx.quad), 1e-4)
        for text in ("0", "1/e+1/1000", "1/e-1/1000"):
            trace = generalized.generalized_partial_sums(n, text, 40 * n, cfg)
            rec.expect(f"diverging[{n}, {text}]", trace.verdict is series.Verdict.DIVERGING,
                       verdict=trace.verdict.value)
    rec.expect("term_bound", all(
        generalized.generalized_cancellation_bound(n, k).holds for n in range(1, 5) for k in range(n, 1001)
    ))


def check_monte_carlo(ctx: AcceptanceContext, rec: _Recorder):
    cfg = ctx.config
    first = gumbel.monte_carlo_moments(1, ctx.samples, ctx.seed)
    second = gumbel.monte_carlo_moments(1, ctx.samples, ctx.seed)
    mean, se = first.full
    rec.expect("mean", abs(mean - float(special.euler_gamma(cfg))) <= 4 * se, mean=mean, std_error=se)
    p, p_se = first.nonpositive
    rec.expect("indicator", abs(p - float(reciprocal_e(cfg))) <= 4 * p_se, mean=p, std_error=p_se)
    rec.expect("reproducible", first.to_dict() == second.to_dict())


CHECKS: Sequence = (
    (1, "constants", check_constants),
    (2, "identities", check_identities),
    (3, "borel_sums", check_borel_sums),
    (4, "stokes_constants", check_stokes),
    (5, "exact_layer", check_exact_layer),
    (6, "numeric_dichotomy", check_dichotomy),
    (7, "entire_transform", check_entire_transform),
    (8, "gumbel_moments", check_gumbel),
    (9, "generalized_series", check_generalized),
    (10, "monte_carlo", check_monte_carlo),
)


def run_check(criterion: int, name: str, fn: Callable, ctx: AcceptanceContext) -> CheckResult:
    rec = _Recorder()
    start = time.perf_counter()
    try:
        fn(ctx, rec)
    except PyBorelError as e:
        rec.expect("error", False, exception=f"{type(e).__name__}: {e}")
    elapsed = (time.perf_counter() - start) * 1000
    logger.info("criterion %s (%s): %s in %.0f ms", criterion, name, "pass" if rec.passed else "FAIL", elapsed)
    return CheckResult(criterion, name, rec.passed, rec.details, elapsed)


@log_experiment()
def run_acceptance(config: Optional[PrecisionConfig] = None, quad: Optional[QuadratureConfig] = None,
                   seed: int = DEFAULT_SEED, samples: int = MONTE_CARLO_SAMPLES,
                   only: Optional[Sequence[int]] = None) -> AcceptanceReport:
    """Run every acceptance check, or the criteria listed in only"""
    ctx = AcceptanceContext(config or PrecisionConfig(), quad or QuadratureConfig(), seed, samples)
    selected = [c for c in CHECKS if only is None or c[0] in only]
    return AcceptanceReport([run_check(criterion, name, fn, ctx) for criterion, name, fn in selected])
