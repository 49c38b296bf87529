from fractions import Fraction

import pytest

from pyborel import PrecisionReal, PreconditionError
from pyborel.series import (
    PartialSumTrace,
    Verdict,
    combined_form,
    combined_term,
    combined_term_enclosure,
    finite_identity_report,
    limit_estimate,
    limit_tail_enclosure,
    optimal_truncation,
    partial_sums,
    prop1_finite_identity,
    telescoping_residual,
)
from pyborel.special import ein


class TestTerms:
    def test_first_forms(self):
        """t_1 = alpha, t_2 = 1/2 - alpha, t_3 = -2/3 + 2 alpha"""
        assert (combined_form(1).a, combined_form(1).b) == (0, 1)
        assert (combined_form(2).a, combined_form(2).b) == (Fraction(1, 2), -1)
        assert (combined_form(3).a, combined_form(3).b) == (Fraction(-2, 3), 2)

    def test_zero_crossings_approach_reciprocal_e(self):
        """The root of t_k is !k/k!, alternating around 1/e"""
        assert combined_form(2).zero_crossing() == Fraction(1, 2)
        assert combined_form(3).zero_crossing() == Fraction(1, 3)
        assert abs(float(combined_form(12).zero_crossing()) - 0.36787944117144233) < 1e-9

    def test_index_starts_at_one(self):
        """k = 0 is rejected"""
        with pytest.raises(PreconditionError):
            combined_form(0)

    def test_term_at_reciprocal_e_is_enclosed(self, config):
        """The numeric term at 1/e overlaps the exact rho_k/(k(k+1)) enclosure"""
        for k in (1, 5, 20):
            numeric = combined_term(k, "1/e", config).at_alpha.enclosure()
            exact = combined_term_enclosure(k, 20)
            assert numeric.lo <= exact.hi and exact.lo <= numeric.hi

    def test_term_at_rational(self, config):
        """A rational alpha gives the exact rational term"""
        term = combined_term(3, Fraction(1, 4), config)
        assert term.at_alpha.contains(combined_form(3).exact_at(Fraction(1, 4)))
        assert term.to_dict()["a"] == "-2/3"


class TestPositivity:
    def test_exact_bounds_at_reciprocal_e(self):
        """1/(k(k+1)(k+2)) <= t_k <= 1/(k(k+1)) for every k <= 300"""
        for k in range(1, 301):
            enclosure = combined_term_enclosure(k)
            assert enclosure.lo >= Fraction(1, k * (k + 1) * (k + 2))
            assert enclosure.hi <= Fraction(1, k * (k + 1))

    def test_numeric_terms_inside_bounds(self, fast_config):
        """The tracked terms at 1/e respect the same bounds"""
        for k in (1, 2, 3, 10, 99, 300):
            term = combined_term(k, "1/e", fast_config).at_alpha.enclosure()
            assert term.lo >= Fraction(1, k * (k + 1) * (k + 2))
            assert term.hi <= Fraction(1, k * (k + 1))


class TestPartialSums:
    def test_converges_at_reciprocal_e(self, fast_config):
        """Positive terms of size 1/k^2"""
        trace = partial_sums("1/e", 200, fast_config)
        assert trace.verdict is Verdict.CONVERGING
        assert all(row.term.value > 0 for row in trace.rows)
        assert trace.evidence["decay_slope"] < -1.5

    @pytest.mark.parametrize("alpha", ["0", "3/10", "1", "1/e+1/1000", "1/e-1/1000", "1/e+1e-8", "1/e-1e-8"])
    def test_diverges_elsewhere(self, fast_config, alpha):
        """Factorial growth at every alpha that is not 1/e"""
        trace = partial_sums(alpha, 200, fast_config)
        assert trace.verdict is Verdict.DIVERGING
        assert trace.max_abs_term > 10 ** 100

    def test_rows_and_serialisation(self, fast_config):
        """One row per k, CSV columns in header order"""
        trace = partial_sums("1/2", 12, fast_config)
        assert [row.k for row in trace.rows] == list(range(1, 13))
        assert len(trace.rows[0].csv_row()) == len(PartialSumTrace.CSV_HEADER)
        data = trace.to_dict(include_rows=True)
        assert data["K"] == 12 and len(data["rows"]) == 12
        assert trace.cumulative(1).contains(Fraction(1, 2))

    def test_too_few_terms(self, fast_config):
        """K < 10 is a precondition error"""
        with pytest.raises(PreconditionError):
            partial_sums("1/e", 5, fast_config)

    def test_logs_the_call(self, fast_config, pyborel_info):
        """Each experiment writes one JSON record"""
        partial_sums("1/e", 10, fast_config)
        messages = [r.getMessage() for r in pyborel_info.records]
        assert any("pyborel.series.partial_sums" in m for m in messages)


class TestLimit:
    def test_tail_correction_lands_on_ein1(self, config):
        """Partial sum plus the enclosed tail recovers Ein(1)"""
        estimate = limit_estimate(100, config=config)
        target = ein(PrecisionReal(1, 0, config))
        assert estimate.distance(target) <= estimate.radius + target.radius

    def test_raw_partial_sum_misses_by_one_over_k(self, config):
        """Without the tail the gap is close to 1/(K+1)"""
        raw = limit_estimate(100, tail_correction=False, config=config)
        gap = raw.distance(ein(PrecisionReal(1, 0, config)))
        assert abs(float(gap) - 1 / 101) < 1e-4

    def test_partial_sums_increase_towards_ein1(self, fast_config):
        """Without the tail the estimate is nondecreasing in K and stays below Ein(1)"""
        ein1 = ein(PrecisionReal(1, 0, fast_config))
        previous = None
        for K in (10, 20, 40, 80, 160, 320):
            estimate = limit_estimate(K, tail_correction=False, config=fast_config)
            assert estimate.lower <= ein1.upper
            if previous is not None:
                assert estimate.upper >= previous.lower
                assert estimate.value > previous.value
            previous = estimate

    def test_tail_enclosure_is_narrow(self):
        """Width 1/(3 (K+1)(K+2)(K+3))"""
        tail = limit_tail_enclosure(10)
        assert tail.width == Fraction(1, 3 * 11 * 12 * 13)
        assert tail.lo > 0


class TestOptimalTruncation:
    def test_undefined_at_reciprocal_e(self, fast_config):
        """The convergent case has no optimal truncation"""
        with pytest.raises(PreconditionError):
            optimal_truncation("1/e", fast_config)

    def test_near_reciprocal_e(self, fast_config):
        """The smallest term sits at a small index and the scan stops past it"""
        report = optimal_truncation("1/e+1e-8", fast_config)
        assert 2 <= report.k_star < report.scanned
        assert report.min_term > 0
        assert set(report.to_dict()) >= {"k_star", "best_error", "borel_error"}


    def test_k_star_grows_as_alpha_nears_reciprocal_e(self, fast_config):
        """Smaller perturbations defer the factorial takeover"""
        reports = [optimal_truncation(f"1/e+{eps}", fast_config) for eps in ("1e-4", "1e-6", "1e-8")]
        k_stars = [r.k_star for r in reports]
        assert k_stars == sorted(k_stars) and len(set(k_stars)) == 3
        assert reports[0].best_error > reports[-1].best_error

    def test_far_from_reciprocal_e(self, fast_config):
        """alpha = 1/2 truncates early and stays far from Ein(1)"""
        report = optimal_truncation("1/2", fast_config)
        assert report.k_star <= 4
        assert report.best_error > 1e-2


class TestFiniteIdentity:
    @pytest.mark.parametrize("alpha,K,M", [("1/3", 5, 4), ("0", 8, 8), ("3/10", 12, 3), ("-2", 3, 9)])
    def test_residual_is_exactly_zero(self, alpha, K, M):
        """Both sides agree as rationals"""
        assert prop1_finite_identity(alpha, K, M) == 0

    def test_swap_is_exact(self):
        """Row-by-row and telescoped forms of the swapped sum agree"""
        report = finite_identity_report("1/7", 10, 6)
        assert report.swap_residual == 0
        assert report.to_dict()["residual"] == "0"

    def test_needs_rational_alpha(self):
        """1/e is not an exact rational"""
        with pytest.raises(PreconditionError):
            finite_identity_report("1/e", 5, 5)

    def test_bounds(self):
        """K and M must be at least 2"""
        with pytest.raises(PreconditionError):
            finite_identity_report("1/3", 1, 5)

    def test_telescoping_residual(self):
        """Zero for every m and K"""
        assert all(telescoping_residual(m, K) == 0 for m in (1, 2, 5) for K in (2, 7, 20))
