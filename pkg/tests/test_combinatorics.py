from fractions import Fraction
import math

import pytest

from pyborel import PreconditionError
from pyborel.combinatorics import (
    RationalInterval,
    alternating_exp_partial,
    derangement,
    derangement_by_sum,
    e_tail_enclosure,
    factorial,
    partial_fraction_residual,
    partial_fraction_split,
    scaled_tail_enclosure,
    stirling_first,
    tail_terms_for_digits,
    telescoping_closed_form,
    telescoping_mismatches,
    telescoping_sum,
)


class TestFactorialsAndDerangements:
    def test_small_factorials(self):
        """Factorials match the standard library"""
        for k in range(0, 60):
            assert factorial(k) == math.factorial(k)

    def test_known_derangements(self):
        """!k for small k"""
        expected = [1, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496, 1334961]
        assert [derangement(k) for k in range(11)] == expected

    def test_derangement_matches_defining_sum(self):
        """The recurrence agrees with k! sum (-1)^l / l!"""
        for k in range(0, 200):
            assert derangement_by_sum(k) == derangement(k)

    def test_alternating_exp_partial(self):
        """E_n = !n / n!"""
        for n in (0, 1, 5, 17):
            assert alternating_exp_partial(n) == Fraction(derangement(n), factorial(n))

    def test_negative_index_rejected(self):
        """Negative indices are a precondition error"""
        with pytest.raises(PreconditionError):
            derangement(-1)


class TestStirling:
    def test_known_values(self):
        """s(3,2) = -3, s(4,2) = 11, s(5,3) = 35"""
        assert stirling_first(3, 2) == -3
        assert stirling_first(4, 2) == 11
        assert stirling_first(5, 3) == 35

    def test_first_column(self):
        """s(k,1) = (-1)^(k-1) (k-1)!"""
        for k in range(1, 201):
            assert stirling_first(k, 1) == (-1) ** (k - 1) * factorial(k - 1)

    def test_diagonal(self):
        """s(k,k) = 1"""
        for k in range(1, 20):
            assert stirling_first(k, k) == 1

    def test_falling_factorial_at_one_vanishes(self):
        """sum_n s(k,n) = x(x-1)...(x-k+1) at x = 1, which is zero for k >= 2"""
        for k in range(2, 15):
            assert sum(stirling_first(k, n) for n in range(1, k + 1)) == 0

    def test_falling_factorial_polynomial(self):
        """sum_n s(k,n) x^n = x(x-1)...(x-k+1) at x = 1..k+1 for every k <= 60"""
        for k in range(1, 61):
            for x in range(1, k + 2):
                expected = math.prod(x - j for j in range(k))
                assert sum(stirling_first(k, n) * x ** n for n in range(1, k + 1)) == expected

    def test_out_of_range(self):
        """n must lie in [1, k]"""
        with pytest.raises(PreconditionError):
            stirling_first(3, 4)
        with pytest.raises(PreconditionError):
            stirling_first(3, 0)


class TestTailEnclosures:
    def test_width_is_one_over_factorial(self):
        """Endpoints are consecutive partial sums, width 1/(k + extra)!"""
        for k, extra in ((1, 2), (5, 3), (20, 10)):
            assert e_tail_enclosure(k, extra).width == Fraction(1, factorial(k + extra))

    def test_enclosures_are_nested(self):
        """More tail terms give a narrower interval inside the coarser one"""
        coarse = scaled_tail_enclosure(7, 3)
        fine = scaled_tail_enclosure(7, 12)
        assert coarse.contains(fine.lo) and coarse.contains(fine.hi)

    def test_encloses_exact_gap(self):
        """!k/k! - 1/e = -R(k) and E_N - E_k approximates -R(k) from inside a long enclosure"""
        k = 6
        tail = e_tail_enclosure(k, 25)
        # R(k) = lim E_N - E_k; with N = k + 30 the difference is well inside
        approx = alternating_exp_partial(k + 30) - alternating_exp_partial(k)
        assert abs(approx - tail.midpoint) <= tail.width

    def test_rho_between_bounds(self):
        """rho_k lies in [1 - 1/(k+2), 1]"""
        for k in (1, 10, 100):
            rho = scaled_tail_enclosure(k, 5)
            assert rho.lo >= 1 - Fraction(1, k + 2)
            assert rho.hi <= 1

    def test_requires_two_terms(self):
        """extra_terms below 2 cannot bracket the tail"""
        with pytest.raises(PreconditionError):
            scaled_tail_enclosure(5, 1)

    def test_terms_for_digits(self):
        """Enough terms for the requested digits, never fewer than 2"""
        assert tail_terms_for_digits(1000, 5) >= 2
        k, digits = 10, 30
        extra = tail_terms_for_digits(k, digits)
        assert scaled_tail_enclosure(k, extra).width < Fraction(1, 10 ** digits)


class TestProofIdentities:
    def test_telescoping(self):
        """Term-by-term sum equals 1/(m+1)! - K!/(K+m)!"""
        for m in range(1, 6):
            for K in range(2, 30):
                assert telescoping_sum(m, K) == telescoping_closed_form(m, K)

    @pytest.mark.slow
    def test_telescoping_full_grid(self):
        """Every m <= 50 and K <= 500"""
        assert telescoping_mismatches(50, 500) == []

    def test_telescoping_sweep_matches_pointwise(self, pyborel_info):
        """The running sweep agrees with telescoping_sum and logs its result"""
        assert telescoping_mismatches(4, 40) == []
        assert all(telescoping_sum(m, 40) == telescoping_closed_form(m, 40) for m in range(1, 5))
        assert "telescoping_mismatches returned: []" in pyborel_info.text
        with pytest.raises(PreconditionError):
            telescoping_mismatches(0, 10)

    def test_telescoping_preconditions(self):
        """m >= 1 and K >= 2"""
        with pytest.raises(PreconditionError):
            telescoping_sum(0, 5)
        with pytest.raises(PreconditionError):
            telescoping_sum(1, 1)

    def test_partial_fractions(self):
        """1/(m (m+1)!) = 1/(m m!) - 1/(m+1)!"""
        for m in range(1, 300):
            assert partial_fraction_residual(m) == 0
        assert partial_fraction_split(2) == (Fraction(1, 4), Fraction(1, 6))


class TestRationalInterval:
    def test_between_orders_endpoints(self):
        """between accepts endpoints in either order"""
        interval = RationalInterval.between(Fraction(3, 4), Fraction(1, 4))
        assert interval.lo == Fraction(1, 4) and interval.hi == Fraction(3, 4)

    def test_arithmetic(self):
        """Sum, negation and scaling keep exact endpoints"""
        a = RationalInterval(Fraction(1), Fraction(2))
        b = RationalInterval(Fraction(-1, 2), Fraction(1, 2))
        total = a + b
        assert (total.lo, total.hi) == (Fraction(1, 2), Fraction(5, 2))
        flipped = a.scale(-2)
        assert (flipped.lo, flipped.hi) == (Fraction(-4), Fraction(-2))
        assert (-a).contains(Fraction(-3, 2))

    def test_magnitudes(self):
        """magnitude is the largest |x|, mignitude the smallest"""
        interval = RationalInterval(Fraction(-3), Fraction(1))
        assert interval.magnitude == 3
        assert interval.mignitude == 0
