from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp, mpf

from pyborel import DomainError, PrecisionConfig, PrecisionError, PrecisionReal, PreconditionError
from pyborel.alpha import Alpha, AlphaKind, LinearFormCoefficient, parse_alpha
from pyborel.precision import const_e, const_pi, eval_exp, eval_ln, reciprocal_e, to_fraction
from pyborel.quadrature import QuadratureConfig, integrate
from pyborel.errors import QuadratureError
from pyborel.special import delta_by_ei, ei, ein, euler_gamma


class TestPrecisionConfig:
    def test_defaults(self):
        """60 digits plus 10 guard digits"""
        config = PrecisionConfig()
        assert config.digits == 60
        assert config.working_digits == 70

    def test_validation(self):
        """Too few digits or guard digits is a precondition error"""
        with pytest.raises(PreconditionError):
            PrecisionConfig(digits=5)
        with pytest.raises(PreconditionError):
            PrecisionConfig(guard_digits=2)

    def test_from_env(self):
        """Environment variables set the defaults, explicit overrides win"""
        env = {"PYBOREL_DIGITS": "40", "PYBOREL_GUARD_DIGITS": "8"}
        assert PrecisionConfig.from_env(env) == PrecisionConfig(digits=40, guard_digits=8)
        assert PrecisionConfig.from_env(env, digits=50).digits == 50
        assert PrecisionConfig.from_env({}, digits=None) == PrecisionConfig()

    def test_from_env_rejects_garbage(self):
        """A non-integer digit count is reported, not ignored"""
        with pytest.raises(PreconditionError):
            PrecisionConfig.from_env({"PYBOREL_DIGITS": "many"})

    def test_configs_are_hashable(self):
        """Configs key the constant caches"""
        assert hash(PrecisionConfig(digits=30)) == hash(PrecisionConfig(digits=30))


class TestPrecisionReal:
    def test_rational_is_enclosed(self, config):
        """1/3 rounds once and its enclosure contains 1/3"""
        third = PrecisionReal.from_rational(Fraction(1, 3), config)
        assert third.radius > 0
        assert third.contains(Fraction(1, 3))

    def test_dyadic_rational_is_exact(self, config):
        """3/8 is representable, so the radius is zero"""
        assert PrecisionReal.from_rational(Fraction(3, 8), config).radius == 0

    def test_arithmetic_keeps_enclosure(self, config):
        """(1/3 + 1/7) * 3 / (1/5) encloses the exact rational result"""
        a = PrecisionReal.from_rational(Fraction(1, 3), config)
        b = PrecisionReal.from_rational(Fraction(1, 7), config)
        c = PrecisionReal.from_rational(Fraction(1, 5), config)
        result = (a + b) * 3 / c
        assert result.contains(Fraction(150, 21))

    def test_subtraction_and_power(self, config):
        """x^3 - x for x = 2/3"""
        x = PrecisionReal.from_rational(Fraction(2, 3), config)
        assert (x ** 3 - x).contains(Fraction(8, 27) - Fraction(2, 3))
        assert (x ** 0).value == 1

    def test_division_by_possible_zero(self, config):
        """Dividing by an enclosure that contains zero is a domain error"""
        with pytest.raises(DomainError):
            PrecisionReal(1, 0, config) / PrecisionReal(0, mpf("1e-30"), config)

    def test_immutable(self, config):
        """Values cannot be reassigned"""
        x = PrecisionReal(1, 0, config)
        with pytest.raises(AttributeError):
            x.value = 2

    def test_non_finite_rejected(self, config):
        """inf is a domain error"""
        with pytest.raises(DomainError):
            PrecisionReal(mp.inf, 0, config)

    def test_close_to_requires_narrow_radii(self, config):
        """A comparison with radii wider than tolerance/4 raises"""
        wide = PrecisionReal(1, mpf("1e-3"), config)
        with pytest.raises(PrecisionError):
            wide.close_to(1, 1e-3)
        narrow = PrecisionReal(1, 0, config)
        assert narrow.close_to(Fraction(1), 1e-10)

    def test_sum(self, config):
        """Compensated sum of tenths"""
        tenth = PrecisionReal.from_rational(Fraction(1, 10), config)
        assert PrecisionReal.sum([tenth] * 10, config).contains(1)

    def test_to_fraction_round_trip(self, config):
        """to_fraction recovers the exact value of an mpf"""
        with config.workdps():
            assert to_fraction(mpf("0.375")) == Fraction(3, 8)
            assert to_fraction(mpf("-2.5")) == Fraction(-5, 2)


class TestElementary:
    def test_e_and_reciprocal(self, config):
        """e * (1/e) encloses 1"""
        assert (const_e(config) * reciprocal_e(config)).contains(1)

    def test_exp_log(self, config):
        """ln(exp(x)) encloses x"""
        x = PrecisionReal.from_rational(Fraction(7, 5), config)
        assert eval_ln(eval_exp(x)).contains(Fraction(7, 5))

    def test_constants_are_public(self, config):
        """e, pi and 1/e are exported from the package root"""
        import pyborel

        assert {"const_e", "const_pi", "reciprocal_e"} <= set(pyborel.__all__)
        with config.workdps():
            assert abs(pyborel.const_pi(config).value - mp.pi) <= pyborel.const_pi(config).radius

    def test_log_domain(self, config):
        """ln of a nonpositive enclosure is a domain error"""
        with pytest.raises(DomainError):
            eval_ln(PrecisionReal(0, 0, config))


class TestAlpha:
    def test_parse_forms(self):
        """Rationals, decimals and the 1/e token"""
        assert parse_alpha("1/3") == Alpha.exact(Fraction(1, 3))
        assert parse_alpha("0.3") == Alpha.exact(Fraction(3, 10))
        assert parse_alpha("1e-3") == Alpha.exact(Fraction(1, 1000))
        assert parse_alpha("1/e").is_reciprocal_e
        shifted = parse_alpha("1/e-1/1000")
        assert shifted.kind is AlphaKind.RECIPROCAL_E and shifted.rational == Fraction(-1, 1000)
        assert parse_alpha("1/e+1e-8").rational == Fraction(1, 10 ** 8)

    def test_decimal_near_reciprocal_e_is_not_reciprocal_e(self):
        """A decimal approximation stays an exact rational"""
        assert not parse_alpha("0.36787944117144233").is_reciprocal_e

    def test_parse_rejects_garbage(self):
        """Unparseable alpha strings are precondition errors"""
        for text in ("", "e", "1/x", "pi"):
            with pytest.raises(PreconditionError):
                parse_alpha(text)

    def test_gap_at_reciprocal_e(self, config):
        """!k/k! - 1/e carries the sign (-1)^k and encloses the exact gap"""
        alpha = Alpha.reciprocal_e()
        for k in (1, 2, 5, 30):
            gap = alpha.weighted_gap(1, k, config)
            assert (gap.value > 0) == (k % 2 == 0)
            exact = alpha.gap_enclosure(k)
            numeric = gap.enclosure()
            assert numeric.lo <= exact.hi and exact.lo <= numeric.hi

    def test_weighted_gap_rational(self, config):
        """Rational alpha gives the exact rational gap"""
        gap = Alpha.exact(Fraction(1, 3)).weighted_gap(6, 3, config)
        assert gap.contains(6 * (Fraction(2, 6) - Fraction(1, 3)))

    def test_linear_form(self, config):
        """a + b alpha, its zero and its value at 1/e"""
        form = LinearFormCoefficient(Fraction(1), Fraction(-2))
        assert form.exact_at(Fraction(1, 4)) == Fraction(1, 2)
        assert form.zero_crossing() == Fraction(1, 2)
        assert form.at(Alpha.reciprocal_e(), config).contains(
            PrecisionReal(1, 0, config) - 2 * reciprocal_e(config)
        )


class TestQuadrature:
    def test_polynomial(self, config):
        """int_0^1 x^2 dx = 1/3 to the agreement tolerance"""
        value = integrate(lambda x: x * x, [0, 1], config)
        assert value.distance(PrecisionReal.from_rational(Fraction(1, 3), config)) < config.agreement

    def test_gauss_legendre(self, fast_config):
        """The alternative scheme on a smooth integrand"""
        quad = QuadratureConfig(scheme="gauss-legendre")
        value = integrate(lambda x: mp.exp(x), [0, 1], fast_config, quad)
        with fast_config.workdps():
            assert abs(value.value - (mp.e - 1)) < fast_config.agreement

    def test_invalid_configs(self):
        """Unknown scheme, tiny budget and out-of-range cap are rejected"""
        with pytest.raises(PreconditionError):
            QuadratureConfig(scheme="simpson")
        with pytest.raises(PreconditionError):
            QuadratureConfig(node_budget=4)
        with pytest.raises(PreconditionError):
            QuadratureConfig(interval_cap=30)

    def test_unreachable_tolerance(self, fast_config):
        """An impossible tolerance raises QuadratureError carrying the achieved error"""
        quad = QuadratureConfig(tolerance=1e-300, node_budget=16)
        with pytest.raises(QuadratureError) as info:
            integrate(lambda x: mp.sqrt(x) * mp.sin(1 / (x + mpf("0.001"))), [0, 1], fast_config, quad)
        assert info.value.achieved_error is not None


class TestSignOperations:
    def test_negation_keeps_working_precision(self, config):
        """-x and |x| are exact at 70 working digits, not rounded to a double"""
        third = PrecisionReal.from_rational(Fraction(1, 3), config)
        negated = -third
        assert to_fraction(negated.value) == -to_fraction(third.value)
        assert negated.radius == third.radius
        assert to_fraction(abs(negated).value) == to_fraction(third.value)
        assert abs(third) is third

    def test_negated_sum_still_encloses(self, config):
        """1/7 - 1/3 built through negation contains the exact difference"""
        a = PrecisionReal.from_rational(Fraction(1, 7), config)
        b = PrecisionReal.from_rational(Fraction(1, 3), config)
        difference = a + (-b)
        assert difference.contains(Fraction(1, 7) - Fraction(1, 3))
        assert difference.radius < config.target


def _random_tree(rng, depth: int, config: PrecisionConfig):
    """(exact, tracked) values of a random expression tree over small rationals"""
    if depth == 0 or rng.random() < 0.2:
        q = Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 50)))
        return q, PrecisionReal.from_rational(q, config)
    op = rng.choice(["add", "sub", "mul", "div", "neg", "abs"])
    left_q, left = _random_tree(rng, depth - 1, config)
    if op == "neg":
        return -left_q, -left
    if op == "abs":
        return abs(left_q), abs(left)
    right_q, right = _random_tree(rng, depth - 1, config)
    if op == "add":
        return left_q + right_q, left + right
    if op == "sub":
        return left_q - right_q, left - right
    if op == "div" and abs(right_q) >= Fraction(1, 100):
        return left_q / right_q, left / right
    return left_q * right_q, left * right


class TestErrorHonesty:
    def test_random_expression_trees(self, fast_config):
        """The exact rational result of 100 random trees of depth <= 8 lies in the tracked enclosure"""
        rng = np.random.default_rng(20240601)
        for _ in range(100):
            exact, tracked = _random_tree(rng, 8, fast_config)
            assert tracked.contains(exact), (exact, tracked)

    def test_rational_round_trip(self, config):
        """A rational converted to a PrecisionReal is inside its enclosure"""
        for q in (Fraction(1, 3), Fraction(-22, 7), Fraction(10 ** 30 + 1, 3 ** 40)):
            assert PrecisionReal.from_rational(q, config).enclosure().contains(q)


class TestMonotonePrecision:
    @pytest.mark.parametrize("name", ["euler_gamma", "reciprocal_e", "const_pi", "ein1", "ei1", "delta_by_ei"])
    def test_higher_digits_stay_inside_lower_radius(self, name):
        """A constant at 60 digits agrees with its 30-digit value within the 30-digit radius"""
        one = lambda cfg: PrecisionReal(1, 0, cfg)
        routes = {
            "euler_gamma": euler_gamma,
            "reciprocal_e": reciprocal_e,
            "const_pi": const_pi,
            "ein1": lambda cfg: ein(one(cfg)),
            "ei1": lambda cfg: ei(one(cfg)),
            "delta_by_ei": delta_by_ei,
        }
        low = routes[name](PrecisionConfig(digits=30))
        high = routes[name](PrecisionConfig(digits=60))
        assert high.distance(low) <= low.radius + high.radius
        assert high.radius < low.radius
