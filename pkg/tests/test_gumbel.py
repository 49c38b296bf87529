import numpy as np
import pytest
from mpmath import mp

from pyborel import PrecisionReal, PreconditionError, QuadratureConfig, RangeError
from pyborel.gumbel import (
    UNIFORM_STEPS,
    e_function,
    moment_conditional,
    moment_full,
    moment_positive,
    moment_positive_routes,
    moment_report,
    monte_carlo_moments,
    open_uniforms,
    prob_nonpositive,
)
from pyborel.precision import reciprocal_e
from pyborel.special import ein, euler_gamma, gompertz_delta


class TestMoments:
    def test_order_zero(self, config, quad):
        """E[1] = 1, delta^(0) = -1 and Pr{X > 0} = 1 - 1/e"""
        assert moment_full(0, config, quad).distance(1) < config.agreement
        assert moment_conditional(0, config, quad).distance(-1) < config.agreement
        expected = 1 - reciprocal_e(config)
        assert moment_positive(0, config, quad).distance(expected) < config.agreement

    def test_first_order_constants(self, config, quad):
        """gamma^(1) = gamma, delta^(1) = delta, E[X+] = Ein(1)"""
        assert moment_full(1, config, quad).distance(euler_gamma(config)) < config.agreement
        assert moment_conditional(1, config, quad).distance(gompertz_delta(config, quad)) < config.agreement
        one = PrecisionReal(1, 0, config)
        assert moment_positive(1, config, quad).distance(ein(one)) < config.agreement

    def test_second_moment(self, config, quad):
        """E[X^2] = gamma^2 + pi^2/6"""
        with config.workdps():
            expected = mp.euler ** 2 + mp.pi ** 2 / 6
        assert moment_full(2, config, quad).distance(expected) < config.agreement

    def test_probability_nonpositive(self, config, quad):
        """Pr{X <= 0} = 1/e"""
        assert prob_nonpositive(config, quad).distance(reciprocal_e(config)) < config.agreement

    def test_positive_routes_agree(self, config, quad):
        """Alternating series and quadrature of E[(X+)^3]"""
        routes = moment_positive_routes(3, config, quad)
        assert routes["series"].distance(routes["quadrature"]) < config.agreement

    def test_density_transform(self, fast_config):
        """Integrating in x directly gives the same moment"""
        quad = QuadratureConfig(transform="none")
        assert moment_full(1, fast_config, quad).distance(euler_gamma(fast_config)) < fast_config.agreement

    @pytest.mark.parametrize("n", [-1, 13])
    def test_order_range(self, config, n):
        """Orders outside 0..12 are a range error"""
        with pytest.raises(RangeError):
            moment_full(n, config)


class TestEFunction:
    @pytest.mark.parametrize("n", [0, 1, 2, 4])
    def test_at_one_is_positive_moment(self, fast_config, quad, n):
        """F_n(1) = E[(X+)^n]"""
        value = e_function(n, 1, fast_config, quad)
        assert value.distance(moment_positive(n, fast_config, quad)) < fast_config.agreement

    def test_at_zero_is_factorial(self, fast_config, quad):
        """F_n(0) = int_0^1 (-ln v)^n dv = n!"""
        assert e_function(3, 0, fast_config, quad).distance(6) < fast_config.agreement

    def test_negative_t(self, fast_config):
        """t < 0 is outside the domain"""
        with pytest.raises(PreconditionError):
            e_function(1, -1, fast_config)


class TestReport:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_identity_residual(self, fast_config, quad, n):
        """gamma^(n) + delta^(n)/e = E[(X+)^n]"""
        report = moment_report(n, fast_config, quad)
        assert report.identity_residual < fast_config.agreement * 10
        assert report.to_dict()["monte_carlo"] is None

    def test_samples_need_a_seed(self, fast_config, quad):
        """No implicit seeding"""
        with pytest.raises(PreconditionError):
            moment_report(1, fast_config, quad, samples=20000)


class TestMonteCarlo:
    def test_reproducible(self):
        """The same seed gives bit-identical estimates"""
        first = monte_carlo_moments(1, 20000, seed=7)
        second = monte_carlo_moments(1, 20000, seed=7)
        assert first.to_dict() == second.to_dict()

    def test_seed_changes_estimate(self):
        """Different seeds draw different samples"""
        assert monte_carlo_moments(1, 20000, seed=7).full != monte_carlo_moments(1, 20000, seed=8).full

    def test_statistical_agreement(self):
        """Sample means within five standard errors of gamma and 1/e"""
        mc = monte_carlo_moments(1, 100000, seed=20240601)
        mean, se = mc.full
        assert abs(mean - 0.5772156649015329) < 5 * se
        mean, se = mc.nonpositive
        assert abs(mean - 0.36787944117144233) < 5 * se
        mean, se = mc.positive_part
        assert abs(mean - 0.7965995992970531) < 5 * se

    def test_preconditions(self):
        """Too few samples or an invalid seed"""
        with pytest.raises(PreconditionError):
            monte_carlo_moments(1, 100, seed=1)
        with pytest.raises(PreconditionError):
            monte_carlo_moments(1, 20000, seed=-1)

    def test_uniforms_stay_inside_the_unit_interval(self):
        """The extreme grid points map to finite Gumbel samples"""
        u = open_uniforms(np.array([0, UNIFORM_STEPS - 1], dtype=np.uint64))
        assert 0.0 < u[0] and u[1] < 1.0
        assert u[1] == 1.0 - 2.0 ** -53
        assert np.all(np.isfinite(-np.log(-np.log(u))))

    def test_report_includes_monte_carlo(self, fast_config, quad):
        """moment_report attaches the sampled estimates"""
        report = moment_report(1, fast_config, quad, samples=20000, seed=3)
        assert report.to_dict()["monte_carlo"]["samples"] == 20000
