'''
tests for the quadrature, series and special-function building blocks
'''

import math

import numpy as np
import pytest

from wgedebayes.errors import ConvergenceError, DomainError
from wgedebayes.numerics import (
    QuadratureSpec,
    SeriesSpec,
    compensated_sum,
    integrate_beta_weighted,
    integrate_finite,
    integrate_semi_infinite,
    log_beta,
    log_gamma,
    sum_alternating_series,
)


class TestSpecialFunctions:

    def test_log_gamma_matches_lgamma(self):
        for x in (1e-3, 0.5, 1.0, 7.25, 150.0):
            assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-14)

    def test_log_gamma_vectorized(self):
        x = np.array([0.5, 2.0, 10.0])
        np.testing.assert_allclose(log_gamma(x), [math.lgamma(v) for v in x], rtol=1e-14)

    @pytest.mark.parametrize('bad', [0.0, -1.0, float('nan'), float('inf')])
    def test_log_gamma_domain(self, bad):
        with pytest.raises(DomainError):
            log_gamma(bad)

    def test_log_beta(self):
        assert log_beta(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), rel=1e-14)
        assert log_beta(0.13, 2.0) == pytest.approx(math.lgamma(0.13) + math.lgamma(2.0) - math.lgamma(2.13), rel=1e-14)


class TestCompensatedSum:

    def test_recovers_cancelled_unit(self):
        assert compensated_sum([1e16, 1.0, -1e16]) == 1.0

    def test_arrays(self):
        total = compensated_sum([np.array([1e16, 1.0]), np.array([1.0, 2.0]), np.array([-1e16, 3.0])])
        np.testing.assert_array_equal(total, [1.0, 6.0])

    def test_empty(self):
        assert compensated_sum([]) == 0.0


class TestIntegrateFinite:

    def test_sine(self):
        assert integrate_finite(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-10)

    def test_vector_valued(self):
        value = integrate_finite(lambda x: np.stack([x, x ** 2], axis=1), 0.0, 1.0)
        np.testing.assert_allclose(value, [0.5, 1.0 / 3.0], rtol=1e-12)

    def test_zero_width(self):
        assert integrate_finite(np.exp, 1.5, 1.5) == 0.0

    def test_reversed_limits(self):
        with pytest.raises(DomainError):
            integrate_finite(np.exp, 1.0, 0.0)

    def test_fixed_order(self):
        spec = QuadratureSpec(order=8, fixed_order=8)
        # a degree-7 polynomial is exact on each half
        assert integrate_finite(lambda x: x ** 7, 0.0, 2.0, spec) == pytest.approx(32.0, rel=1e-13)

    def test_convergence_error_carries_estimate(self):
        spec = QuadratureSpec(order=2, abs_tol=0.0, rel_tol=1e-15, max_subdivisions=1)
        with pytest.raises(ConvergenceError) as info:
            integrate_finite(np.sqrt, 0.0, 1.0, spec)
        assert info.value.estimate == pytest.approx(2.0 / 3.0, rel=1e-2)
        assert info.value.error_bound > 0

    def test_non_finite_integrand(self):
        with pytest.raises(DomainError):
            integrate_finite(lambda x: np.full_like(x, np.inf), 0.0, 1.0)


class TestBetaWeighted:

    @pytest.mark.parametrize('u, v', [(0.3, 0.5), (0.13, 2.0), (2.0, 3.0), (1.0, 1.0)])
    def test_mean(self, u, v):
        assert integrate_beta_weighted(lambda a: a, u, v) == pytest.approx(u / (u + v), rel=1e-8)

    def test_normalized(self):
        assert integrate_beta_weighted(lambda a: np.ones_like(a), 0.13, 2.0) == pytest.approx(1.0, rel=1e-8)

    def test_second_moment(self):
        u, v = 0.7, 0.4
        expected = u * (u + 1) / ((u + v) * (u + v + 1))
        assert integrate_beta_weighted(lambda a: a ** 2, u, v) == pytest.approx(expected, rel=1e-8)

    def test_bad_shapes(self):
        with pytest.raises(DomainError):
            integrate_beta_weighted(lambda a: a, 0.0, 1.0)


class TestSemiInfinite:

    def test_exponential(self):
        assert integrate_semi_infinite(lambda x: np.exp(-x)) == pytest.approx(1.0, rel=1e-8)

    def test_scaled_gamma_moment(self):
        value = integrate_semi_infinite(lambda x: x ** 4 * np.exp(-x), scale=5.0)
        assert value == pytest.approx(24.0, rel=1e-8)

    def test_bad_scale(self):
        with pytest.raises(DomainError):
            integrate_semi_infinite(lambda x: np.exp(-x), scale=-1.0)


class TestAlternatingSeries:

    def test_exp_minus_one(self):
        total, n_terms = sum_alternating_series(lambda j: (-1.0) ** j / math.factorial(j))
        assert total == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert n_terms < 30

    def test_elementwise(self):
        x = np.array([0.5, 2.0])
        total, _ = sum_alternating_series(lambda j: (-x) ** j / math.factorial(j))
        np.testing.assert_allclose(total, np.exp(-x), rtol=1e-12)

    def test_truncation_limit(self):
        with pytest.raises(ConvergenceError):
            sum_alternating_series(lambda j: (-1.0) ** j / (j + 1.0), SeriesSpec(max_terms=3))
