import math

import numpy as np
import pytest

from wgedebayes.data import MONTE_CARLO_TRUTH
from wgedebayes.errors import DomainError
from wgedebayes.wged import (
    PARALLEL,
    SERIES,
    HazardQuery,
    SystemQuery,
    WgedParams,
    alternating_binomial_sum,
    cdf,
    hazard,
    hazard_kernel,
    parallel_reliability_product,
    pdf,
    quantile,
    reliability,
    reliability_system,
    system_reliability_at,
    transformed_time,
)

SIMULATION_PARAMS = WgedParams(0.9570615, 3.0, 2.5)


class TestDistribution:

    def test_transformed_time(self):
        assert transformed_time(0.0, 3.0, 2.5) == 0.0
        assert transformed_time(1.0, 0.5, 2.0) == pytest.approx(math.expm1(0.5) ** 2, rel=1e-15)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            transformed_time(-1.0, 1.0, 1.0)

    def test_cdf_plus_reliability(self):
        x = np.linspace(0.01, 1.0, 50)
        np.testing.assert_allclose(cdf(SIMULATION_PARAMS, x) + reliability(SIMULATION_PARAMS, x), 1.0, rtol=1e-14)

    def test_pdf_is_cdf_derivative(self):
        h = 1e-6
        for x in (0.05, 0.3, 0.7):
            numeric = (cdf(SIMULATION_PARAMS, x + h) - cdf(SIMULATION_PARAMS, x - h)) / (2 * h)
            assert pdf(SIMULATION_PARAMS, x) == pytest.approx(numeric, rel=1e-6)

    def test_quantile_inverts_cdf(self):
        # R(x) stays above 1e-4 here, so cdf(x) is not rounded to 1
        x = np.array([0.02, 0.1, 0.3, 0.4])
        np.testing.assert_allclose(quantile(SIMULATION_PARAMS, cdf(SIMULATION_PARAMS, x)), x, rtol=1e-10)
        assert quantile(SIMULATION_PARAMS, 0.0) == 0.0

    @pytest.mark.parametrize('p', [1.0, -0.1, float('nan')])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            quantile(SIMULATION_PARAMS, p)

    def test_far_tail_cdf_rounds_to_one(self):
        assert cdf(SIMULATION_PARAMS, 0.9) == 1.0
        with pytest.raises(DomainError):
            quantile(SIMULATION_PARAMS, cdf(SIMULATION_PARAMS, 0.9))

    def test_hazard_kernel_at_zero(self):
        assert hazard_kernel(0.0, 0.7, 1.0) == pytest.approx(0.7)
        assert hazard_kernel(0.0, 0.7, 2.0) == 0.0
        with pytest.raises(DomainError):
            hazard_kernel(0.0, 0.7, 0.5)

    def test_hazard_is_pdf_over_reliability(self):
        x = 0.2
        assert hazard(SIMULATION_PARAMS, x) == pytest.approx(pdf(SIMULATION_PARAMS, x) / reliability(SIMULATION_PARAMS, x), rel=1e-14)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            WgedParams(-1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            WgedParams(1.0, float('inf'), 1.0)


class TestTrueValues:
    '''
    true values at the simulation parameters
    '''

    def test_series(self):
        value = reliability_system(SIMULATION_PARAMS, SystemQuery(0.1, 5, SERIES))
        assert value == pytest.approx(MONTE_CARLO_TRUTH['series'], abs=1e-6)

    def test_parallel(self):
        value = reliability_system(SIMULATION_PARAMS, SystemQuery(0.25, 5, PARALLEL))
        assert value == pytest.approx(MONTE_CARLO_TRUTH['parallel'], abs=1e-6)

    def test_hazard(self):
        assert hazard(SIMULATION_PARAMS, 0.1) == pytest.approx(MONTE_CARLO_TRUTH['hazard'], abs=1e-6)


class TestSystems:

    def test_series_is_power_of_reliability(self):
        r = reliability(SIMULATION_PARAMS, 0.1)
        assert reliability_system(SIMULATION_PARAMS, SystemQuery(0.1, 5, SERIES)) == pytest.approx(r ** 5, rel=1e-14)

    def test_single_component(self):
        x = 0.37
        assert system_reliability_at(x, 1, PARALLEL) == pytest.approx(math.exp(-x), rel=1e-15)
        assert system_reliability_at(x, 1, SERIES) == pytest.approx(math.exp(-x), rel=1e-15)

    @pytest.mark.parametrize('k', [2, 5, 12, 20])
    def test_alternating_matches_product(self, k):
        x = np.array([0.05, 0.5, 2.0])
        np.testing.assert_allclose(system_reliability_at(x, k, PARALLEL), parallel_reliability_product(x, k), atol=1e-9)

    def test_large_k_uses_product(self):
        x = 1.0
        assert system_reliability_at(x, 25, PARALLEL) == pytest.approx(1.0 - (1.0 - math.exp(-x)) ** 25, rel=1e-13)
        big = system_reliability_at(0.01, 10000, PARALLEL)
        assert 0.0 <= big <= 1.0

    def test_alternating_binomial_sum_length(self):
        with pytest.raises(DomainError):
            alternating_binomial_sum([1.0, 2.0], 3)

    @pytest.mark.parametrize('t, k, topology', [(1.0, 0, SERIES), (1.0, 10001, SERIES), (-1.0, 2, SERIES), (0.0, 2, PARALLEL), (1.0, 2, 'ring')])
    def test_query_validation(self, t, k, topology):
        with pytest.raises(DomainError):
            SystemQuery(t, k, topology)

    @pytest.mark.parametrize('t', [0.0, -0.5, float('inf')])
    def test_hazard_query_needs_positive_time(self, t):
        with pytest.raises(DomainError):
            HazardQuery(t)
