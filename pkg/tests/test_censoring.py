import numpy as np
import pytest
from scipy import stats

from wgedebayes.censoring import (
    CensoredSample,
    CensoringScheme,
    SampleSummary,
    censor_complete_sample,
    compute_s_m,
    generate_sample,
    parse_scheme,
    read_failure_times,
    render_scheme,
    replication_stream,
    sample_from_data,
)
from wgedebayes.classical import mle_alpha
from wgedebayes.data import ELECTRIC_DATA, TABLE2
from wgedebayes.errors import DataFileError, InputError, SchemeError, SchemeParseError
from wgedebayes.wged import WgedParams, cdf, quantile, transformed_time

SIMULATION_PARAMS = WgedParams(0.9570615, 3.0, 2.5)


class TestSchemes:

    def test_parse_repeats(self):
        scheme = parse_scheme('4,4,1,0*7')
        assert scheme.removals == (4, 4, 1) + (0,) * 7
        assert scheme.m == 10
        assert scheme.n == 19

    def test_parse_with_parentheses_and_spaces(self):
        scheme = parse_scheme(' (1 * 4, 0*11) ', 19)
        assert scheme.removals == (1,) * 4 + (0,) * 11

    def test_render(self):
        assert render_scheme(parse_scheme('4,4,2,0*7')) == '4*2,2,0*7'
        assert parse_scheme('0*19').render() == '0*19'
        assert str(parse_scheme('3')) == '(3)'

    def test_render_parses_back(self):
        scheme = parse_scheme('5*3,0*12', 30)
        assert parse_scheme(scheme.render(), scheme.n) == scheme

    @pytest.mark.parametrize('text', ['', '4,,1', 'a*2', '2*0', '-1,0', '1.5'])
    def test_parse_errors(self, text):
        with pytest.raises(SchemeParseError):
            parse_scheme(text)

    def test_inconsistent_n(self):
        with pytest.raises(SchemeError, match='off by'):
            parse_scheme('4,4,1,0*7', 20)

    def test_scheme_validation(self):
        with pytest.raises(SchemeError):
            CensoringScheme(3, ())
        with pytest.raises(SchemeError):
            CensoringScheme(2, (-1, 2))

    def test_fraction(self):
        assert parse_scheme('4,4,2,0*7').fraction == pytest.approx(0.5)


class TestSamples:

    def test_censored_sample_validation(self):
        scheme = parse_scheme('1,0')
        with pytest.raises(InputError):
            CensoredSample(scheme, (2.0, 1.0))
        with pytest.raises(InputError):
            CensoredSample(scheme, (0.0, 1.0))
        with pytest.raises(InputError):
            CensoredSample(scheme, (1.0,))

    def test_summary_validation(self):
        with pytest.raises(InputError):
            SampleSummary(0, 1.0)
        with pytest.raises(InputError):
            SampleSummary(3, -1.0)

    def test_retrospective_censoring_skips_withdrawn(self):
        scheme = parse_scheme('4,4,1,0*7', 19)
        sample = censor_complete_sample(ELECTRIC_DATA, scheme)
        assert sample.times == (0.19, 3.16, 7.35, 8.27, 12.06, 31.75, 32.52, 33.91, 36.71, 72.89)

    def test_sample_from_data_lengths(self):
        scheme = parse_scheme('1,0', 3)
        assert sample_from_data((2.0, 1.0), scheme).times == (1.0, 2.0)
        assert sample_from_data((3.0, 1.0, 2.0), scheme).times == (1.0, 3.0)
        with pytest.raises(SchemeError):
            sample_from_data((1.0, 2.0, 3.0, 4.0), scheme)

    @pytest.mark.parametrize('m, text', [(10, '4,4,1,0*7'), (15, '1*4,0*11'), (19, '0*19')])
    def test_electric_mle(self, m, text):
        scheme = parse_scheme(text, 19)
        summary = compute_s_m(sample_from_data(ELECTRIC_DATA, scheme), 0.022, 1.95)
        assert summary.m == m
        assert mle_alpha(summary) == pytest.approx(TABLE2['alpha'][m]['MLE'], abs=5e-7)

    def test_s_m_by_hand(self):
        scheme = parse_scheme('2,0', 4)
        summary = compute_s_m(CensoredSample(scheme, (0.5, 1.5)), 1.0, 2.0)
        expected = 3 * transformed_time(0.5, 1.0, 2.0) + transformed_time(1.5, 1.0, 2.0)
        assert summary.s_m == pytest.approx(expected, rel=1e-15)


class TestGeneration:

    def test_shape_and_order(self):
        scheme = parse_scheme('4,4,2,0*7')
        sample = generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(1, 0, 0))
        assert len(sample.times) == scheme.m
        assert all(x > 0 for x in sample.times)
        assert list(sample.times) == sorted(sample.times)

    def test_streams_are_reproducible(self):
        scheme = parse_scheme('0*20')
        draws = [
            generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(7, 2, 11)).times
            for _ in range(2)
        ]
        assert draws[0] == draws[1]
        other = generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(7, 2, 12)).times
        assert other != draws[0]

    def test_scaled_statistic_is_gamma(self):
        '''
        alpha * S_m is a sum of m normalized exponential spacings, i.e. gamma(m, 1)
        '''
        scheme = parse_scheme('4,4,2,0*7')
        values = []
        for rep in range(2000):
            sample = generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(3, 0, rep))
            values.append(SIMULATION_PARAMS.alpha * compute_s_m(sample, SIMULATION_PARAMS.lam, SIMULATION_PARAMS.theta).s_m)
        values = np.asarray(values)
        assert values.mean() == pytest.approx(scheme.m, abs=5 * np.sqrt(scheme.m / len(values)))
        assert stats.kstest(values, stats.gamma(scheme.m).cdf).pvalue > 1e-3

    def test_first_failure_is_minimum_of_n(self):
        '''
        alpha * w(x_1) is exponential with rate n
        '''
        scheme = parse_scheme('5*4,0*16')
        firsts = []
        for rep in range(2000):
            sample = generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(5, 0, rep))
            firsts.append(SIMULATION_PARAMS.alpha * transformed_time(sample.times[0], SIMULATION_PARAMS.lam, SIMULATION_PARAMS.theta))
        assert stats.kstest(np.asarray(firsts), stats.expon(scale=1.0 / scheme.n).cdf).pvalue > 1e-3

    def test_complete_samples_follow_the_distribution(self):
        scheme = CensoringScheme(5000, (0,) * 5000)
        passes = 0
        for seed in range(20):
            sample = generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(seed, 0, 0))
            if stats.kstest(np.asarray(sample.times), lambda x: cdf(SIMULATION_PARAMS, x)).pvalue > 0.01:
                passes += 1
        assert passes >= 19

    def test_uniform_lifetime_ks_distance(self):
        n = 10000
        sample = generate_sample(CensoringScheme(n, (0,) * n), lambda p: p, replication_stream(41, 0, 0))
        assert stats.kstest(np.asarray(sample.times), 'uniform').statistic < 1.63 / np.sqrt(n)

    def test_pooled_replications_follow_the_distribution(self):
        scheme = parse_scheme('0*20')
        pooled = np.concatenate([
            generate_sample(scheme, lambda p: quantile(SIMULATION_PARAMS, p), replication_stream(43, 0, rep)).times
            for rep in range(5000)
        ])
        distance = stats.kstest(pooled, lambda x: cdf(SIMULATION_PARAMS, x)).statistic
        assert distance < 1.63 / np.sqrt(len(pooled))


class TestDataFiles:

    def test_reads_values(self, tmp_path):
        path = tmp_path / 'times.txt'
        path.write_text('# minutes\n0.5\n\n1.25\n')
        assert read_failure_times(path) == (0.5, 1.25)

    def test_bad_line_number(self, tmp_path):
        path = tmp_path / 'times.txt'
        path.write_text('# minutes\n0.5\n\n1.25\nabc\n')
        with pytest.raises(DataFileError) as info:
            read_failure_times(path)
        assert info.value.line == 5
        assert ':5:' in str(info.value)

    def test_non_positive(self, tmp_path):
        path = tmp_path / 'times.txt'
        path.write_text('1.0\n-2.0\n')
        with pytest.raises(DataFileError) as info:
            read_failure_times(path)
        assert info.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFileError) as info:
            read_failure_times(tmp_path / 'nope.txt')
        assert info.value.line is None

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'times.txt'
        path.write_text('# nothing\n')
        with pytest.raises(DataFileError):
            read_failure_times(path)
