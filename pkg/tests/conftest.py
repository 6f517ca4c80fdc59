import pytest

from wgedebayes.censoring import compute_s_m, parse_scheme, sample_from_data
from wgedebayes.config_handler import EstimationConfig, SimConfig
from wgedebayes.data import ELECTRIC_DATA, TABLE2_SCHEMES


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run long monte carlo tests')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long running test, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope='session')
def table1():
    '''
    the bundled electric-data analysis config
    '''
    return EstimationConfig.default()


@pytest.fixture(scope='session')
def table3():
    '''
    the bundled monte carlo config
    '''
    return SimConfig.default()


@pytest.fixture(scope='session')
def electric_summaries(table1):
    '''
    m -> SampleSummary of the electric data under the three published schemes
    '''
    out = {}
    for m, text in TABLE2_SCHEMES.items():
        scheme = parse_scheme(text, len(ELECTRIC_DATA))
        out[m] = compute_s_m(sample_from_data(ELECTRIC_DATA, scheme), table1.known.lam, table1.known.theta)
    return out


@pytest.fixture(scope='session')
def electric_summary(electric_summaries):
    return electric_summaries[19]
