import json
import math

import pytest

from wgedebayes.censoring import parse_scheme
from wgedebayes.config_handler import EstimationConfig, SimConfig
from wgedebayes.data import ELECTRIC_DATA, TABLE2
from wgedebayes.interface import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, main
from wgedebayes.result_handler import RunManifest
from wgedebayes.wged import transformed_time


def read_json(path):
    with open(path) as ff:
        return json.load(ff)


@pytest.fixture
def sim_config_file(tmp_path, table3):
    targets = {name: table3.targets[name] for name in ('alpha', 'hazard')}
    config = table3.updated(schemes=(parse_scheme('0*10'), parse_scheme('3,0*7')), targets=targets, replications=3, n_procs=1)
    path = tmp_path / 'sim.json'
    config.to_json(path)
    return path


class TestEstimate:

    def test_builtin_electric(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['estimate', '--builtin', 'electric', '--scheme', '4,4,1,0*7', '--n', '19', '--method', 'mle,bayes', '--out', str(out)])
        assert code == EXIT_OK
        report = read_json(out / 'estimates.json')
        assert report['m'] == 10
        assert report['n'] == 19
        alpha = report['estimates']['alpha']
        assert set(alpha) == {'MLE', 'BS', 'BL'}
        assert alpha['MLE']['value'] == pytest.approx(TABLE2['alpha'][10]['MLE'], abs=5e-7)
        assert alpha['BS']['value'] == pytest.approx(TABLE2['alpha'][10]['BS'], abs=5e-7)
        assert alpha['BL']['loss'] == 'linex:1'
        assert (out / 'estimates.txt').read_text().startswith('electric: n = 19, m = 10')
        manifest = RunManifest.from_json(out / 'manifest.json')
        assert manifest.command == 'estimate'
        assert manifest.outputs['json'] == 'estimates.json'

    def test_single_failure_file(self, tmp_path):
        data = tmp_path / 'one.txt'
        data.write_text('0.5\n')
        out = tmp_path / 'out'
        code = main(['estimate', str(data), '--method', 'mle', '--out', str(out)])
        assert code == EXIT_OK
        value = read_json(out / 'estimates.json')['estimates']['alpha']['MLE']['value']
        assert value == pytest.approx(1.0 / transformed_time(0.5, 0.022, 1.95), rel=1e-12)

    def test_data_file_defaults_to_complete_sample(self, tmp_path):
        data = tmp_path / 'ten.txt'
        data.write_text('\n'.join(str(x) for x in ELECTRIC_DATA[:10]) + '\n')
        out = tmp_path / 'out'
        assert main(['estimate', str(data), '--method', 'mle', '--out', str(out)]) == EXIT_OK
        report = read_json(out / 'estimates.json')
        assert (report['n'], report['m'], report['scheme']) == (10, 10, '0*10')

    def test_manifest_rerun_is_byte_identical(self, tmp_path):
        first, second = tmp_path / 'first', tmp_path / 'second'
        code = main(['estimate', '--builtin', 'electric', '--scheme', '1*4,0*11', '--n', '19', '--method', 'mle,bayes', '--loss', 'linex:2',
                     '--out', str(first)])
        assert code == EXIT_OK
        assert main(['estimate', '--manifest', str(first / 'manifest.json'), '--out', str(second)]) == EXIT_OK
        for name in ('estimates.json', 'estimates.txt'):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_manifest_rerun_of_data_file(self, tmp_path):
        data = tmp_path / 'times.txt'
        data.write_text('\n'.join(str(x) for x in ELECTRIC_DATA) + '\n')
        first, second = tmp_path / 'first', tmp_path / 'second'
        assert main(['estimate', str(data), '--method', 'mle,bayes', '--out', str(first)]) == EXIT_OK
        assert main(['estimate', '--manifest', str(first / 'manifest.json'), '--out', str(second)]) == EXIT_OK
        assert (first / 'estimates.json').read_bytes() == (second / 'estimates.json').read_bytes()

    def test_loss_override_keeps_mle(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['estimate', '--builtin', 'electric', '--method', 'mle,bayes', '--loss', 'linex:2', '--out', str(out)])
        assert code == EXIT_OK
        alpha = read_json(out / 'estimates.json')['estimates']['alpha']
        assert set(alpha) == {'MLE', 'BL'}
        assert alpha['BL']['loss'] == 'linex:2'

    def test_bad_data_file(self, tmp_path):
        data = tmp_path / 'bad.txt'
        data.write_text('1.0\nnot-a-number\n')
        assert main(['estimate', str(data), '--out', str(tmp_path / 'out')]) == EXIT_INPUT

    @pytest.mark.parametrize('extra', [['--scheme', '4,,1'], ['--scheme', '0*19', '--n', '20'], ['--method', 'mcmc'], ['--prior', '1,2,3']])
    def test_input_errors(self, tmp_path, extra):
        assert main(['estimate', '--builtin', 'electric', '--out', str(tmp_path / 'out')] + extra) == EXIT_INPUT

    def test_argparse_errors_exit_with_input_code(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(['estimate', '--k', 'five'])
        assert info.value.code == EXIT_INPUT

    def test_quadrature_failure(self, tmp_path):
        config = EstimationConfig.default().to_dict()
        config['quadrature']['b'] = {'order': 2, 'abs_tol': 0.0, 'rel_tol': 1e-15, 'max_subdivisions': 1}
        path = tmp_path / 'tight.json'
        path.write_text(json.dumps(config))
        code = main(['estimate', '--builtin', 'electric', '--config', str(path), '--method', 'ebayes1', '--loss', 'self',
                     '--out', str(tmp_path / 'out')])
        assert code == EXIT_NUMERICAL


class TestSimulate:

    def test_writes_tables(self, tmp_path, sim_config_file):
        out = tmp_path / 'run'
        assert main(['simulate', '--config', str(sim_config_file), '--out', str(out)]) == EXIT_OK
        for name in ('mse_table.csv', 'ordering_verdicts.csv', 'fig1.csv', 'fig4.csv', 'manifest.json', 'simulate.log'):
            assert (out / name).exists(), name
        assert not (out / 'fig2.csv').exists()
        header = (out / 'mse_table.csv').read_text().splitlines()[0]
        assert header == 'scheme,estimator,target,loss,mean,mse'

    def test_manifest_rerun_is_byte_identical(self, tmp_path, sim_config_file):
        first, second = tmp_path / 'first', tmp_path / 'second'
        assert main(['simulate', '--config', str(sim_config_file), '--seed', '9', '--out', str(first)]) == EXIT_OK
        assert main(['simulate', '--manifest', str(first / 'manifest.json'), '--out', str(second)]) == EXIT_OK
        assert (first / 'mse_table.csv').read_bytes() == (second / 'mse_table.csv').read_bytes()
        assert RunManifest.from_json(second / 'manifest.json').seed == 9

    def test_seed_from_environment(self, tmp_path, sim_config_file, monkeypatch):
        monkeypatch.setenv('WGED_SEED', '5')
        out = tmp_path / 'run'
        assert main(['simulate', '--config', str(sim_config_file), '--seed', '1', '--out', str(out)]) == EXIT_OK
        assert RunManifest.from_json(out / 'manifest.json').seed == 5

    def test_manifest_of_other_command(self, tmp_path):
        out = tmp_path / 'est'
        assert main(['estimate', '--builtin', 'electric', '--method', 'mle', '--out', str(out)]) == EXIT_OK
        assert main(['simulate', '--manifest', str(out / 'manifest.json'), '--out', str(tmp_path / 'sim')]) == EXIT_INPUT

    def test_bad_replications(self, tmp_path, sim_config_file):
        assert main(['simulate', '--config', str(sim_config_file), '--reps', '0', '--out', str(tmp_path / 'run')]) == EXIT_INPUT


class TestVerify:

    def test_table2(self, tmp_path):
        out = tmp_path / 'verify'
        assert main(['verify', '--suite', 'table2', '--out', str(out)]) == EXIT_OK
        assert (out / 'verify_table2.csv').exists()

    def test_oracles(self, tmp_path):
        out = tmp_path / 'verify'
        assert main(['verify', '--suite', 'oracles', '--trials', '3', '--out', str(out)]) == EXIT_OK

    def test_theorems(self, tmp_path):
        out = tmp_path / 'verify'
        assert main(['verify', '--suite', 'theorems', '--trials', '5', '--seed', '3', '--out', str(out)]) == EXIT_OK
        manifest = read_json(out / 'manifest.json')
        assert manifest['seed'] == 3
        assert not math.isnan(manifest['wall_clock'])

    def test_manifest_rerun_is_byte_identical(self, tmp_path):
        first, second = tmp_path / 'first', tmp_path / 'second'
        assert main(['verify', '--suite', 'oracles', '--trials', '2', '--seed', '8', '--out', str(first)]) == EXIT_OK
        assert main(['verify', '--manifest', str(first / 'manifest.json'), '--out', str(second)]) == EXIT_OK
        assert (first / 'verify_oracles.csv').read_bytes() == (second / 'verify_oracles.csv').read_bytes()
        assert RunManifest.from_json(second / 'manifest.json').seed == 8

    def test_manifest_of_other_command(self, tmp_path):
        out = tmp_path / 'est'
        assert main(['estimate', '--builtin', 'electric', '--method', 'mle', '--out', str(out)]) == EXIT_OK
        assert main(['verify', '--manifest', str(out / 'manifest.json'), '--out', str(tmp_path / 'verify')]) == EXIT_INPUT
