'''
tests for the config and result handlers
'''

import pytest

from wgedebayes.censoring import parse_scheme
from wgedebayes.config_handler import EstimationConfig, SimConfig, TargetSpec, load_config_file, seed_from_env
from wgedebayes.errors import InputError, NumericalIntegrityError
from wgedebayes.result_handler import EstimateReport, MseTable, RunManifest, scheme_from_label, scheme_label

TABLE1_YAML = '''
params: {lambda: 0.022, theta: 1.95}
prior: {a: 0.3, b: 0.62}
hyper: {u: 0.13, v: 2.0, c: 1.12}
targets:
  alpha: {q: 1.0}
  series: {q: 2.0, t: 8.0, k: 5}
quadrature:
  b: {order: 8}
'''


class TestConfigs:

    def test_bundled(self, table1, table3):
        assert table1.known.lam == 0.022
        assert set(table1.targets) == {'alpha', 'series', 'parallel', 'hazard'}
        assert len(table3.schemes) == 12
        assert table3.true_params.alpha == 0.9570615

    def test_yaml(self, tmp_path):
        path = tmp_path / 'table1.yaml'
        path.write_text(TABLE1_YAML)
        config = EstimationConfig.from_file(path)
        assert config.targets['series'].query.k == 5
        assert config.quadrature.b.order == 8
        assert config.quadrature.a == EstimationConfig.default().quadrature.a

    def test_dict_round_trip(self, table3):
        assert SimConfig.from_dict(table3.to_dict()) == table3

    def test_missing_key(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"params": {"lambda": 1.0}}')
        with pytest.raises(InputError, match='theta'):
            EstimationConfig.from_file(path)

    def test_unreadable(self, tmp_path):
        with pytest.raises(InputError):
            load_config_file(tmp_path / 'missing.json')
        path = tmp_path / 'list.yaml'
        path.write_text('- 1\n- 2\n')
        with pytest.raises(InputError):
            load_config_file(path)

    def test_target_validation(self):
        with pytest.raises(InputError):
            TargetSpec('series', 1.0, 8.0)
        with pytest.raises(InputError):
            TargetSpec('hazard', 1.0, 0.0)
        with pytest.raises(InputError):
            TargetSpec('entropy', 1.0)

    def test_simulation_validation(self, table3):
        with pytest.raises(InputError):
            table3.updated(replications=0)
        with pytest.raises(InputError):
            table3.updated(schemes=())

    def test_seed_from_env(self, monkeypatch):
        monkeypatch.delenv('WGED_SEED', raising=False)
        assert seed_from_env(3) == 3
        monkeypatch.setenv('WGED_SEED', '17')
        assert seed_from_env(3) == 17
        monkeypatch.setenv('WGED_SEED', 'x')
        with pytest.raises(InputError):
            seed_from_env(3)


class TestResults:

    def test_scheme_label(self):
        scheme = parse_scheme('4,4,2,0*7')
        assert scheme_label(scheme) == 'n=20 m=10 (4*2,2,0*7)'
        assert scheme_from_label(scheme_label(scheme)) == scheme
        with pytest.raises(InputError):
            scheme_from_label('n=20 m=9 (4*2,2,0*7)')

    def test_mse_table_rejects_bad_rows(self):
        table = MseTable()
        scheme = parse_scheme('0*5')
        table.add(scheme, 'MLE', 'alpha', 'none', 1.0, 0.1)
        with pytest.raises(InputError):
            table.add(scheme, 'MLE', 'alpha', 'none', 1.0, 0.1)
        with pytest.raises(NumericalIntegrityError):
            table.add(scheme, 'BS', 'alpha', 'self', float('nan'), 0.1)
        with pytest.raises(NumericalIntegrityError):
            table.add(scheme, 'BS', 'alpha', 'self', 1.0, -0.1)
        with pytest.raises(InputError):
            table.get(scheme, 'BL', 'alpha')

    def test_mse_table_csv(self, tmp_path):
        table = MseTable()
        scheme = parse_scheme('2,0*4', 7)
        table.add(scheme, 'MLE', 'alpha', 'none', 1.0123, 0.05)
        table.add(scheme, 'BL', 'alpha', 'linex:1.0', 0.99, 0.04)
        path = tmp_path / 'mse.csv'
        table.to_csv(path)
        back = MseTable.from_csv(path)
        assert back.rows == table.rows
        assert back.schemes == [scheme]

    def test_estimate_report_text(self):
        report = EstimateReport('electric', parse_scheme('0*19'), 19, 19.86848)
        report.add('alpha', 'MLE', 'none', 0.9562884)
        report.add('alpha', 'BS', 'self', 0.9419926)
        report.add('hazard', 'MLE', 'none', 2.677426)
        lines = report.to_text().splitlines()
        assert lines[0] == 'electric: n = 19, m = 19, R = (0*19), S_m = 19.8684800'
        assert '0.9562884' in lines[-2]
        assert lines[-1].split()[-1] == '-'

    def test_estimate_report_frame(self):
        report = EstimateReport('electric', parse_scheme('0*19'), 19, 19.86848)
        report.add('hazard', 'MLE', 'none', 2.677426)
        report.add('alpha', 'BS', 'self', 0.9419926)
        df = report.to_dataframe()
        assert list(df.columns) == ['target', 'MLE', 'BS']
        assert list(df['target']) == ['alpha', 'hazard']
        assert df['MLE'].isna().tolist() == [True, False]

    def test_manifest(self, tmp_path):
        manifest = RunManifest('simulate', {'replications': 3}, seed=4, version='v0.1', outputs={'log': 'simulate.log'})
        manifest.to_json(tmp_path / 'manifest.json')
        assert RunManifest.from_json(tmp_path / 'manifest.json') == manifest
        (tmp_path / 'bad.json').write_text('{"config": {}}')
        with pytest.raises(InputError):
            RunManifest.from_json(tmp_path / 'bad.json')
