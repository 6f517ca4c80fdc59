'''
containers for estimation and simulation results and the run manifest
'''

import math
import re
from dataclasses import dataclass, field

import pandas as pd

from wgedebayes.censoring import CensoringScheme, parse_scheme
from wgedebayes.data import ESTIMATORS, TARGETS
from wgedebayes.errors import InputError, NumericalIntegrityError
from wgedebayes.utils import format_value, read_json, write_csv, write_json

_SCHEME_LABEL = re.compile(r'^n=(\d+) m=(\d+) \((.*)\)$')


def scheme_label(scheme):
    '''
    the label a scheme carries in result tables, e.g. 'n=20 m=10 (4*2,2,0*7)'
    '''
    return f'n={scheme.n} m={scheme.m} {scheme}'


def scheme_from_label(label):
    match = _SCHEME_LABEL.match(str(label).strip())
    if match is None:
        raise InputError(f'cannot read a censoring scheme from label {label!r}')
    scheme = parse_scheme(match.group(3), int(match.group(1)))
    if scheme.m != int(match.group(2)):
        raise InputError(f'label {label!r} declares m = {match.group(2)} but the scheme has m = {scheme.m}')
    return scheme


class MseTable:
    '''
    mean estimate and mean squared error per (scheme, estimator, target)

    rows keep the order they were added in: schemes in config order, then targets, then estimators in
    ESTIMATORS order.
    '''

    COLUMNS = ('scheme', 'estimator', 'target', 'loss', 'mean', 'mse')

    def __init__(self, rows=None):
        self.rows = []
        self._index = {}
        for row in rows or []:
            self.add(**row)

    def add(self, scheme, estimator, target, loss, mean, mse):
        '''
        add one row

        :param scheme: CensoringScheme or its label
        :param estimator: estimator label, one of ESTIMATORS
        :param target: target name, one of TARGETS
        :param loss: 'none', 'self' or 'linex:q'
        :param mean: mean of the estimates over the replications
        :param mse: mean squared error over the replications
        '''
        label = scheme_label(scheme) if isinstance(scheme, CensoringScheme) else str(scheme)
        mean, mse = float(mean), float(mse)
        if not (math.isfinite(mean) and math.isfinite(mse)) or mse < 0:
            raise NumericalIntegrityError(f'invalid result for {estimator} {target} on {label}: mean {mean}, mse {mse}')
        key = (label, estimator, target)
        if key in self._index:
            raise InputError(f'duplicate result row {key}')
        self._index[key] = len(self.rows)
        self.rows.append({'scheme': label, 'estimator': estimator, 'target': target, 'loss': loss, 'mean': mean, 'mse': mse})

    def __len__(self):
        return len(self.rows)

    def get(self, scheme, estimator, target):
        '''
        the row for (scheme, estimator, target)
        '''
        label = scheme_label(scheme) if isinstance(scheme, CensoringScheme) else str(scheme)
        try:
            return self.rows[self._index[(label, estimator, target)]]
        except KeyError:
            raise InputError(f'no result for {estimator} {target} on {label}') from None

    def mse(self, scheme, estimator, target):
        return self.get(scheme, estimator, target)['mse']

    def has(self, scheme, estimator, target):
        label = scheme_label(scheme) if isinstance(scheme, CensoringScheme) else str(scheme)
        return (label, estimator, target) in self._index

    @property
    def scheme_labels(self):
        return list(dict.fromkeys(row['scheme'] for row in self.rows))

    @property
    def schemes(self):
        return [scheme_from_label(label) for label in self.scheme_labels]

    @property
    def estimators(self):
        present = {row['estimator'] for row in self.rows}
        return [est for est in ESTIMATORS if est in present]

    @property
    def targets(self):
        present = {row['target'] for row in self.rows}
        return [target for target in TARGETS if target in present]

    def to_dataframe(self):
        return pd.DataFrame(self.rows, columns=list(self.COLUMNS))

    @classmethod
    def from_dataframe(cls, df):
        missing = [col for col in cls.COLUMNS if col not in df.columns]
        if missing:
            raise InputError(f'result table is missing columns {missing}')
        return cls(df[list(cls.COLUMNS)].to_dict('records'))

    def to_csv(self, file_name):
        write_csv(self.to_dataframe(), file_name)

    @classmethod
    def from_csv(cls, file_name):
        return cls.from_dataframe(pd.read_csv(file_name, dtype={'loss': str}, keep_default_na=False))


@dataclass
class EstimateReport:
    '''
    the estimates for one data set under one censoring scheme

    :param dataset: data set name or data file path
    :param scheme: CensoringScheme
    :param m: observed failures
    :param s_m: sufficient statistic
    :param values: target -> estimator -> estimate
    :param losses: target -> estimator -> loss label
    '''
    dataset: str
    scheme: CensoringScheme
    m: int
    s_m: float
    values: dict = field(default_factory=dict)
    losses: dict = field(default_factory=dict)

    def add(self, target, estimator, loss, value):
        self.values.setdefault(target, {})[estimator] = float(value)
        self.losses.setdefault(target, {})[estimator] = loss

    def get(self, target, estimator):
        return self.values[target][estimator]

    @property
    def estimators(self):
        present = {est for by_est in self.values.values() for est in by_est}
        return [est for est in ESTIMATORS if est in present]

    def to_dict(self):
        return {
            'dataset': self.dataset,
            'scheme': self.scheme.render(),
            'n': self.scheme.n,
            'm': self.m,
            's_m': self.s_m,
            'estimates': {
                target: {est: {'loss': self.losses[target][est], 'value': value} for est, value in by_est.items()}
                for target, by_est in self.values.items()
            },
        }

    def to_json(self, file_name):
        '''
        write the report to a json file

        :param file_name: name of the file to write to
        '''
        write_json(self.to_dict(), file_name)

    def to_dataframe(self):
        '''
        one row per target, one column per estimator; NaN where an estimator was not run for a target
        '''
        estimators = self.estimators
        rows = [
            [target] + [self.values[target].get(est, float('nan')) for est in estimators]
            for target in TARGETS if target in self.values
        ]
        return pd.DataFrame(rows, columns=['target'] + estimators)

    def to_text(self):
        '''
        aligned table with one row per target and one column per estimator, 7 decimals
        '''
        title = f'{self.dataset}: n = {self.scheme.n}, m = {self.m}, R = {self.scheme}, S_m = {format_value(self.s_m)}\n'
        table = self.to_dataframe().to_string(index=False, na_rep='-', float_format=format_value)
        return title + table + '\n'


@dataclass
class RunManifest:
    '''
    what a command ran with and what it wrote

    :param command: 'estimate', 'simulate' or 'verify'
    :param config: fully resolved configuration dict
    :param seed: master seed, None when the command is deterministic without one
    :param version: package version
    :param wall_clock: elapsed seconds
    :param outputs: output name -> path
    :param argv: command line the run was started with
    '''
    command: str
    config: dict
    seed: int = None
    version: str = None
    wall_clock: float = None
    outputs: dict = field(default_factory=dict)
    argv: list = field(default_factory=list)

    def to_dict(self):
        return {
            'command': self.command,
            'config': self.config,
            'seed': self.seed,
            'version': self.version,
            'wall_clock': self.wall_clock,
            'outputs': dict(self.outputs),
            'argv': list(self.argv),
        }

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                command=config['command'],
                config=config['config'],
                seed=config.get('seed'),
                version=config.get('version'),
                wall_clock=config.get('wall_clock'),
                outputs=dict(config.get('outputs', {})),
                argv=list(config.get('argv', [])),
            )
        except (KeyError, TypeError) as err:
            raise InputError(f'malformed run manifest: {err}') from None

    def to_json(self, file_name):
        write_json(self.to_dict(), file_name)

    @classmethod
    def from_json(cls, file_name):
        try:
            config = read_json(file_name)
        except OSError as err:
            raise InputError(f'cannot read manifest {file_name}: {err.strerror}') from None
        except ValueError as err:
            raise InputError(f'cannot parse manifest {file_name}: {err}') from None
        return cls.from_dict(config)
