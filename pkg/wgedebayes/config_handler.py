'''
configuration for the estimate and simulate commands

configs are plain dicts on disk (json, or yaml through pyyaml) and frozen dataclasses in memory. the bundled
table1.json (electric data analysis) and table3.json (monte carlo study) live in wgedebayes/configs.
'''

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from wgedebayes.censoring import parse_scheme
from wgedebayes.classical import GammaPrior, LossSpec
from wgedebayes.data import TARGETS
from wgedebayes.ebayes import HyperPrior, NestedQuadrature
from wgedebayes.errors import InputError
from wgedebayes.wged import PARALLEL, SERIES, HazardQuery, KnownParams, SystemQuery, WgedParams

CONFIG_DIR = Path(__file__).resolve().parent / 'configs'


def bundled_config(name):
    '''
    path of a config shipped with the package

    :param name: 'table1' or 'table3'
    '''
    path = CONFIG_DIR / f'{name}.json'
    if not path.exists():
        raise InputError(f'no bundled config named {name!r}')
    return path


def load_config_file(file_name):
    '''
    read a config dict from a .json, .yaml or .yml file

    :param file_name: path to the config file
    :return: config dict
    '''
    path = Path(file_name)
    try:
        with open(path) as ff:
            if path.suffix.lower() in ('.yaml', '.yml'):
                config = yaml.safe_load(ff)
            else:
                config = json.load(ff)
    except OSError as err:
        raise InputError(f'cannot read config {path}: {err.strerror}') from None
    except (json.JSONDecodeError, yaml.YAMLError) as err:
        raise InputError(f'cannot parse config {path}: {err}') from None
    if not isinstance(config, dict):
        raise InputError(f'config {path} must hold a mapping at the top level')
    return config


def _require(config, key, where):
    if key not in config:
        raise InputError(f'{where} config is missing {key!r}')
    return config[key]


@dataclass(frozen=True)
class TargetSpec:
    '''
    one estimation target and its evaluation point

    :param name: 'alpha', 'series', 'parallel' or 'hazard'
    :param q: LINEX asymmetry used for this target
    :param t: mission time (reliabilities) or hazard time
    :param k: number of components (reliabilities)
    '''
    name: str
    q: float
    t: float = None
    k: int = None

    def __post_init__(self):
        if self.name not in TARGETS:
            raise InputError(f'unknown target {self.name!r}; expected one of {TARGETS}')
        if self.name in (SERIES, PARALLEL):
            if self.t is None or self.k is None:
                raise InputError(f'target {self.name} needs t and k')
            if not self.t > 0:
                raise InputError(f'target {self.name} needs t > 0, got {self.t}')
        if self.name == 'hazard' and (self.t is None or not self.t > 0):
            raise InputError(f'target hazard needs t > 0, got {self.t}')
        LossSpec.linex(self.q)

    @property
    def linex(self):
        return LossSpec.linex(self.q)

    @property
    def query(self):
        '''
        SystemQuery for reliabilities, HazardQuery for the hazard, None for alpha
        '''
        if self.name in (SERIES, PARALLEL):
            return SystemQuery(float(self.t), int(self.k), self.name)
        if self.name == 'hazard':
            return HazardQuery(float(self.t))
        return None

    @classmethod
    def from_dict(cls, name, config):
        k = config.get('k')
        return cls(name, float(_require(config, 'q', f'target {name}')), config.get('t'), None if k is None else int(k))

    def to_dict(self):
        out = {'q': self.q}
        if self.t is not None:
            out['t'] = self.t
        if self.k is not None:
            out['k'] = self.k
        return out


def _targets_from_dict(config):
    targets = _require(config, 'targets', 'top-level')
    return {name: TargetSpec.from_dict(name, targets[name]) for name in TARGETS if name in targets}


@dataclass(frozen=True)
class EstimationConfig:
    '''
    inputs of the estimate command

    :param known: KnownParams (lambda, theta)
    :param prior: GammaPrior for the bayes estimators
    :param hyper: HyperPrior for the e-bayes estimators
    :param targets: dict target name -> TargetSpec
    :param scheme: default censoring scheme text
    :param dataset: default built-in dataset name
    :param quadrature: NestedQuadrature
    '''
    known: KnownParams
    prior: GammaPrior
    hyper: HyperPrior
    targets: dict
    scheme: str = None
    dataset: str = None
    quadrature: NestedQuadrature = field(default_factory=NestedQuadrature)

    @classmethod
    def from_dict(cls, config):
        params = _require(config, 'params', 'estimation')
        return cls(
            known=KnownParams.checked(float(_require(params, 'lambda', 'params')), float(_require(params, 'theta', 'params'))),
            prior=GammaPrior.from_dict(_require(config, 'prior', 'estimation')),
            hyper=HyperPrior.from_dict(_require(config, 'hyper', 'estimation')),
            targets=_targets_from_dict(config),
            scheme=config.get('scheme'),
            dataset=config.get('dataset'),
            quadrature=NestedQuadrature.from_dict(config.get('quadrature')),
        )

    @classmethod
    def from_file(cls, file_name):
        return cls.from_dict(load_config_file(file_name))

    @classmethod
    def default(cls):
        return cls.from_file(bundled_config('table1'))

    def updated(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            'params': {'lambda': self.known.lam, 'theta': self.known.theta},
            'prior': self.prior.to_dict(),
            'hyper': self.hyper.to_dict(),
            'targets': {name: target.to_dict() for name, target in self.targets.items()},
            'scheme': self.scheme,
            'dataset': self.dataset,
            'quadrature': self.quadrature.to_dict(),
        }

    def to_json(self, file_name):
        '''
        write the config to a json file

        :param file_name: name of the file to write to
        '''
        with open(file_name, 'w') as ff:
            json.dump(self.to_dict(), ff, indent=4)


@dataclass(frozen=True)
class SimConfig:
    '''
    inputs of a monte carlo study

    :param true_params: WgedParams the samples are drawn from
    :param prior: GammaPrior for the bayes estimators
    :param hyper: HyperPrior for the e-bayes estimators
    :param schemes: tuple of CensoringScheme, in table order
    :param targets: dict target name -> TargetSpec (carries the LINEX q per target)
    :param replications: replications per scheme
    :param master_seed: root of every random stream
    :param redraw_truth: draw (a, b, alpha) from the hyperprior and prior in every replication
    :param n_procs: worker processes
    :param quadrature: NestedQuadrature
    '''
    true_params: WgedParams
    prior: GammaPrior
    hyper: HyperPrior
    schemes: tuple
    targets: dict
    replications: int = 2000
    master_seed: int = 1
    redraw_truth: bool = False
    n_procs: int = 1
    quadrature: NestedQuadrature = field(default_factory=NestedQuadrature)

    def __post_init__(self):
        if int(self.replications) < 1:
            raise InputError(f'replications must be >= 1, got {self.replications}')
        if int(self.master_seed) < 0:
            raise InputError(f'master_seed must be >= 0, got {self.master_seed}')
        if int(self.n_procs) < 1:
            raise InputError(f'n_procs must be >= 1, got {self.n_procs}')
        if not self.schemes:
            raise InputError('a simulation needs at least one censoring scheme')

    @property
    def loss_qs(self):
        return {name: target.q for name, target in self.targets.items()}

    @property
    def known(self):
        return self.true_params.known

    @classmethod
    def from_dict(cls, config):
        schemes = tuple(
            parse_scheme(str(_require(item, 'scheme', 'scheme entry')), int(_require(item, 'n', 'scheme entry')))
            for item in _require(config, 'schemes', 'simulation')
        )
        return cls(
            true_params=WgedParams.from_dict(_require(config, 'true_params', 'simulation')),
            prior=GammaPrior.from_dict(_require(config, 'prior', 'simulation')),
            hyper=HyperPrior.from_dict(_require(config, 'hyper', 'simulation')),
            schemes=schemes,
            targets=_targets_from_dict(config),
            replications=int(config.get('replications', 2000)),
            master_seed=int(config.get('master_seed', 1)),
            redraw_truth=bool(config.get('redraw_truth', False)),
            n_procs=int(config.get('n_procs', 1)),
            quadrature=NestedQuadrature.from_dict(config.get('quadrature')),
        )

    @classmethod
    def from_file(cls, file_name):
        return cls.from_dict(load_config_file(file_name))

    @classmethod
    def default(cls):
        return cls.from_file(bundled_config('table3'))

    def updated(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {
            'true_params': self.true_params.to_dict(),
            'prior': self.prior.to_dict(),
            'hyper': self.hyper.to_dict(),
            'schemes': [{'n': scheme.n, 'scheme': scheme.render()} for scheme in self.schemes],
            'targets': {name: target.to_dict() for name, target in self.targets.items()},
            'replications': self.replications,
            'master_seed': self.master_seed,
            'redraw_truth': self.redraw_truth,
            'n_procs': self.n_procs,
            'quadrature': self.quadrature.to_dict(),
        }

    def to_json(self, file_name):
        '''
        write the config to a json file

        :param file_name: name of the file to write to
        '''
        with open(file_name, 'w') as ff:
            json.dump(self.to_dict(), ff, indent=4)


def seed_from_env(seed):
    '''
    the WGED_SEED environment variable overrides a seed given on the command line
    '''
    value = os.environ.get('WGED_SEED')
    if value is None or not value.strip():
        return seed
    try:
        return int(value)
    except ValueError:
        raise InputError(f'WGED_SEED must be an integer, got {value!r}') from None
