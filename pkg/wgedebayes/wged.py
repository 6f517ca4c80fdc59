'''
the Weibull generalized exponential distribution (WGED)

F(x) = 1 - exp(-alpha * w(x)), with the transformed time w(x) = (exp(lambda * x) - 1)^theta. alpha enters
only as a multiplier of w, so the estimators in this package work on alpha with (lambda, theta) known.
every function accepts scalars or numpy arrays and returns a float for scalar input.
'''

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from wgedebayes.errors import DomainError
from wgedebayes.numerics import as_output, compensated_sum

SERIES = 'series'
PARALLEL = 'parallel'
TOPOLOGIES = (SERIES, PARALLEL)

# above this many components the alternating binomial form loses all precision to cancellation
ALTERNATING_MAX_K = 20


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value) and value > 0):
        raise DomainError(f'{name} must be a positive finite number, got {value!r}')
    return float(value)


class KnownParams(NamedTuple):
    '''
    the shape parameters (lambda, theta) treated as known by the estimators
    '''
    lam: float
    theta: float

    @classmethod
    def checked(cls, lam, theta):
        return cls(_check_positive('lambda', lam), _check_positive('theta', theta))


@dataclass(frozen=True)
class WgedParams:
    '''
    parameters of a WGED distribution

    :param alpha: scale multiplier of the transformed time, > 0
    :param lam: rate inside the exponential, > 0
    :param theta: power applied to exp(lambda * x) - 1, > 0
    '''
    alpha: float
    lam: float
    theta: float

    def __post_init__(self):
        _check_positive('alpha', self.alpha)
        _check_positive('lambda', self.lam)
        _check_positive('theta', self.theta)

    @property
    def known(self):
        return KnownParams(self.lam, self.theta)

    @classmethod
    def from_dict(cls, config):
        '''
        :param config: dict with keys alpha, lambda, theta
        '''
        try:
            return cls(float(config['alpha']), float(config['lambda']), float(config['theta']))
        except KeyError as err:
            raise DomainError(f'missing WGED parameter {err}') from None

    def to_dict(self):
        return {'alpha': self.alpha, 'lambda': self.lam, 'theta': self.theta}


@dataclass(frozen=True)
class SystemQuery:
    '''
    a reliability target: k identical independent components at mission time t

    :param t: mission time, > 0
    :param k: number of components, 1 <= k <= 10000
    :param topology: 'series' or 'parallel'
    '''
    t: float
    k: int
    topology: str = SERIES

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0):
            raise DomainError(f'mission time must be finite and > 0, got {self.t}')
        if int(self.k) != self.k or not 1 <= self.k <= 10000:
            raise DomainError(f'component count must be an integer in [1, 10000], got {self.k}')
        if self.topology not in TOPOLOGIES:
            raise DomainError(f'topology must be one of {TOPOLOGIES}, got {self.topology!r}')


@dataclass(frozen=True)
class HazardQuery:
    '''
    a hazard-rate target at time t

    :param t: time, > 0
    '''
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0):
            raise DomainError(f'hazard time must be finite and > 0, got {self.t}')


def _check_times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f'times must be finite and >= 0, got {t}')
    return arr


def transformed_time(t, lam, theta):
    '''
    w(t) = (exp(lambda * t) - 1)^theta

    :param t: time(s) >= 0
    :param lam: lambda > 0
    :param theta: theta > 0
    :return: w(t), 0 at t = 0
    '''
    arr = _check_times(t)
    return as_output(np.power(np.expm1(lam * arr), theta))


def hazard_kernel(t, lam, theta):
    '''
    the alpha-free part of the hazard, lambda * theta * exp(lambda * t) * (exp(lambda * t) - 1)^(theta - 1)

    :param t: time(s) >= 0; t = 0 is undefined for theta < 1
    :param lam: lambda > 0
    :param theta: theta > 0
    :return: the kernel value(s)
    '''
    arr = _check_times(t)
    if theta < 1 and np.any(arr == 0):
        raise DomainError(f'hazard at t = 0 is unbounded for theta = {theta} < 1')
    if theta == 1:
        body = np.ones_like(arr)
    else:
        body = np.power(np.expm1(lam * arr), theta - 1.0)
    return as_output(lam * theta * np.exp(lam * arr) * body)


def cdf(params, x):
    '''
    F(x) = 1 - exp(-alpha * w(x))
    '''
    return as_output(-np.expm1(-params.alpha * np.asarray(transformed_time(x, params.lam, params.theta))))


def reliability(params, x):
    '''
    R(x) = exp(-alpha * w(x))
    '''
    return as_output(np.exp(-params.alpha * np.asarray(transformed_time(x, params.lam, params.theta))))


def hazard(params, x):
    '''
    h(x) = alpha * hazard_kernel(x)
    '''
    return as_output(params.alpha * np.asarray(hazard_kernel(x, params.lam, params.theta)))


def pdf(params, x):
    '''
    f(x) = h(x) * R(x)
    '''
    return as_output(np.asarray(hazard(params, x)) * np.asarray(reliability(params, x)))


def quantile(params, p):
    '''
    inverse cdf, (1 / lambda) * ln(1 + (-ln(1 - p) / alpha)^(1 / theta))

    :param params: WgedParams
    :param p: probability(ies) in [0, 1)
    :return: the quantile(s)
    '''
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr >= 1):
        raise DomainError(f'quantile probability must lie in [0, 1), got {p}')
    w = np.power(-np.log1p(-arr) / params.alpha, 1.0 / params.theta)
    return as_output(np.log1p(w) / params.lam)


def _log_binomials(k):
    '''
    ln C(k, i) for i = 1..k by the multiplicative recurrence
    '''
    i = np.arange(1, k + 1, dtype=float)
    return np.cumsum(np.log(k - i + 1.0) - np.log(i))


def alternating_binomial_sum(values, k):
    '''
    sum_{i=1..k} (-1)^(i-1) C(k, i) values[i-1], compensated

    :param values: sequence of k scalars or equally shaped arrays, values[i-1] belonging to index i
    :param k: number of components
    :return: the alternating sum
    '''
    if len(values) != k:
        raise DomainError(f'expected {k} values, got {len(values)}')
    log_c = _log_binomials(k)
    return compensated_sum(((-1.0) ** i) * np.exp(log_c[i]) * np.asarray(values[i], dtype=float) for i in range(k))


def system_reliability_at(cumulative_hazard, k, topology):
    '''
    reliability of k iid components given the per-component cumulative hazard alpha * w(t)

    series: exp(-k x); parallel: sum_{i=1..k} (-1)^(i-1) C(k, i) exp(-i x), switching to the product form
    1 - (1 - exp(-x))^k when k > ALTERNATING_MAX_K.

    :param cumulative_hazard: alpha * w(t), scalar or array >= 0
    :param k: number of components
    :param topology: 'series' or 'parallel'
    '''
    x = np.asarray(cumulative_hazard, dtype=float)
    if topology == SERIES:
        return as_output(np.exp(-k * x))
    if topology == PARALLEL:
        if k == 1:
            return as_output(np.exp(-x))
        if k > ALTERNATING_MAX_K:
            return parallel_reliability_product(x, k)
        return alternating_binomial_sum([np.exp(-(i + 1) * x) for i in range(k)], k)
    raise DomainError(f'unknown topology {topology!r}')


def parallel_reliability_product(cumulative_hazard, k):
    '''
    1 - (1 - exp(-x))^k evaluated as -expm1(k * log(-expm1(-x))); an independent oracle for the
    alternating form

    :param cumulative_hazard: alpha * w(t), scalar or array > 0
    :param k: number of components
    '''
    x = np.asarray(cumulative_hazard, dtype=float)
    with np.errstate(divide='ignore'):
        return as_output(-np.expm1(k * np.log(-np.expm1(-x))))


def reliability_system(params, query):
    '''
    system reliability at query.t for k iid WGED components

    series: exp(-k alpha w(t)). parallel: the alternating binomial sum sum_{i=1..k} (-1)^(i-1) C(k, i) exp(-i alpha w(t))
    for k <= ALTERNATING_MAX_K; for larger k (up to 10000) the same quantity is evaluated in the complementary
    product form 1 - (1 - exp(-alpha w(t)))^k, since the alternating terms cancel below double precision there.

    :param params: WgedParams
    :param query: SystemQuery
    :return: R_s or R_p in [0, 1]
    '''
    w = transformed_time(query.t, params.lam, params.theta)
    return system_reliability_at(params.alpha * w, query.k, query.topology)
