'''
maximum likelihood and bayes estimators of alpha and of the quantities derived from it

with (lambda, theta) known the likelihood depends on the data only through (m, S_m). a gamma(a, b) prior on
alpha gives the gamma(m + a, b + S_m) posterior, so every bayes estimate below is an expectation under that
gamma. the vectorized kernels (posterior_alpha, posterior_reliability) accept arrays of posterior shapes and
rates and are shared with the e-bayes estimators.
'''

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from wgedebayes.errors import DegenerateSampleError, DomainError, LossDomainError, NumericalIntegrityError
from wgedebayes.numerics import (
    DEFAULT_QUADRATURE,
    DEFAULT_SERIES,
    as_output,
    integrate_semi_infinite,
    sum_alternating_series,
)
from wgedebayes.wged import (
    ALTERNATING_MAX_K,
    PARALLEL,
    SERIES,
    HazardQuery,
    SystemQuery,
    WgedParams,
    alternating_binomial_sum,
    hazard_kernel,
    reliability_system,
    system_reliability_at,
    transformed_time,
)

SELF = 'self'
LINEX = 'linex'

# reliability estimates may overshoot [0, 1] by rounding only
RELIABILITY_SLACK = 1e-9


@dataclass(frozen=True)
class GammaPrior:
    '''
    gamma(a, b) prior on alpha, density proportional to alpha^(a - 1) exp(-b alpha)
    '''
    a: float
    b: float

    def __post_init__(self):
        for name in ('a', 'b'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f'prior {name} must be positive and finite, got {value}')

    @classmethod
    def from_dict(cls, config):
        return cls(float(config['a']), float(config['b']))

    def to_dict(self):
        return {'a': self.a, 'b': self.b}


@dataclass(frozen=True)
class LossSpec:
    '''
    a loss function: squared error (SELF) or LINEX with asymmetry q != 0

    :param kind: 'self' or 'linex'
    :param q: LINEX asymmetry, None for SELF
    '''
    kind: str
    q: float = None

    def __post_init__(self):
        if self.kind == SELF:
            if self.q is not None:
                raise DomainError('SELF takes no asymmetry parameter')
        elif self.kind == LINEX:
            if self.q is None or not math.isfinite(self.q) or self.q == 0:
                raise DomainError(f'LINEX needs a finite, nonzero q, got {self.q}')
        else:
            raise DomainError(f'unknown loss {self.kind!r}')

    @classmethod
    def self_loss(cls):
        return cls(SELF)

    @classmethod
    def linex(cls, q):
        return cls(LINEX, float(q))

    @classmethod
    def parse(cls, text):
        '''
        :param text: 'self' or 'linex:q'
        '''
        text = text.strip().lower()
        if text == SELF:
            return cls.self_loss()
        if text.startswith(LINEX + ':'):
            try:
                q = float(text.split(':', 1)[1])
            except ValueError:
                raise DomainError(f'cannot read LINEX q from {text!r}') from None
            return cls.linex(q)
        raise DomainError(f'loss must be "self" or "linex:q", got {text!r}')

    @property
    def label(self):
        return SELF if self.kind == SELF else f'{LINEX}:{self.q:g}'


@dataclass(frozen=True)
class PosteriorSummary:
    '''
    the gamma(shape, rate) posterior of alpha
    '''
    shape: float
    rate: float

    @classmethod
    def from_summary(cls, summary, prior):
        return cls(summary.m + prior.a, prior.b + summary.s_m)

    @property
    def mean(self):
        return self.shape / self.rate


def mle_alpha(summary):
    '''
    alpha_hat = m / S_m

    :param summary: SampleSummary
    '''
    if summary.s_m <= 0:
        raise DegenerateSampleError(f'S_m = {summary.s_m}: the MLE of alpha does not exist')
    return summary.m / summary.s_m


def mle_derived(summary, known, target):
    '''
    plug-in MLE of a system reliability or the hazard rate

    :param summary: SampleSummary
    :param known: KnownParams
    :param target: SystemQuery or HazardQuery
    '''
    params = WgedParams(mle_alpha(summary), known.lam, known.theta)
    if isinstance(target, SystemQuery):
        return reliability_system(params, target)
    if isinstance(target, HazardQuery):
        return params.alpha * hazard_kernel(target.t, known.lam, known.theta)
    raise DomainError(f'unknown target {target!r}')


def posterior_alpha(shape, rate, loss):
    '''
    bayes estimate of alpha for (arrays of) gamma posteriors

    SELF: shape / rate; LINEX: (shape / q) ln(1 + q / rate).
    '''
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if loss.kind == SELF:
        return as_output(shape / rate)
    if np.any(rate + loss.q <= 0):
        raise LossDomainError(f'LINEX with q = {loss.q} needs b + S_m + q > 0, got b + S_m = {np.min(rate)}')
    return as_output(shape / loss.q * np.log1p(loss.q / rate))


def _log_moment(shape, rate, x):
    '''
    ln E[exp(-x alpha)] for alpha ~ gamma(shape, rate)
    '''
    return -shape * np.log1p(x / rate)


def gamma_expectation(shape, rate, fn, spec=DEFAULT_QUADRATURE):
    '''
    E[fn(alpha)] for alpha ~ gamma(shape, rate), one scalar shape and a vector of rates

    the substitution alpha = z / rate makes z ~ gamma(shape, 1) for every rate, so all rates share one set of
    quadrature nodes.

    :param shape: scalar posterior shape
    :param rate: scalar or 1d array of posterior rates
    :param fn: function of an alpha array of shape (nodes, rates)
    :param spec: QuadratureSpec
    :return: array of expectations, one per rate (float for scalar rate)
    '''
    rates = np.atleast_1d(np.asarray(rate, dtype=float))
    log_norm = -gammaln(shape)

    def integrand(z):
        density = np.exp((shape - 1.0) * np.log(z) - z + log_norm)
        return density[:, None] * np.asarray(fn(z[:, None] / rates[None, :]), dtype=float)

    result = np.asarray(integrate_semi_infinite(integrand, spec, scale=shape))
    return as_output(result if np.ndim(rate) else result[0])


def posterior_expectation(post, fn, spec=DEFAULT_QUADRATURE):
    '''
    E[fn(alpha)] under a posterior summary, by quadrature

    :param post: PosteriorSummary
    :param fn: vectorized function of alpha
    :param spec: QuadratureSpec
    '''
    return gamma_expectation(post.shape, post.rate, fn, spec)


def _elementwise(shape, rate, scalar_fn):
    '''
    apply a scalar-shape kernel over broadcast shape/rate arrays, grouping equal shapes
    '''
    shape_b, rate_b = np.broadcast_arrays(np.asarray(shape, dtype=float), np.asarray(rate, dtype=float))
    if shape_b.ndim == 0:
        return scalar_fn(float(shape_b), float(rate_b))
    out = np.empty(shape_b.shape)
    for value in np.unique(shape_b):
        mask = shape_b == value
        out[mask] = scalar_fn(float(value), rate_b[mask])
    return out


def posterior_reliability(shape, rate, w, query, loss, quad_spec=DEFAULT_QUADRATURE, series_spec=DEFAULT_SERIES):
    '''
    bayes estimate of a system reliability for (arrays of) gamma posteriors

    SELF series and parallel with k <= ALTERNATING_MAX_K are closed form. LINEX series uses the alternating
    series -(1/q) ln sum_j (-q)^j / j! E[R_s^j]. LINEX parallel, and SELF parallel for larger k, integrate
    over the posterior.

    :param shape: posterior shape(s) m + a
    :param rate: posterior rate(s) b + S_m
    :param w: transformed mission time w(t)
    :param query: SystemQuery
    :param loss: LossSpec
    :return: estimate(s) with the broadcast shape of (shape, rate)
    '''
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    k = query.k

    if query.topology == SERIES and loss.kind == SELF:
        return as_output(np.exp(_log_moment(shape, rate, k * w)))

    if query.topology == SERIES:
        q = loss.q
        log_abs_q = math.log(abs(q))
        sign = -1.0 if q > 0 else 1.0

        # terms from j = 1 on, so the sum is E[exp(-q R)] - 1
        def term(i):
            j = i + 1
            return sign ** j * np.exp(j * log_abs_q - gammaln(j + 1) + _log_moment(shape, rate, j * k * w))

        excess, _ = sum_alternating_series(term, series_spec)
        return as_output(_linex_value(excess, q))

    if loss.kind == SELF and k <= ALTERNATING_MAX_K:
        moments = [np.exp(_log_moment(shape, rate, (i + 1) * w)) for i in range(k)]
        return as_output(alternating_binomial_sum(moments, k))

    if loss.kind == SELF:
        def scalar_kernel(s, r):
            return gamma_expectation(s, r, lambda alpha: system_reliability_at(alpha * w, k, PARALLEL), quad_spec)
        return as_output(_elementwise(shape, rate, scalar_kernel))

    q = loss.q

    def scalar_kernel(s, r):
        excess = gamma_expectation(s, r, lambda alpha: np.expm1(-q * np.asarray(system_reliability_at(alpha * w, k, PARALLEL))), quad_spec)
        return _linex_value(excess, q)

    return as_output(_elementwise(shape, rate, scalar_kernel))


def _linex_value(excess, q):
    '''
    -(1/q) ln E[exp(-q R)] from excess = E[exp(-q R)] - 1
    '''
    excess = np.asarray(excess, dtype=float)
    if np.any(excess <= -1):
        raise LossDomainError(f'LINEX expectation is not positive ({np.min(excess) + 1}); q = {q} is too large for double precision')
    return -np.log1p(excess) / q


def check_reliability(value, label):
    '''
    raise if a reliability estimate leaves [0, 1] by more than rounding; clip rounding excursions
    '''
    arr = np.asarray(value, dtype=float)
    if np.any(arr < -RELIABILITY_SLACK) or np.any(arr > 1 + RELIABILITY_SLACK):
        raise NumericalIntegrityError(f'{label} reliability estimate {value} lies outside [0, 1]')
    return as_output(np.clip(arr, 0.0, 1.0))


def bayes_alpha(summary, prior, loss):
    '''
    bayes estimate of alpha

    :param summary: SampleSummary
    :param prior: GammaPrior
    :param loss: LossSpec
    '''
    post = PosteriorSummary.from_summary(summary, prior)
    return posterior_alpha(post.shape, post.rate, loss)


def bayes_reliability(summary, prior, loss, query, known, quad_spec=DEFAULT_QUADRATURE, series_spec=DEFAULT_SERIES):
    '''
    bayes estimate of a series or parallel system reliability

    :param summary: SampleSummary
    :param prior: GammaPrior
    :param loss: LossSpec
    :param query: SystemQuery
    :param known: KnownParams
    '''
    post = PosteriorSummary.from_summary(summary, prior)
    w = transformed_time(query.t, known.lam, known.theta)
    value = posterior_reliability(post.shape, post.rate, w, query, loss, quad_spec, series_spec)
    return check_reliability(value, f'bayes {loss.label} {query.topology}')


def bayes_hazard(summary, prior, loss, t, known):
    '''
    bayes estimate of the hazard rate at t: hazard_kernel(t) times the bayes estimate of alpha

    :param summary: SampleSummary
    :param prior: GammaPrior
    :param loss: LossSpec
    :param t: time
    :param known: KnownParams
    '''
    return hazard_kernel(t, known.lam, known.theta) * bayes_alpha(summary, prior, loss)
