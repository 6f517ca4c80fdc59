'''
e-bayes estimators: bayes estimates averaged over a hyperprior on the gamma prior parameters (a, b)

a ~ beta(u, v) on (0, 1) and, independently, b has one of three densities on (0, c):
    prior 1: 1 / c              (uniform)
    prior 2: 2 (c - b) / c^2    (decreasing)
    prior 3: 2 b / c^2          (increasing)
the three b-densities satisfy density_2 + density_3 = 2 density_1, so every e-bayes triple obeys
value_2 + value_3 = 2 value_1. all three priors are evaluated in one pass over shared quadrature nodes.
'''

import math
from dataclasses import dataclass, field

import numpy as np

from wgedebayes.classical import (
    LINEX,
    SELF,
    LossSpec,
    check_reliability,
    gamma_expectation,
    posterior_reliability,
)
from wgedebayes.errors import ConvergenceError, DegenerateSampleError, DomainError, LossDomainError
from wgedebayes.numerics import QuadratureSpec, integrate_beta_weighted, integrate_finite
from wgedebayes.wged import PARALLEL, SERIES, SystemQuery, hazard_kernel, system_reliability_at, transformed_time

PRIOR_IDS = (1, 2, 3)

# below this c/S_m the prior spread is summed from its power series
SPREAD_SERIES_LIMIT = 0.25

# the LINEX closed forms lose about eps * S^2 / (|q| c) relative accuracy; below this bound on |q| c / S^2
# the b-average is integrated instead
LINEX_CLOSED_FORM_LIMIT = 2.5e-4


@dataclass(frozen=True)
class HyperPrior:
    '''
    hyperprior on the gamma prior parameters (a, b)

    :param u: first beta shape of a
    :param v: second beta shape of a
    :param c: upper end of the support of b
    :param prior_id: 1, 2 or 3, selecting the b-density
    '''
    u: float
    v: float
    c: float
    prior_id: int = 1

    def __post_init__(self):
        for name in ('u', 'v', 'c'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f'hyperparameter {name} must be positive and finite, got {value}')
        if self.prior_id not in PRIOR_IDS:
            raise DomainError(f'prior_id must be 1, 2 or 3, got {self.prior_id}')

    @property
    def a_mean(self):
        return self.u / (self.u + self.v)

    def with_prior(self, prior_id):
        return HyperPrior(self.u, self.v, self.c, prior_id)

    def density(self, b):
        return b_density(self.prior_id, b, self.c)

    @classmethod
    def from_dict(cls, config):
        return cls(float(config['u']), float(config['v']), float(config['c']), int(config.get('prior_id', 1)))

    def to_dict(self):
        return {'u': self.u, 'v': self.v, 'c': self.c, 'prior_id': self.prior_id}


@dataclass(frozen=True)
class EbayesTriple:
    '''
    one target's e-bayes estimates under priors 1, 2 and 3

    :param by_prior: (value_1, value_2, value_3)
    '''
    by_prior: tuple

    def __getitem__(self, prior_id):
        if prior_id not in PRIOR_IDS:
            raise DomainError(f'prior_id must be 1, 2 or 3, got {prior_id}')
        return self.by_prior[prior_id - 1]

    def scaled(self, factor):
        return EbayesTriple(tuple(factor * value for value in self.by_prior))

    @property
    def max_gap(self):
        return max(self.by_prior) - min(self.by_prior)

    @property
    def spacing_residual(self):
        '''
        |(value_2 - value_3) - 2 (value_1 - value_3)| relative to the largest magnitude
        '''
        v1, v2, v3 = self.by_prior
        scale = max(abs(v1), abs(v2), abs(v3)) or 1.0
        return abs((v2 - v3) - 2.0 * (v1 - v3)) / scale

    def increasing_in_b(self):
        '''
        value_2 < value_1 < value_3, the order of a target that grows with b (reliabilities)
        '''
        v1, v2, v3 = self.by_prior
        return v2 < v1 < v3

    def decreasing_in_b(self):
        '''
        value_3 < value_1 < value_2, the order of a target that falls with b (alpha, hazard)
        '''
        v1, v2, v3 = self.by_prior
        return v3 < v1 < v2

    def to_dict(self):
        return {f'prior{i}': value for i, value in zip(PRIOR_IDS, self.by_prior)}


@dataclass(frozen=True)
class NestedQuadrature:
    '''
    quadrature controls for the (a, b[, alpha]) integrals

    :param a: outer beta-weighted integral over a
    :param b: integral over b on (0, c)
    :param alpha: posterior integral over alpha (LINEX parallel only)
    :param outer_a: a-level rule when the integrand is itself a nested quadrature
    :param outer_b: b-level rule when the integrand is itself a nested quadrature
    '''
    a: QuadratureSpec = QuadratureSpec(order=16, rel_tol=1e-10)
    b: QuadratureSpec = QuadratureSpec(order=16, rel_tol=1e-10)
    alpha: QuadratureSpec = QuadratureSpec(order=32, rel_tol=1e-8)
    outer_a: QuadratureSpec = QuadratureSpec(order=8, fixed_order=8)
    outer_b: QuadratureSpec = QuadratureSpec(order=16, rel_tol=1e-7)

    @classmethod
    def from_dict(cls, config):
        '''
        :param config: dict mapping level names to QuadratureSpec dicts
        '''
        config = dict(config or {})
        defaults = cls()
        return cls(**{
            level: QuadratureSpec.from_dict(config[level]) if level in config else getattr(defaults, level)
            for level in ('a', 'b', 'alpha', 'outer_a', 'outer_b')
        })

    def to_dict(self):
        return {level: getattr(self, level).to_dict() for level in ('a', 'b', 'alpha', 'outer_a', 'outer_b')}


DEFAULT_NESTED = NestedQuadrature()


def b_density(prior_id, b, c):
    '''
    density of b on (0, c) under prior prior_id

    :param prior_id: 1, 2 or 3
    :param b: scalar or array in (0, c)
    :param c: upper end of the support
    '''
    b = np.asarray(b, dtype=float)
    if prior_id == 1:
        out = np.full(b.shape, 1.0 / c)
    elif prior_id == 2:
        out = 2.0 * (c - b) / c ** 2
    elif prior_id == 3:
        out = 2.0 * b / c ** 2
    else:
        raise DomainError(f'prior_id must be 1, 2 or 3, got {prior_id}')
    return float(out) if out.ndim == 0 else out


def _b_weights(b, c):
    '''
    the three b-densities stacked on the last axis, shape b.shape + (3,)
    '''
    return np.stack([np.asarray(b_density(i, b, c)) for i in PRIOR_IDS], axis=-1)


def _check_summary(summary):
    if summary.s_m <= 0:
        raise DegenerateSampleError(f'S_m = {summary.s_m}: e-bayes estimates need S_m > 0')


def prior_average(kernel, hp, a_spec, b_spec):
    '''
    E[kernel(a, b)] under the three hyperpriors in one pass

    :param kernel: function of (a array (na,), b array (nb,)) returning shape (nb, na)
    :param hp: HyperPrior (prior_id ignored)
    :param a_spec: QuadratureSpec for a
    :param b_spec: QuadratureSpec for b
    :return: EbayesTriple
    '''
    def over_a(a):
        def over_b(b):
            values = np.asarray(kernel(a, b), dtype=float)
            return _b_weights(b, hp.c)[:, :, None] * values[:, None, :]

        try:
            inner = integrate_finite(over_b, 0.0, hp.c, b_spec)
        except ConvergenceError as err:
            raise err.with_context(a_min=float(np.min(a)), a_max=float(np.max(a))) from None
        return np.asarray(inner).T

    return EbayesTriple(tuple(float(x) for x in integrate_beta_weighted(over_a, hp.u, hp.v, a_spec)))


def _prior_spread(x):
    '''
    (1 + 2 / x) ln(1 + x) - 2 = sum_{n>=2} (-1)^n (n - 1) / (n (n + 1)) x^n, for x = c / S_m
    '''
    if x >= SPREAD_SERIES_LIMIT:
        return (1.0 + 2.0 / x) * math.log1p(x) - 2.0
    terms = []
    power = x
    for n in range(2, 200):
        power *= x
        term = (-1) ** n * (n - 1) / (n * (n + 1)) * power
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            break
    return math.fsum(terms)


def ebayes_alpha_self_triple(summary, hp):
    '''
    SELF e-bayes estimates of alpha under all three priors (closed form)

    value_1 = f ln(1 + c / S) / c with f = m + u / (u + v); values 2 and 3 sit symmetrically at
    value_1 +/- f * spread(c / S) / c.
    '''
    _check_summary(summary)
    f = summary.m + hp.a_mean
    x = hp.c / summary.s_m
    alpha1 = f * math.log1p(x) / hp.c
    gap = f * _prior_spread(x) / hp.c
    return EbayesTriple((alpha1, alpha1 + gap, alpha1 - gap))


def ebayes_alpha_self(summary, hp):
    '''
    SELF e-bayes estimate of alpha under hp.prior_id

    :param summary: SampleSummary
    :param hp: HyperPrior
    '''
    return ebayes_alpha_self_triple(summary, hp)[hp.prior_id]


def ebayes_alpha_linex_triple(summary, hp, q, b_spec=None):
    '''
    LINEX e-bayes estimates of alpha under all three priors

    closed forms with every log ratio evaluated through log1p. when |q| c is small against S_m^2 the closed
    forms cancel badly and the (exact, one-dimensional) b-average of (m + a) ln(1 + q / (b + S)) / q is
    integrated instead; the a-average is linear and equals m + u / (u + v).
    '''
    _check_summary(summary)
    if not math.isfinite(q) or q == 0:
        raise DomainError(f'LINEX needs a finite, nonzero q, got {q}')
    s, c = summary.s_m, hp.c
    if s + q <= 0:
        raise LossDomainError(f'LINEX with q = {q} needs S_m + q > 0, got S_m = {s}')
    f = summary.m + hp.a_mean

    if abs(q) * c / s < LINEX_CLOSED_FORM_LIMIT * s:
        spec = QuadratureSpec(order=32, abs_tol=0.0, rel_tol=1e-13)

        def weighted(b):
            return _b_weights(b, c) * (np.log1p(q / (b + s)) / q)[:, None]

        values = np.asarray(integrate_finite(weighted, 0.0, c, spec)) * f
        return EbayesTriple(tuple(float(v) for v in values))

    log_a = math.log1p(c / (s + q))       # ln((c + S + q) / (S + q))
    log_b = math.log1p(c / s)             # ln((c + S) / S)
    log_l1 = -math.log1p(q / (c + s))     # ln((c + S) / (c + S + q))
    log_s = -math.log1p(q / s)            # ln(S / (S + q))

    alpha1 = -f / (c * q) * ((c + s) * log_l1 - s * log_s - q * log_a)
    alpha2 = f / (q * c ** 2) * (
        (s ** 2 + (2 * q + 2 * c) * s + q ** 2 + 2 * c * q) * log_a
        - (s ** 2 + 2 * c * s) * log_b
        - c ** 2 * log_l1
        - q * c
    )
    alpha3 = -f / (q * c ** 2) * ((s + q) ** 2 * log_a - s ** 2 * log_b + c ** 2 * log_l1 - q * c)
    return EbayesTriple((alpha1, alpha2, alpha3))


def ebayes_alpha_linex(summary, hp, q):
    '''
    LINEX e-bayes estimate of alpha under hp.prior_id

    :param summary: SampleSummary
    :param hp: HyperPrior
    :param q: LINEX asymmetry, nonzero
    '''
    return ebayes_alpha_linex_triple(summary, hp, q)[hp.prior_id]


def ebayes_alpha_triple(summary, hp, loss):
    if loss.kind == SELF:
        return ebayes_alpha_self_triple(summary, hp)
    return ebayes_alpha_linex_triple(summary, hp, loss.q)


def ebayes_reliability_triple(summary, hp, query, known, loss, nested=DEFAULT_NESTED, series_spec=None):
    '''
    e-bayes estimates of a system reliability under all three priors

    the bayes estimate for each (a, b) comes from classical.posterior_reliability and is averaged over
    beta(u, v) x b-density. the LINEX parallel estimate needs a posterior integral inside every (a, b)
    point; it runs with the outer_a / outer_b rules and one scalar posterior shape per a node.

    :param summary: SampleSummary
    :param hp: HyperPrior
    :param query: SystemQuery
    :param known: KnownParams
    :param loss: LossSpec
    :param nested: NestedQuadrature
    :return: EbayesTriple
    '''
    _check_summary(summary)
    m, s = summary.m, summary.s_m
    w = transformed_time(query.t, known.lam, known.theta)
    kwargs = {} if series_spec is None else {'series_spec': series_spec}

    three_level = loss.kind == LINEX and query.topology == PARALLEL

    if not three_level:
        def kernel(a, b):
            return posterior_reliability(m + a[None, :], b[:, None] + s, w, query, loss, nested.alpha, **kwargs)

        triple = prior_average(kernel, hp, nested.a, nested.b)
    else:
        q = loss.q

        def excess_fn(alpha):
            return np.expm1(-q * np.asarray(system_reliability_at(alpha * w, query.k, PARALLEL)))

        def kernel(a, b):
            columns = []
            for a_j in a:
                try:
                    excess = np.atleast_1d(gamma_expectation(m + a_j, b + s, excess_fn, nested.alpha))
                except ConvergenceError as err:
                    raise err.with_context(a=float(a_j), b_min=float(np.min(b)), b_max=float(np.max(b))) from None
                if np.any(excess <= -1):
                    raise LossDomainError(f'LINEX expectation is not positive at a = {a_j}')
                columns.append(-np.log1p(excess) / q)
            return np.stack(columns, axis=1)

        triple = prior_average(kernel, hp, nested.outer_a, nested.outer_b)

    label = f'e-bayes {loss.label} {query.topology}'
    return EbayesTriple(tuple(check_reliability(value, label) for value in triple.by_prior))


def ebayes_reliability_self(summary, hp, query, known, nested=DEFAULT_NESTED):
    '''
    SELF e-bayes estimate of a series or parallel reliability under hp.prior_id
    '''
    return ebayes_reliability_triple(summary, hp, query, known, LossSpec.self_loss(), nested)[hp.prior_id]


def ebayes_reliability_linex(summary, hp, query, known, q, nested=DEFAULT_NESTED):
    '''
    LINEX e-bayes estimate of a series or parallel reliability under hp.prior_id
    '''
    return ebayes_reliability_triple(summary, hp, query, known, LossSpec.linex(q), nested)[hp.prior_id]


def ebayes_hazard_triple(summary, hp, t, known, loss):
    '''
    e-bayes hazard estimates: hazard_kernel(t) times the alpha triple
    '''
    return ebayes_alpha_triple(summary, hp, loss).scaled(hazard_kernel(t, known.lam, known.theta))


def ebayes_hazard(summary, hp, t, known, loss):
    '''
    e-bayes estimate of the hazard rate at t under hp.prior_id

    :param summary: SampleSummary
    :param hp: HyperPrior
    :param t: time > 0
    :param known: KnownParams
    :param loss: LossSpec
    '''
    if not t > 0:
        raise DomainError(f'hazard time must be > 0, got {t}')
    return ebayes_hazard_triple(summary, hp, t, known, loss)[hp.prior_id]


@dataclass
class TheoremReport:
    '''
    ordering, spacing and contraction diagnostics of the SELF triples for one configuration

    :param hypothesis_met: whether 0 < c < S_m holds; no claim is made otherwise
    :param triples: target name -> EbayesTriple at the observed S_m
    :param orderings: target name -> whether the expected order holds
    :param spacing: target name -> relative spacing residual
    :param gaps: target name -> max pairwise gap at S_m, 10 S_m, 100 S_m
    '''
    hypothesis_met: bool
    c_over_s: float
    triples: dict = field(default_factory=dict)
    orderings: dict = field(default_factory=dict)
    spacing: dict = field(default_factory=dict)
    gaps: dict = field(default_factory=dict)

    SPACING_TOL = {'alpha': 1e-12, 'hazard': 1e-12, SERIES: 1e-9, PARALLEL: 1e-9}
    CONTRACTION_WINDOW = (50.0, 200.0)
    # gaps that contract with the square of S_m
    QUADRATIC_TARGETS = ('alpha', 'hazard')
    # gaps that also carry the change of the reliability level between S_m and 10 S_m
    RELIABILITY_TARGETS = (SERIES, PARALLEL)

    def contraction_ratios(self, target):
        g1, g10, g100 = self.gaps[target]
        return (g1 / g10 if g10 else math.inf, g10 / g100 if g100 else math.inf)

    def _outside_window(self, names):
        if not self.hypothesis_met or self.c_over_s > 0.1:
            return []
        lo, hi = self.CONTRACTION_WINDOW
        out = []
        for name in names:
            if name not in self.gaps:
                continue
            ratio = self.contraction_ratios(name)[0]
            if not lo <= ratio <= hi:
                out.append(f'contraction of {name} gap by {ratio:.4g} outside [{lo}, {hi}]')
        return out

    def failures(self):
        '''
        list of human readable failed checks (empty when everything holds or the hypothesis is not met)
        '''
        if not self.hypothesis_met:
            return []
        failed = [f'ordering of {name} triple {self.triples[name].by_prior}' for name, ok in self.orderings.items() if not ok]
        failed += [
            f'spacing of {name} triple: residual {residual:.3g}'
            for name, residual in self.spacing.items()
            if residual > self.SPACING_TOL[name]
        ]
        return failed + self._outside_window(self.QUADRATIC_TARGETS)

    def findings(self):
        '''
        reliability triples whose gap contraction falls outside CONTRACTION_WINDOW; reported, never failed
        '''
        return self._outside_window(self.RELIABILITY_TARGETS)

    def passed(self):
        return not self.failures()

    def to_dict(self):
        return {
            'hypothesis_met': self.hypothesis_met,
            'c_over_s': self.c_over_s,
            'triples': {name: triple.to_dict() for name, triple in self.triples.items()},
            'orderings': dict(self.orderings),
            'spacing': dict(self.spacing),
            'gaps': {name: list(values) for name, values in self.gaps.items()},
            'contraction': {name: self.contraction_ratios(name)[0] for name in self.gaps},
            'failures': self.failures(),
            'findings': self.findings(),
        }


def check_theorem_properties(summary, hp, query, t, known, nested=DEFAULT_NESTED):
    '''
    evaluate the SELF triples of alpha, hazard(t) and the series/parallel reliabilities at (query.t, query.k)
    and report their orderings, spacing residuals and gap contraction as S_m grows 10x and 100x

    :param summary: SampleSummary
    :param hp: HyperPrior (prior_id ignored)
    :param query: SystemQuery; both topologies are evaluated
    :param t: hazard time
    :param known: KnownParams
    :return: TheoremReport
    '''
    _check_summary(summary)
    self_loss = LossSpec.self_loss()
    report = TheoremReport(hypothesis_met=0 < hp.c < summary.s_m, c_over_s=hp.c / summary.s_m)
    if not report.hypothesis_met:
        return report

    def triples_at(scaled):
        return {
            'alpha': ebayes_alpha_self_triple(scaled, hp),
            'hazard': ebayes_hazard_triple(scaled, hp, t, known, self_loss),
            SERIES: ebayes_reliability_triple(scaled, hp, SystemQuery(query.t, query.k, SERIES), known, self_loss, nested),
            PARALLEL: ebayes_reliability_triple(scaled, hp, SystemQuery(query.t, query.k, PARALLEL), known, self_loss, nested),
        }

    report.triples = triples_at(summary)
    for name, triple in report.triples.items():
        report.orderings[name] = triple.increasing_in_b() if name in (SERIES, PARALLEL) else triple.decreasing_in_b()
        report.spacing[name] = triple.spacing_residual
    scaled = [triples_at(summary.scaled(factor)) for factor in (10.0, 100.0)]
    for name, triple in report.triples.items():
        report.gaps[name] = (triple.max_gap, scaled[0][name].max_gap, scaled[1][name].max_gap)
    return report
