'''
numerical building blocks: log-gamma/log-beta, compensated summation, adaptive gauss-legendre quadrature
and truncated alternating series.

integrands passed to the quadrature routines receive a 1d array of nodes and return either an array of the
same length or an array whose leading axis runs over the nodes (vector-valued integrands). vector-valued
integrals share one set of panels; a panel is accepted only when every component meets the tolerance.
'''

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_legendre

from wgedebayes.errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class QuadratureSpec:
    '''
    accuracy controls for the adaptive quadrature

    :param order: gauss-legendre nodes per panel
    :param abs_tol: absolute error target
    :param rel_tol: relative error target
    :param max_subdivisions: maximum number of panel bisections before giving up
    :param fixed_order: if set, skip adaptivity and apply a single rule of this order on each half interval
    '''
    order: int = 64
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    fixed_order: int = None

    def __post_init__(self):
        if self.order < 2:
            raise DomainError(f'quadrature order must be >= 2, got {self.order}')
        if self.abs_tol < 0 or self.rel_tol < 0 or (self.abs_tol == 0 and self.rel_tol == 0):
            raise DomainError('quadrature tolerances must be non-negative and not both zero')
        if self.max_subdivisions < 0:
            raise DomainError('max_subdivisions must be non-negative')

    @classmethod
    def from_dict(cls, config):
        '''
        build a spec from a config dict, ignoring missing keys

        :param config: dict with any of order, abs_tol, rel_tol, max_subdivisions, fixed_order
        '''
        config = dict(config or {})
        known = {k: config[k] for k in ('order', 'abs_tol', 'rel_tol', 'max_subdivisions', 'fixed_order') if k in config}
        return cls(**known)

    def to_dict(self):
        return {
            'order': self.order,
            'abs_tol': self.abs_tol,
            'rel_tol': self.rel_tol,
            'max_subdivisions': self.max_subdivisions,
            'fixed_order': self.fixed_order,
        }


@dataclass(frozen=True)
class SeriesSpec:
    '''
    truncation controls for alternating series

    :param term_tol: stop once two consecutive terms are below term_tol times the running sum
    :param max_terms: hard cap on the number of terms
    '''
    term_tol: float = 1e-13
    max_terms: int = 500

    def __post_init__(self):
        if self.term_tol <= 0:
            raise DomainError('term_tol must be positive')
        if self.max_terms < 2:
            raise DomainError('max_terms must be at least 2')


DEFAULT_QUADRATURE = QuadratureSpec()
DEFAULT_SERIES = SeriesSpec()


def log_gamma(x):
    '''
    natural log of the gamma function for x > 0

    :param x: positive scalar or array
    :return: log gamma(x)
    '''
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f'log_gamma requires finite x > 0, got {x}')
    return as_output(gammaln(arr))


def log_beta(u, v):
    '''
    log of the beta function, ln gamma(u) + ln gamma(v) - ln gamma(u + v)

    :param u: first shape, > 0
    :param v: second shape, > 0
    :return: log B(u, v)
    '''
    return as_output(log_gamma(u) + log_gamma(v) - log_gamma(np.add(u, v)))


def compensated_sum(terms):
    '''
    neumaier-compensated sum of an iterable of scalars or equally shaped arrays

    :param terms: iterable of terms
    :return: the compensated sum (float for scalar terms, ndarray otherwise)
    '''
    total = None
    comp = None
    for term in terms:
        term = np.asarray(term, dtype=float)
        if total is None:
            total = np.array(term, dtype=float, copy=True)
            comp = np.zeros_like(total)
            continue
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp = comp + np.where(big, (total - t) + term, (term - t) + total)
        total = t
    if total is None:
        return 0.0
    return as_output(total + comp)


@lru_cache(maxsize=None)
def _legendre_rule(order):
    nodes, weights = roots_legendre(order)
    return nodes, weights


def _scale_rows(weights, values):
    '''
    multiply the leading axis of values by weights
    '''
    return values * weights.reshape((-1,) + (1,) * (values.ndim - 1))


def _evaluate(f, x):
    values = np.asarray(f(x), dtype=float)
    if values.ndim == 0:
        values = np.full(x.shape, float(values))
    if values.shape[0] != x.shape[0]:
        raise DomainError(f'integrand returned leading dimension {values.shape[0]} for {x.shape[0]} nodes')
    if not np.all(np.isfinite(values)):
        bad = x[~np.all(np.isfinite(values.reshape(x.shape[0], -1)), axis=1)]
        raise DomainError(f'integrand is not finite at node(s) {bad[:3]}')
    return values


def _panel(f, lo, hi, order):
    nodes, weights = _legendre_rule(order)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) + half * nodes
    return half * np.sum(_scale_rows(weights, _evaluate(f, x)), axis=0)


def integrate_finite(f, lo, hi, spec=DEFAULT_QUADRATURE):
    '''
    adaptive gauss-legendre quadrature on a finite interval

    each panel is compared with the sum of its two halves; the panel with the largest discrepancy is bisected
    until the summed discrepancy meets max(abs_tol, rel_tol * |integral|) componentwise.

    :param f: integrand, called with a 1d array of nodes
    :param lo: lower limit
    :param hi: upper limit, >= lo
    :param spec: QuadratureSpec
    :return: the integral (float, or ndarray for vector-valued integrands)
    '''
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f'integration limits must be finite, got ({lo}, {hi})')
    if hi < lo:
        raise DomainError(f'integration limits reversed: ({lo}, {hi})')
    if hi == lo:
        return as_output(_panel(f, lo, hi, 2))

    if spec.fixed_order is not None:
        mid = 0.5 * (lo + hi)
        return as_output(_panel(f, lo, mid, spec.fixed_order) + _panel(f, mid, hi, spec.fixed_order))

    order = spec.order
    counter = itertools.count()
    heap = []

    def refine(a, b, whole):
        mid = 0.5 * (a + b)
        left = _panel(f, a, mid, order)
        right = _panel(f, mid, b, order)
        estimate = left + right
        error = np.abs(estimate - whole)
        heapq.heappush(heap, (-float(np.max(error)), next(counter), a, b, estimate, error, left, right))

    refine(lo, hi, _panel(f, lo, hi, order))
    subdivisions = 0
    while True:
        total = np.sum([item[4] for item in heap], axis=0)
        error = np.sum([item[5] for item in heap], axis=0)
        if np.all(error <= np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))):
            return as_output(total)
        if subdivisions >= spec.max_subdivisions:
            raise ConvergenceError(
                f'quadrature on ({lo}, {hi}) did not converge in {spec.max_subdivisions} subdivisions',
                estimate=as_output(total),
                error_bound=float(np.max(error)),
            )
        _, _, a, b, _, _, left, right = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        refine(a, mid, left)
        refine(mid, b, right)
        subdivisions += 1


def integrate_beta_weighted(g, u, v, spec=DEFAULT_QUADRATURE):
    '''
    integral of g(a) against the beta(u, v) density on (0, 1)

    the interval is split at 1/2. when u < 1 the left half uses a = s^(1/u) so that a^(u-1) da = ds / u, and
    when v < 1 the right half uses 1 - a = s^(1/v); both substitutions remove the endpoint singularity.

    :param g: function of a 1d array of a values, scalar- or vector-valued
    :param u: first beta shape, > 0
    :param v: second beta shape, > 0
    :param spec: QuadratureSpec
    :return: E[g(a)] under beta(u, v)
    '''
    if not (u > 0 and v > 0 and math.isfinite(u) and math.isfinite(v)):
        raise DomainError(f'beta shapes must be positive and finite, got u={u}, v={v}')
    log_b = log_beta(u, v)

    if u < 1:
        def left(s):
            a = s ** (1.0 / u)
            return _scale_rows((1.0 - a) ** (v - 1.0) / u, np.asarray(g(a), dtype=float))
        left_hi = 0.5 ** u
    else:
        def left(a):
            return _scale_rows(a ** (u - 1.0) * (1.0 - a) ** (v - 1.0), np.asarray(g(a), dtype=float))
        left_hi = 0.5

    if v < 1:
        def right(s):
            a = 1.0 - s ** (1.0 / v)
            return _scale_rows(a ** (u - 1.0) / v, np.asarray(g(a), dtype=float))
        right_lo, right_hi = 0.0, 0.5 ** v
    else:
        def right(a):
            return _scale_rows(a ** (u - 1.0) * (1.0 - a) ** (v - 1.0), np.asarray(g(a), dtype=float))
        right_lo, right_hi = 0.5, 1.0

    total = np.asarray(integrate_finite(left, 0.0, left_hi, spec)) + np.asarray(integrate_finite(right, right_lo, right_hi, spec))
    return as_output(total * math.exp(-log_b))


def integrate_semi_infinite(f, spec=DEFAULT_QUADRATURE, scale=1.0):
    '''
    integral of f over (0, inf) through alpha = scale * t / (1 - t)

    f must decay fast enough that the mapped integrand vanishes as t -> 1. choosing scale near the bulk of the
    integrand (e.g. a posterior mean) centres it in t.

    :param f: integrand, called with a 1d array of positive nodes
    :param spec: QuadratureSpec
    :param scale: positive scale of the map
    :return: the integral
    '''
    if not (scale > 0 and math.isfinite(scale)):
        raise DomainError(f'scale must be positive and finite, got {scale}')

    def mapped(t):
        one_minus = 1.0 - t
        alpha = scale * t / one_minus
        return _scale_rows(scale / one_minus ** 2, np.asarray(f(alpha), dtype=float))

    return integrate_finite(mapped, 0.0, 1.0, spec)


def sum_alternating_series(term, spec=DEFAULT_SERIES):
    '''
    sum term(0) + term(1) + ... until two consecutive terms fall below term_tol times the partial sum

    works elementwise when term returns arrays; the series stops once every element has met the criterion.

    :param term: function of the integer index j returning the j-th term
    :param spec: SeriesSpec
    :return: (sum, number of terms used)
    '''
    partial = None
    comp = None
    quiet = None
    for j in range(spec.max_terms):
        t = np.asarray(term(j), dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError(f'series term {j} is not finite')
        if partial is None:
            partial = np.array(t, dtype=float, copy=True)
            comp = np.zeros_like(partial)
            quiet = np.zeros(partial.shape, dtype=int)
            continue
        s = partial + t
        big = np.abs(partial) >= np.abs(t)
        comp = comp + np.where(big, (partial - s) + t, (t - s) + partial)
        partial = s
        small = np.abs(t) <= spec.term_tol * np.abs(partial + comp)
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 2):
            return as_output(partial + comp), j + 1
    raise ConvergenceError(
        f'alternating series did not converge in {spec.max_terms} terms',
        estimate=as_output(partial + comp),
        error_bound=float(np.max(np.abs(t))),
    )


def as_output(x):
    '''
    return python floats for 0-d results and arrays otherwise
    '''
    arr = np.asarray(x)
    if arr.ndim == 0:
        return float(arr)
    return arr
