'''
progressive type-II censoring: scheme parsing and rendering, censored samples, the sufficient statistic S_m,
sample generation and failure-time files.
'''

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from wgedebayes.errors import DataFileError, DomainError, InputError, SchemeError, SchemeParseError
from wgedebayes.wged import transformed_time

_ITEM = re.compile(r'^(\d+)(?:\s*\*\s*(\d+))?$')


@dataclass(frozen=True)
class CensoringScheme:
    '''
    a progressive type-II censoring plan: n units on test, m observed failures, R_i survivors withdrawn at the
    i-th failure

    :param n: units on test
    :param removals: tuple (R_1, ..., R_m)
    '''
    n: int
    removals: tuple

    def __post_init__(self):
        removals = tuple(int(r) for r in self.removals)
        object.__setattr__(self, 'removals', removals)
        if len(removals) < 1:
            raise SchemeError('a censoring scheme needs at least one observed failure')
        if any(r < 0 for r in removals):
            raise SchemeError(f'removal counts must be non-negative, got {removals}')
        expected = self.m + sum(removals)
        if expected != self.n:
            raise SchemeError(
                f'm + sum(R) = {self.m} + {sum(removals)} = {expected} does not equal n = {self.n} '
                f'(off by {expected - self.n:+d})'
            )

    @property
    def m(self):
        return len(self.removals)

    @property
    def fraction(self):
        '''
        observed fraction m / n
        '''
        return self.m / self.n

    @classmethod
    def from_text(cls, text, n=None):
        return parse_scheme(text, n)

    def render(self):
        return render_scheme(self)

    def __str__(self):
        return f'({self.render()})'


@dataclass(frozen=True)
class CensoredSample:
    '''
    the observed failure times x_1 <= ... <= x_m under a scheme

    :param scheme: CensoringScheme
    :param times: tuple of m positive, non-decreasing failure times
    '''
    scheme: CensoringScheme
    times: tuple

    def __post_init__(self):
        times = tuple(float(x) for x in self.times)
        object.__setattr__(self, 'times', times)
        if len(times) != self.scheme.m:
            raise InputError(f'scheme has m = {self.scheme.m} failures but {len(times)} times were given')
        for i, x in enumerate(times):
            if not (math.isfinite(x) and x > 0):
                raise InputError(f'failure time {i + 1} must be positive and finite, got {x}')
            if i and x < times[i - 1]:
                raise InputError(f'failure times must be non-decreasing: x_{i} = {times[i - 1]} > x_{i + 1} = {x}')


@dataclass(frozen=True)
class SampleSummary:
    '''
    the sufficient statistic for alpha

    :param m: number of observed failures
    :param s_m: sum (R_i + 1) w(x_i)
    '''
    m: int
    s_m: float

    def __post_init__(self):
        if self.m < 1:
            raise InputError(f'm must be >= 1, got {self.m}')
        if not (math.isfinite(self.s_m) and self.s_m >= 0):
            raise InputError(f's_m must be finite and >= 0, got {self.s_m}')

    def scaled(self, factor):
        '''
        the same summary with s_m multiplied by factor
        '''
        return SampleSummary(self.m, self.s_m * factor)


def parse_scheme(text, n=None):
    '''
    parse a removal vector written as comma separated items, each 'v' or 'v*k' (value v repeated k times);
    surrounding parentheses are allowed

    :param text: e.g. '4,4,1,0*7'
    :param n: units on test; inferred as m + sum(R) when None
    :return: CensoringScheme
    '''
    body = text.strip()
    if body.startswith('(') and body.endswith(')'):
        body = body[1:-1]
    if not body.strip():
        raise SchemeParseError('empty censoring scheme')
    removals = []
    for item in body.split(','):
        match = _ITEM.match(item.strip())
        if match is None:
            raise SchemeParseError(f'cannot parse scheme item {item.strip()!r} in {text!r}')
        value = int(match.group(1))
        count = 1 if match.group(2) is None else int(match.group(2))
        if count < 1:
            raise SchemeParseError(f'repeat count must be >= 1 in item {item.strip()!r}')
        removals.extend([value] * count)
    if n is None:
        n = len(removals) + sum(removals)
    return CensoringScheme(int(n), tuple(removals))


def render_scheme(scheme):
    '''
    run-length encode a removal vector in the syntax accepted by parse_scheme

    :param scheme: CensoringScheme
    :return: e.g. '4,4,1,0*7'
    '''
    items = []
    run_value, run_length = scheme.removals[0], 0
    for r in scheme.removals:
        if r == run_value:
            run_length += 1
            continue
        items.append(_render_run(run_value, run_length))
        run_value, run_length = r, 1
    items.append(_render_run(run_value, run_length))
    return ','.join(items)


def _render_run(value, length):
    return str(value) if length == 1 else f'{value}*{length}'


def compute_s_m(sample, lam, theta):
    '''
    S_m = sum (R_i + 1) w(x_i), accumulated with math.fsum

    :param sample: CensoredSample
    :param lam: known lambda
    :param theta: known theta
    :return: SampleSummary
    '''
    w = np.atleast_1d(transformed_time(np.asarray(sample.times), lam, theta))
    s_m = math.fsum((r + 1) * float(wi) for r, wi in zip(sample.scheme.removals, w))
    return SampleSummary(sample.scheme.m, s_m)


def censor_complete_sample(times, scheme):
    '''
    apply a progressive plan retrospectively to a complete ordered sample of n failure times: after the i-th
    recorded failure the next R_i ordered values are taken as the withdrawn units

    :param times: n failure times
    :param scheme: CensoringScheme with scheme.n == len(times)
    :return: CensoredSample
    '''
    ordered = sorted(float(x) for x in times)
    if len(ordered) != scheme.n:
        raise SchemeError(f'complete sample has {len(ordered)} times but the scheme expects n = {scheme.n}')
    observed = []
    position = 0
    for r in scheme.removals:
        observed.append(ordered[position])
        position += r + 1
    return CensoredSample(scheme, tuple(observed))


def sample_from_data(times, scheme):
    '''
    build the censored sample for a data set: m values are taken as the observed failures, n values as a
    complete sample censored by censor_complete_sample

    :param times: failure times read from a file or a built-in data set
    :param scheme: CensoringScheme
    :return: CensoredSample
    '''
    if len(times) == scheme.m:
        return CensoredSample(scheme, tuple(sorted(times)))
    if len(times) == scheme.n:
        return censor_complete_sample(times, scheme)
    raise SchemeError(
        f'{len(times)} failure times match neither m = {scheme.m} nor n = {scheme.n} of scheme {scheme}'
    )


def replication_stream(master_seed, *indices):
    '''
    an independent random generator for a (master seed, index, ...) tuple

    :param master_seed: non-negative integer
    :param indices: further non-negative integers, e.g. scheme index and replication index
    :return: numpy Generator on a Philox bit generator
    '''
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(master_seed), *map(int, indices)])))


def generate_sample(scheme, quantile_fn, rng, max_redraws=100):
    '''
    draw a progressively censored sample through uniform spacings

    V_i = W_i^(1 / (i + R_m + ... + R_(m-i+1))), U_i = 1 - V_m V_(m-1) ... V_(m-i+1), x_i = Q(U_i).
    draws whose times tie or underflow to zero are redrawn.

    :param scheme: CensoringScheme
    :param quantile_fn: vectorized inverse cdf of the lifetime distribution
    :param rng: numpy Generator
    :param max_redraws: redraw limit
    :return: CensoredSample
    '''
    m = scheme.m
    tail_removals = np.cumsum(np.asarray(scheme.removals[::-1], dtype=float))
    exponents = np.arange(1, m + 1, dtype=float) + tail_removals
    for _ in range(max_redraws):
        # 1 - random() lies in (0, 1], keeping log finite
        log_w = np.log1p(-rng.random(m))
        log_v = log_w / exponents
        u = -np.expm1(np.cumsum(log_v[::-1]))
        if np.any(u <= 0) or np.any(u >= 1):
            continue
        times = np.asarray(quantile_fn(u), dtype=float)
        if np.all(times > 0) and np.all(np.diff(times) > 0) and np.all(np.isfinite(times)):
            return CensoredSample(scheme, tuple(times))
    raise DomainError(f'could not draw a sample without ties for scheme {scheme} in {max_redraws} attempts')


def read_failure_times(path):
    '''
    read one failure time per line; blank lines and lines starting with '#' are skipped

    :param path: path to a text file
    :return: tuple of floats
    '''
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as err:
        raise DataFileError(path, None, f'cannot read file: {err.strerror}') from None
    times = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith('#'):
            continue
        try:
            value = float(text)
        except ValueError:
            raise DataFileError(path, lineno, f'not a number: {text!r}') from None
        if not (math.isfinite(value) and value > 0):
            raise DataFileError(path, lineno, f'failure times must be positive and finite, got {text}')
        times.append(value)
    if not times:
        raise DataFileError(path, None, 'no failure times found')
    return tuple(times)
