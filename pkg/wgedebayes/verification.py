'''
verification suites behind `wgedebayes verify`

theorems: random-configuration sweep of the e-bayes ordering, spacing and contraction properties
table2:   golden comparison with the published electric-data estimates
oracles:  closed forms against independent quadrature, series and special-function evaluations
'''

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.special import hyp1f1

from wgedebayes.censoring import SampleSummary, compute_s_m, parse_scheme, replication_stream, sample_from_data
from wgedebayes.classical import (
    GammaPrior,
    LossSpec,
    PosteriorSummary,
    bayes_alpha,
    bayes_reliability,
    gamma_expectation,
    posterior_alpha,
    posterior_expectation,
    posterior_reliability,
)
from wgedebayes.config_handler import EstimationConfig, TargetSpec
from wgedebayes.data import BUILTIN_DATASETS, TABLE2, TABLE2_SCHEMES, TABLE2_UNREPRODUCIBLE, table2_tolerance
from wgedebayes.ebayes import (
    DEFAULT_NESTED,
    HyperPrior,
    check_theorem_properties,
    ebayes_alpha_linex_triple,
    ebayes_alpha_self_triple,
    prior_average,
)
from wgedebayes.errors import InputError
from wgedebayes.montecarlo import evaluate_estimators, is_self_estimator
from wgedebayes.numerics import QuadratureSpec, integrate_beta_weighted
from wgedebayes.utils import write_csv, write_to_log
from wgedebayes.wged import (
    ALTERNATING_MAX_K,
    PARALLEL,
    SERIES,
    KnownParams,
    SystemQuery,
    parallel_reliability_product,
    system_reliability_at,
)

SUITES = ('theorems', 'table2', 'oracles')

CHECK_COLUMNS = ('suite', 'name', 'detail', 'value', 'reference', 'error', 'tolerance', 'status')

PASS, FAIL, REPORTED = 'pass', 'fail', 'reported'

# tight rules for the brute-force side of the oracle comparisons
ORACLE_QUADRATURE = QuadratureSpec(order=32, abs_tol=0.0, rel_tol=1e-12, max_subdivisions=400)


@dataclass
class SuiteResult:
    '''
    outcome of one verification suite

    :param suite: suite name
    :param checks: DataFrame with columns CHECK_COLUMNS
    '''
    suite: str
    checks: pd.DataFrame

    @property
    def failures(self):
        return self.checks[self.checks['status'] == FAIL]

    @property
    def passed(self):
        return len(self.failures) == 0

    def counts(self):
        return {status: int((self.checks['status'] == status).sum()) for status in (PASS, FAIL, REPORTED)}

    def summary_line(self):
        counts = self.counts()
        verdict = 'PASS' if self.passed else 'FAIL'
        return f'{self.suite}: {verdict} ({counts[PASS]} passed, {counts[FAIL]} failed, {counts[REPORTED]} reported)'

    def to_text(self, limit=50):
        '''
        summary line followed by the failing and reported checks
        '''
        shown = self.checks[self.checks['status'] != PASS].head(limit)
        text = self.summary_line() + '\n'
        if len(shown):
            formatters = {'value': '{:.10g}'.format, 'reference': '{:.10g}'.format, 'error': '{:.3g}'.format}
            table = shown[['name', 'status', 'value', 'reference', 'error', 'detail']].rename(columns={'name': 'check'})
            text += table.to_string(index=False, formatters=formatters, justify='left') + '\n'
        return text

    def to_csv(self, file_name):
        write_csv(self.checks, file_name)


def _check(suite, name, detail, value, reference, error, tolerance, status=None):
    if status is None:
        status = PASS if error <= tolerance else FAIL
    return (suite, name, detail, float(value), float(reference), float(error), float(tolerance), status)


def _relative(value, reference):
    return abs(value - reference) / max(abs(reference), 1e-300)


def _frame(rows):
    return pd.DataFrame(rows, columns=list(CHECK_COLUMNS))


def random_configuration(rng):
    '''
    a random (summary, hyperprior, query, hazard time, known) tuple with 0 < c < S_m

    the mission time is placed where the per-component cumulative hazard is moderate, so reliabilities stay
    away from 0 and 1.
    '''
    known = KnownParams(float(rng.uniform(0.2, 3.0)), float(rng.uniform(0.5, 3.0)))
    c = float(rng.uniform(0.1, 3.0))
    c_over_s = float(np.exp(rng.uniform(math.log(0.005), math.log(0.9))))
    m = int(rng.integers(2, 60))
    summary = SampleSummary(m, c / c_over_s)
    hp = HyperPrior(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.1, 3.0)), c)
    k = int(rng.integers(2, 6))
    alpha_scale = m / summary.s_m
    w = float(rng.uniform(0.2, 1.5)) / (k * alpha_scale)
    t = math.log1p(w ** (1.0 / known.theta)) / known.lam
    return summary, hp, SystemQuery(t, k, SERIES), t, known


def run_theorem_suite(trials=1000, seed=1, nested=DEFAULT_NESTED, log_file=None):
    '''
    sweep check_theorem_properties over random configurations

    :param trials: number of configurations
    :param seed: master seed
    :return: SuiteResult, one check per configuration
    '''
    rows = []
    for trial in range(trials):
        rng = replication_stream(seed, 0, trial)
        summary, hp, query, t, known = random_configuration(rng)
        report = check_theorem_properties(summary, hp, query, t, known, nested)
        failures, findings = report.failures(), report.findings()
        worst_spacing = max(report.spacing.values()) if report.spacing else 0.0
        detail = (
            f'm={summary.m} S={summary.s_m:.6g} u={hp.u:.4g} v={hp.v:.4g} c={hp.c:.4g} '
            f'lambda={known.lam:.4g} theta={known.theta:.4g} t={t:.4g} k={query.k}'
        )
        if failures or findings:
            detail += ': ' + '; '.join(failures + findings)
        status = FAIL if failures else REPORTED if findings else PASS
        rows.append(_check('theorems', f'trial {trial}', detail, report.c_over_s, 0.0, worst_spacing, 1e-9, status))
        if failures:
            write_to_log(log_file, f'theorem check failed at trial {trial}: {detail}')
        elif findings:
            write_to_log(log_file, f'theorem finding at trial {trial}: {detail}')
    return SuiteResult('theorems', _frame(rows))


def table2_estimates(config=None):
    '''
    every estimator of every target on the electric data under the three published schemes

    :param config: EstimationConfig, default the bundled table1 config
    :return: dict m -> target -> estimator -> value
    '''
    config = config or EstimationConfig.default()
    data = BUILTIN_DATASETS['electric']
    out = {}
    for m, text in TABLE2_SCHEMES.items():
        scheme = parse_scheme(text, len(data))
        summary = compute_s_m(sample_from_data(data, scheme), config.known.lam, config.known.theta)
        out[m] = evaluate_estimators(summary, config.known, config.prior, config.hyper, config.targets, config.quadrature)
    return out


def run_table2_suite(config=None, log_file=None):
    '''
    compare all tabulated electric-data cells; cells known to be inconsistent with their published inputs are
    reported with both values but do not fail the suite

    :return: SuiteResult, one check per cell
    '''
    estimates = table2_estimates(config)
    rows = []
    for target, by_m in TABLE2.items():
        for m, by_est in by_m.items():
            for est, published in by_est.items():
                value = estimates[m][target][est]
                error = abs(value - published)
                tolerance = table2_tolerance(target, est)
                reason = TABLE2_UNREPRODUCIBLE.get((target, m, est))
                status = REPORTED if reason else None
                rows.append(_check('table2', f'{target} m={m} {est}', reason or '', value, published, error, tolerance, status))
    result = SuiteResult('table2', _frame(rows))
    write_to_log(log_file, result.summary_line())
    return result


def _oracle_configuration(rng):
    m = int(rng.integers(1, 40))
    s = float(np.exp(rng.uniform(math.log(0.5), math.log(200.0))))
    hp = HyperPrior(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.05, 0.9)) * s)
    return SampleSummary(m, s), hp


def _ebayes_alpha_oracles(rng, trial):
    '''
    closed-form e-bayes alpha triples against brute (a, b) quadrature of the bayes estimate
    '''
    summary, hp = _oracle_configuration(rng)
    m, s = summary.m, summary.s_m
    q = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 3.0))
    q = max(q, -0.5 * s)
    detail = f'm={m} S={s:.6g} u={hp.u:.4g} v={hp.v:.4g} c={hp.c:.4g} q={q:.4g}'
    rows = []
    for loss, closed in ((LossSpec.self_loss(), ebayes_alpha_self_triple(summary, hp)),
                         (LossSpec.linex(q), ebayes_alpha_linex_triple(summary, hp, q))):
        brute = prior_average(
            lambda a, b: posterior_alpha(m + a[None, :], b[:, None] + s, loss), hp, ORACLE_QUADRATURE, ORACLE_QUADRATURE
        )
        for prior_id in (1, 2, 3):
            rows.append(_check('oracles', f'ebayes alpha {loss.kind} prior {prior_id} #{trial}', detail,
                               closed[prior_id], brute[prior_id], _relative(closed[prior_id], brute[prior_id]), 1e-8))
    return rows


def _bayes_oracles(rng, trial):
    '''
    bayes SELF alpha and series reliability against posterior quadrature; LINEX series against quadrature of
    E[exp(-q R)]
    '''
    summary, _ = _oracle_configuration(rng)
    prior = GammaPrior(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.1, 3.0)))
    post = PosteriorSummary.from_summary(summary, prior)
    k = int(rng.integers(1, 8))
    w = float(rng.uniform(0.05, 1.0)) / (k * post.mean)
    q = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 3.0))
    detail = f'shape={post.shape:.6g} rate={post.rate:.6g} k={k} w={w:.4g} q={q:.4g}'
    query = SystemQuery(1.0, k, SERIES)
    # lambda = ln(1 + w) and theta = 1 put w(1) at w
    known = KnownParams(math.log1p(w), 1.0)

    alpha = bayes_alpha(summary, prior, LossSpec.self_loss())
    alpha_ref = posterior_expectation(post, lambda x: x, ORACLE_QUADRATURE)
    series = bayes_reliability(summary, prior, LossSpec.self_loss(), query, known)
    series_ref = posterior_expectation(post, lambda x: np.exp(-k * w * x), ORACLE_QUADRATURE)
    linex = posterior_reliability(post.shape, post.rate, w, query, LossSpec.linex(q))
    linex_ref = -math.log(gamma_expectation(post.shape, post.rate, lambda x: np.exp(-q * np.exp(-k * w * x)), ORACLE_QUADRATURE)) / q
    return [
        _check('oracles', f'bayes alpha self #{trial}', detail, alpha, alpha_ref, _relative(alpha, alpha_ref), 1e-7),
        _check('oracles', f'bayes series self #{trial}', detail, series, series_ref, _relative(series, series_ref), 1e-7),
        _check('oracles', f'bayes series linex #{trial}', detail, linex, linex_ref, _relative(linex, linex_ref), 1e-8),
    ]


def _beta_moment_oracle(rng, trial):
    '''
    E[rho^(m + a)] for a ~ beta(u, v) equals rho^m 1F1(u; u + v; ln rho)
    '''
    u, v = float(rng.uniform(0.05, 3.0)), float(rng.uniform(0.05, 3.0))
    rho = float(rng.uniform(0.05, 0.999))
    m = int(rng.integers(1, 40))
    value = integrate_beta_weighted(lambda a: rho ** (m + a), u, v, ORACLE_QUADRATURE)
    reference = rho ** m * hyp1f1(u, u + v, math.log(rho))
    detail = f'u={u:.4g} v={v:.4g} rho={rho:.6g} m={m}'
    return [_check('oracles', f'beta moment #{trial}', detail, value, reference, _relative(value, reference), 1e-9)]


def _parallel_form_oracle(rng, trial):
    '''
    alternating binomial parallel reliability against the complementary product
    '''
    k = int(rng.integers(2, ALTERNATING_MAX_K + 1))
    x = float(rng.uniform(0.05, 3.0))
    value = system_reliability_at(x, k, PARALLEL)
    reference = parallel_reliability_product(x, k)
    return [_check('oracles', f'parallel forms #{trial}', f'k={k} x={x:.6g}', value, reference, abs(value - reference), 1e-9)]


def _linex_continuity_checks(config):
    '''
    every LINEX estimator at q = 1e-6 against its SELF counterpart on the electric data
    '''
    data = BUILTIN_DATASETS['electric']
    scheme = parse_scheme(TABLE2_SCHEMES[19], len(data))
    summary = compute_s_m(sample_from_data(data, scheme), config.known.lam, config.known.theta)
    targets = {name: TargetSpec(name, 1e-6, target.t, target.k) for name, target in config.targets.items()}
    estimates = evaluate_estimators(summary, config.known, config.prior, config.hyper, targets, config.quadrature)
    rows = []
    for target, by_est in estimates.items():
        for est, value in by_est.items():
            if est == 'MLE' or is_self_estimator(est):
                continue
            partner = est.replace('L', 'S')
            reference = by_est[partner]
            rows.append(_check('oracles', f'linex continuity {target} {est}', f'q=1e-6 vs {partner}', value,
                               reference, abs(value - reference), 1e-4))
    return rows


def run_oracle_suite(trials=100, seed=1, config=None, log_file=None):
    '''
    closed-form versus independent evaluations

    :param trials: random configurations per oracle family
    :param seed: master seed
    :param config: EstimationConfig for the continuity checks, default the bundled table1 config
    :return: SuiteResult
    '''
    config = config or EstimationConfig.default()
    rows = []
    families = (_ebayes_alpha_oracles, _bayes_oracles, _beta_moment_oracle, _parallel_form_oracle)
    for family_idx, family in enumerate(families, start=1):
        for trial in range(trials):
            rows.extend(family(replication_stream(seed, family_idx, trial), trial))
        write_to_log(log_file, f'oracle family {family.__name__.strip("_")}: {trials} configurations')
    rows.extend(_linex_continuity_checks(config))
    return SuiteResult('oracles', _frame(rows))


def run_suite(suite, trials=None, seed=1, config=None, log_file=None):
    '''
    run one named suite

    :param suite: 'theorems', 'table2' or 'oracles'
    :param trials: configurations for the random suites (defaults: 1000 theorems, 100 oracles)
    '''
    if suite == 'theorems':
        return run_theorem_suite(1000 if trials is None else trials, seed, log_file=log_file)
    if suite == 'table2':
        return run_table2_suite(config, log_file=log_file)
    if suite == 'oracles':
        return run_oracle_suite(100 if trials is None else trials, seed, config, log_file=log_file)
    raise InputError(f'unknown suite {suite!r}')
