'''
monte carlo comparison of the MLE, bayes and e-bayes estimators under progressive type-II censoring

every (scheme, replication) pair owns a random stream derived from the master seed, so results do not depend
on the number of worker processes. per-replication estimates come back in replication order and are summed
with math.fsum.
'''

import math

import pandas as pd
from multiprocess import Pool

from wgedebayes.censoring import compute_s_m, generate_sample, parse_scheme, replication_stream
from wgedebayes.classical import (
    LossSpec,
    bayes_alpha,
    bayes_hazard,
    bayes_reliability,
    mle_alpha,
    mle_derived,
)
from wgedebayes.data import ESTIMATORS, MONTE_CARLO_REFERENCE, TARGETS
from wgedebayes.ebayes import (
    DEFAULT_NESTED,
    ebayes_alpha_triple,
    ebayes_hazard_triple,
    ebayes_reliability_triple,
)
from wgedebayes.errors import DomainError, EstimatorFailure, InputError, NumericalError
from wgedebayes.result_handler import MseTable, scheme_label
from wgedebayes.utils import write_to_log
from wgedebayes.wged import PARALLEL, SERIES, WgedParams, hazard, quantile, reliability_system

# estimator groups selectable on the command line
METHODS = {
    'mle': ('MLE',),
    'bayes': ('BS', 'BL'),
    'ebayes1': ('EBS1', 'EBL1'),
    'ebayes2': ('EBS2', 'EBL2'),
    'ebayes3': ('EBS3', 'EBL3'),
}

# expected MSE order, best first, per loss
ORDERING_CHAINS = {
    'self': ('EBS3', 'EBS1', 'EBS2', 'BS', 'MLE'),
    'linex': ('EBL3', 'EBL1', 'EBL2', 'BL', 'MLE'),
}

# observed fractions m / n of the three design families
DESIGN_FRACTIONS = (0.5, 0.7, 1.0)

VERDICT_COLUMNS = ('check', 'target', 'loss', 'scheme', 'better', 'worse', 'better_mse', 'worse_mse', 'passed')


def is_self_estimator(estimator):
    return estimator.rstrip('123').endswith('S')


def prior_id_of(estimator):
    return int(estimator[-1]) if estimator[-1].isdigit() else None


def estimator_loss(estimator, target):
    '''
    the loss an estimator of a target is computed under

    :param estimator: estimator label
    :param target: TargetSpec (supplies the LINEX q)
    :return: LossSpec, or None for the MLE
    '''
    if estimator == 'MLE':
        return None
    return LossSpec.self_loss() if is_self_estimator(estimator) else target.linex


def loss_label(estimator, target):
    loss = estimator_loss(estimator, target)
    return 'none' if loss is None else loss.label


def select_estimators(methods=None, loss_kind=None):
    '''
    estimator labels for a method selection, in ESTIMATORS order

    :param methods: iterable of METHODS keys, or None / 'all' for every estimator
    :param loss_kind: None for both losses, 'self' or 'linex' for one of them (the MLE is always kept)
    '''
    if methods is None or methods == 'all' or 'all' in methods:
        chosen = set(ESTIMATORS)
    else:
        chosen = set()
        for method in methods:
            if method not in METHODS:
                raise InputError(f'unknown method {method!r}; expected all or one of {tuple(METHODS)}')
            chosen.update(METHODS[method])
    if loss_kind is not None:
        chosen = {est for est in chosen if est == 'MLE' or is_self_estimator(est) == (loss_kind == 'self')}
    return tuple(est for est in ESTIMATORS if est in chosen)


def true_values(params, targets):
    '''
    the values every target takes at the true parameters

    :param params: WgedParams
    :param targets: dict target name -> TargetSpec
    :return: dict target name -> float
    '''
    truth = {}
    for name, target in targets.items():
        if name == 'alpha':
            truth[name] = params.alpha
        elif name in (SERIES, PARALLEL):
            truth[name] = float(reliability_system(params, target.query))
        else:
            truth[name] = float(hazard(params, target.t))
    return truth


def evaluate_estimators(summary, known, prior, hyper, targets, nested=DEFAULT_NESTED, estimators=ESTIMATORS):
    '''
    evaluate the requested estimators of every target on one sample

    the three e-bayes priors of a (target, loss) pair come from one triple evaluation.

    :param summary: SampleSummary
    :param known: KnownParams
    :param prior: GammaPrior for the bayes estimators
    :param hyper: HyperPrior for the e-bayes estimators
    :param targets: dict target name -> TargetSpec
    :param nested: NestedQuadrature
    :param estimators: estimator labels
    :return: dict target name -> estimator -> value
    :raises EstimatorFailure: naming the estimator that failed (scheme and replication left empty)
    '''
    results = {}
    for name in TARGETS:
        if name not in targets:
            continue
        target = targets[name]
        triples = {}
        results[name] = {}
        for est in estimators:
            loss = estimator_loss(est, target)
            try:
                if loss is None:
                    value = mle_alpha(summary) if name == 'alpha' else mle_derived(summary, known, target.query)
                elif est in ('BS', 'BL'):
                    value = _bayes_estimate(summary, known, prior, name, target, loss, nested)
                else:
                    if loss.kind not in triples:
                        triples[loss.kind] = _ebayes_triple(summary, known, hyper, name, target, loss, nested)
                    value = triples[loss.kind][prior_id_of(est)]
            except (InputError, NumericalError) as err:
                raise EstimatorFailure(None, None, f'{est} ({name})', err) from err
            results[name][est] = float(value)
    return results


def _bayes_estimate(summary, known, prior, name, target, loss, nested):
    if name == 'alpha':
        return bayes_alpha(summary, prior, loss)
    if name in (SERIES, PARALLEL):
        return bayes_reliability(summary, prior, loss, target.query, known, nested.alpha)
    return bayes_hazard(summary, prior, loss, target.t, known)


def _ebayes_triple(summary, known, hyper, name, target, loss, nested):
    if name == 'alpha':
        return ebayes_alpha_triple(summary, hyper, loss)
    if name in (SERIES, PARALLEL):
        return ebayes_reliability_triple(summary, hyper, target.query, known, loss, nested)
    return ebayes_hazard_triple(summary, hyper, target.t, known, loss)


def draw_truth(config, rng, max_redraws=100):
    '''
    the true parameters of one replication: fixed, or (a, b, alpha) drawn from the hyperprior and prior

    a ~ beta(u, v), b ~ uniform(0, c), alpha ~ gamma(a, rate b)
    '''
    if not config.redraw_truth:
        return config.true_params
    hyper = config.hyper
    for _ in range(max_redraws):
        a = rng.beta(hyper.u, hyper.v)
        b = rng.uniform(0.0, hyper.c)
        if not (a > 0 and b > 0):
            continue
        alpha = rng.gamma(a, 1.0 / b)
        if alpha > 0 and math.isfinite(alpha):
            return WgedParams(float(alpha), config.true_params.lam, config.true_params.theta)
    raise DomainError(f'could not draw a positive alpha from gamma(a, b) in {max_redraws} attempts')


def run_replication(config, scheme_idx, rep, estimators=ESTIMATORS):
    '''
    one replication: draw the truth and a censored sample, then evaluate every estimator

    :return: (truth dict, estimates dict target -> estimator -> value)
    '''
    scheme = config.schemes[scheme_idx]
    truth_params = draw_truth(config, replication_stream(config.master_seed, scheme_idx, rep, 1))
    rng = replication_stream(config.master_seed, scheme_idx, rep)
    try:
        sample = generate_sample(scheme, lambda p: quantile(truth_params, p), rng)
        summary = compute_s_m(sample, truth_params.lam, truth_params.theta)
        estimates = evaluate_estimators(
            summary, config.known, config.prior, config.hyper, config.targets, config.quadrature, estimators
        )
    except EstimatorFailure as err:
        raise EstimatorFailure(scheme_label(scheme), rep, err.estimator, err.cause) from err.cause
    except (InputError, NumericalError) as err:
        raise EstimatorFailure(scheme_label(scheme), rep, 'sampler', err) from err
    return true_values(truth_params, config.targets), estimates


def _map(fn, items, n_procs):
    if n_procs > 1:
        with Pool(n_procs) as p:
            return p.map(fn, items)
    return [fn(item) for item in items]


def run_simulation(config, log_file=None, estimators=ESTIMATORS):
    '''
    run the monte carlo study described by a SimConfig

    :param config: SimConfig
    :param log_file: optional log file, one line per scheme
    :param estimators: estimator labels to evaluate
    :return: MseTable, rows ordered by scheme, target, estimator
    :raises EstimatorFailure: on the first failing (scheme, replication, estimator)
    '''
    table = MseTable()
    n_reps = config.replications
    targets = [name for name in TARGETS if name in config.targets]
    for scheme_idx, scheme in enumerate(config.schemes):
        write_to_log(log_file, f'scheme {scheme_idx + 1}/{len(config.schemes)}: {scheme_label(scheme)}, {n_reps} replications')

        def replicate(rep):
            return run_replication(config, scheme_idx, rep, estimators)

        results = _map(replicate, range(n_reps), config.n_procs)

        for name in targets:
            truths = [truth[name] for truth, _ in results]
            for est in estimators:
                values = [estimates[name][est] for _, estimates in results]
                mean = math.fsum(values) / n_reps
                mse = math.fsum((value - true) ** 2 for value, true in zip(values, truths)) / n_reps
                table.add(scheme, est, name, loss_label(est, config.targets[name]), mean, mse)
        write_to_log(log_file, f'    done: MSE(MLE of alpha) = {_mse_or_none(table, scheme, "MLE", "alpha")}')
    return table


def _mse_or_none(table, scheme, estimator, target):
    return table.mse(scheme, estimator, target) if table.has(scheme, estimator, target) else None


def design_family(scheme):
    '''
    the design family (nearest of DESIGN_FRACTIONS) of a scheme
    '''
    return min(DESIGN_FRACTIONS, key=lambda f: abs(f - scheme.fraction))


def verify_orderings(table):
    '''
    check the expected MSE orderings of a result table

    chain links: for every scheme, target and loss, each estimator of ORDERING_CHAINS must have a smaller MSE
    than the next one. n-monotone links: within a design family the MSE of every estimator must fall as n grows.
    links whose estimators are missing from the table are not emitted.

    :param table: MseTable
    :return: DataFrame with one row per link, columns VERDICT_COLUMNS
    '''
    rows = []
    schemes = table.schemes
    for scheme in schemes:
        for target in table.targets:
            for loss, chain in ORDERING_CHAINS.items():
                present = [est for est in chain if table.has(scheme, est, target)]
                for better, worse in zip(present[:-1], present[1:]):
                    better_mse = table.mse(scheme, better, target)
                    worse_mse = table.mse(scheme, worse, target)
                    rows.append(('chain', target, loss, scheme_label(scheme), better, worse,
                                 better_mse, worse_mse, better_mse < worse_mse))

    families = {}
    for scheme in schemes:
        families.setdefault(design_family(scheme), []).append(scheme)
    for members in families.values():
        members = sorted(members, key=lambda s: s.n)
        for small, large in zip(members[:-1], members[1:]):
            if small.n == large.n:
                continue
            for target in table.targets:
                for est in table.estimators:
                    if not (table.has(small, est, target) and table.has(large, est, target)):
                        continue
                    large_mse = table.mse(large, est, target)
                    small_mse = table.mse(small, est, target)
                    rows.append(('n-monotone', target, table.get(large, est, target)['loss'],
                                 f'{scheme_label(small)} -> {scheme_label(large)}', est, est,
                                 large_mse, small_mse, large_mse < small_mse))
    return pd.DataFrame(rows, columns=list(VERDICT_COLUMNS))


def all_passed(verdicts):
    '''
    True when every link holds (an empty verdict table passes vacuously)
    '''
    return bool(verdicts['passed'].all()) if len(verdicts) else True


def compare_with_reference(table, tolerance=0.2):
    '''
    compare MSEs with the published monte carlo results where the scheme is tabulated

    :param table: MseTable
    :param tolerance: allowed relative deviation
    :return: DataFrame with columns scheme, estimator, target, mse, reference_mse, ratio, within
    '''
    rows = []
    for scheme in table.schemes:
        for target in table.targets:
            reference = _reference_for(target, scheme)
            if reference is None:
                continue
            for est in table.estimators:
                if not table.has(scheme, est, target):
                    continue
                mse = table.mse(scheme, est, target)
                ref = reference['mse'][ESTIMATORS.index(est)]
                ratio = mse / ref
                rows.append((scheme_label(scheme), est, target, mse, ref, ratio, bool(abs(ratio - 1.0) <= tolerance)))
    return pd.DataFrame(rows, columns=['scheme', 'estimator', 'target', 'mse', 'reference_mse', 'ratio', 'within'])


def _reference_for(target, scheme):
    for (n, text), reference in MONTE_CARLO_REFERENCE.get(target, {}).items():
        if n == scheme.n and parse_scheme(text, n).removals == scheme.removals:
            return reference
    return None

