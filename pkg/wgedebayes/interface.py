'''
command line interface: wgedebayes estimate | simulate | verify

exit codes: 0 success, 1 verification failure, 2 input error, 3 numerical failure
'''

import argparse
import os
import sys
import time

from wgedebayes import VERSION
from wgedebayes.censoring import compute_s_m, parse_scheme, read_failure_times, sample_from_data
from wgedebayes.classical import GammaPrior, LossSpec
from wgedebayes.config_handler import EstimationConfig, SimConfig, TargetSpec, seed_from_env
from wgedebayes.data import BUILTIN_DATASETS, ESTIMATORS
from wgedebayes.ebayes import HyperPrior
from wgedebayes.errors import EstimatorFailure, InputError, NumericalError
from wgedebayes.montecarlo import (
    METHODS,
    all_passed,
    compare_with_reference,
    evaluate_estimators,
    loss_label,
    run_simulation,
    select_estimators,
    verify_orderings,
)
from wgedebayes.post_processing.figures import write_figure_csvs
from wgedebayes.result_handler import EstimateReport, RunManifest
from wgedebayes.utils import ensure_dir, log_header, write_csv, write_to_log
from wgedebayes.verification import SUITES, run_suite
from wgedebayes.wged import KnownParams

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _floats(text, count, name):
    try:
        values = [float(x) for x in text.split(',')]
    except ValueError:
        raise InputError(f'--{name} expects {count} comma separated numbers, got {text!r}') from None
    if len(values) != count:
        raise InputError(f'--{name} expects {count} comma separated numbers, got {text!r}')
    return values


def _methods(text):
    return [item.strip() for item in text.split(',') if item.strip()]


def _estimation_config(args):
    '''
    the bundled or given config with the command-line overrides applied
    '''
    config = EstimationConfig.from_file(args.config) if args.config else EstimationConfig.default()
    changes = {}
    if args.lam is not None or args.theta is not None:
        changes['known'] = KnownParams.checked(
            config.known.lam if args.lam is None else args.lam,
            config.known.theta if args.theta is None else args.theta,
        )
    if args.prior:
        changes['prior'] = GammaPrior(*_floats(args.prior, 2, 'prior'))
    if args.hyper:
        changes['hyper'] = HyperPrior(*_floats(args.hyper, 3, 'hyper'))

    loss = LossSpec.parse(args.loss) if args.loss else None
    targets = {}
    for name, target in config.targets.items():
        q = loss.q if loss is not None and loss.kind == 'linex' else target.q
        t = target.t if args.t is None or name == 'alpha' else args.t
        k = target.k if args.k is None or target.k is None else args.k
        targets[name] = TargetSpec(name, q, t, k)
    changes['targets'] = targets
    return config.updated(**changes), loss


def _builtin_times(name):
    if name not in BUILTIN_DATASETS:
        raise InputError(f'unknown built-in dataset {name!r}; available: {sorted(BUILTIN_DATASETS)}')
    return BUILTIN_DATASETS[name]


def _load_data(args, config):
    '''
    the data set label, the failure times and the data file path (None for a built-in set)
    '''
    if args.data and args.builtin:
        raise InputError('give either a data file or --builtin, not both')
    if args.data:
        return str(args.data), read_failure_times(args.data), str(args.data)
    name = args.builtin or config.dataset
    if name is None:
        raise InputError('no data: give a data file or --builtin electric')
    return name, _builtin_times(name), None


def _scheme_text(args, config, dataset, times):
    '''
    --scheme, else the config scheme when the data is the built-in set the config names, else a complete sample
    '''
    if args.scheme:
        return args.scheme
    if not args.data and config.scheme and dataset == config.dataset:
        return config.scheme
    return f'0*{len(times)}'


def _estimation_run(args):
    '''
    config, data set label, failure times, data file, scheme and estimator labels of an estimate run, taken from
    --manifest or from the command line
    '''
    if args.manifest:
        manifest = RunManifest.from_json(args.manifest)
        if manifest.command != 'estimate':
            raise InputError(f'{args.manifest} is a manifest of {manifest.command!r}, not of estimate')
        resolved = manifest.config
        config = EstimationConfig.from_dict(resolved)
        data_file = resolved.get('data_file')
        if data_file:
            dataset, times = data_file, read_failure_times(data_file)
        elif config.dataset:
            dataset, times = config.dataset, _builtin_times(config.dataset)
        else:
            raise InputError(f'{args.manifest} names neither a data file nor a built-in dataset')
        if not config.scheme:
            raise InputError(f'{args.manifest} has no censoring scheme')
        estimators = tuple(resolved.get('estimators') or ESTIMATORS)
        unknown = [est for est in estimators if est not in ESTIMATORS]
        if unknown:
            raise InputError(f'{args.manifest} lists unknown estimators {unknown}')
        return config, dataset, times, data_file, parse_scheme(config.scheme, resolved.get('n')), estimators

    config, loss = _estimation_config(args)
    dataset, times, data_file = _load_data(args, config)
    scheme = parse_scheme(_scheme_text(args, config, dataset, times), args.n)
    estimators = select_estimators(_methods(args.method), None if loss is None else loss.kind)
    return config, dataset, times, data_file, scheme, estimators


def cmd_estimate(args):
    '''
    estimate every requested target on one data set

    writes estimates.json, estimates.txt and manifest.json to args.out
    '''
    start = time.perf_counter()
    out_dir = ensure_dir(args.out)
    log_file = os.path.join(out_dir, 'estimate.log')
    log_header(log_file, 'estimate')

    config, dataset, times, data_file, scheme, estimators = _estimation_run(args)
    sample = sample_from_data(times, scheme)
    summary = compute_s_m(sample, config.known.lam, config.known.theta)
    write_to_log(log_file, f'{dataset}: n = {scheme.n}, m = {scheme.m}, R = {scheme}, S_m = {summary.s_m!r}')

    values = evaluate_estimators(summary, config.known, config.prior, config.hyper, config.targets, config.quadrature, estimators)

    report = EstimateReport(dataset, scheme, summary.m, summary.s_m)
    for target, by_est in values.items():
        for est, value in by_est.items():
            report.add(target, est, loss_label(est, config.targets[target]), value)

    outputs = {'json': os.path.join(out_dir, 'estimates.json'), 'text': os.path.join(out_dir, 'estimates.txt'), 'log': log_file}
    report.to_json(outputs['json'])
    text = report.to_text()
    with open(outputs['text'], 'w') as ff:
        ff.write(text)
    print(text, end='')

    resolved = config.updated(scheme=scheme.render(), dataset=None if data_file else dataset).to_dict()
    resolved['data_file'] = data_file
    resolved['n'] = scheme.n
    resolved['estimators'] = list(estimators)
    _write_manifest(out_dir, 'estimate', resolved, None, start, outputs)
    write_to_log(log_file, f'wrote {outputs["json"]}')
    return EXIT_OK


def _simulation_config(args):
    if args.manifest:
        manifest = RunManifest.from_json(args.manifest)
        if manifest.command != 'simulate':
            raise InputError(f'{args.manifest} is a manifest of {manifest.command!r}, not of simulate')
        return SimConfig.from_dict(manifest.config)
    config = SimConfig.from_file(args.config) if args.config else SimConfig.default()
    changes = {'master_seed': seed_from_env(config.master_seed if args.seed is None else args.seed)}
    if args.reps is not None:
        changes['replications'] = args.reps
    if args.procs is not None:
        changes['n_procs'] = args.procs
    if args.redraw_truth:
        changes['redraw_truth'] = True
    return config.updated(**changes)


def cmd_simulate(args):
    '''
    run the monte carlo study

    writes mse_table.csv, ordering_verdicts.csv, fig1.csv .. fig4.csv, reference_comparison.csv (when the schemes
    are tabulated) and manifest.json to args.out
    '''
    start = time.perf_counter()
    out_dir = ensure_dir(args.out)
    log_file = os.path.join(out_dir, 'simulate.log')
    log_header(log_file, 'simulate')

    config = _simulation_config(args)
    write_to_log(log_file, f'{len(config.schemes)} schemes, {config.replications} replications, seed {config.master_seed}, '
                           f'{config.n_procs} worker(s)')
    print(f'simulating {len(config.schemes)} schemes x {config.replications} replications')

    table = run_simulation(config, log_file)
    verdicts = verify_orderings(table)

    outputs = {'mse_table': os.path.join(out_dir, 'mse_table.csv'), 'verdicts': os.path.join(out_dir, 'ordering_verdicts.csv')}
    table.to_csv(outputs['mse_table'])
    write_csv(verdicts, outputs['verdicts'])
    outputs.update(write_figure_csvs(table, out_dir))
    reference = compare_with_reference(table)
    if len(reference):
        outputs['reference'] = os.path.join(out_dir, 'reference_comparison.csv')
        write_csv(reference, outputs['reference'])
    outputs['log'] = log_file

    passed = int(verdicts['passed'].sum()) if len(verdicts) else 0
    line = f'ordering links holding: {passed}/{len(verdicts)}' + ('' if all_passed(verdicts) else ' (see ordering_verdicts.csv)')
    print(line)
    write_to_log(log_file, line)

    _write_manifest(out_dir, 'simulate', config.to_dict(), config.master_seed, start, outputs)
    return EXIT_OK


def _verification_run(args):
    '''
    suites, trials, seed and estimation config of a verify run, taken from --manifest or from the command line
    '''
    if args.manifest:
        manifest = RunManifest.from_json(args.manifest)
        if manifest.command != 'verify':
            raise InputError(f'{args.manifest} is a manifest of {manifest.command!r}, not of verify')
        resolved = manifest.config
        suites = tuple(resolved.get('suites') or SUITES)
        unknown = [suite for suite in suites if suite not in SUITES]
        if unknown:
            raise InputError(f'{args.manifest} lists unknown suites {unknown}')
        if manifest.seed is None:
            raise InputError(f'{args.manifest} has no seed')
        estimation = resolved.get('estimation')
        config = EstimationConfig.from_dict(estimation) if estimation else EstimationConfig.default()
        return suites, resolved.get('trials'), int(manifest.seed), config
    suites = SUITES if args.suite == 'all' else (args.suite,)
    config = EstimationConfig.from_file(args.config) if args.config else EstimationConfig.default()
    return suites, args.trials, seed_from_env(args.seed), config


def cmd_verify(args):
    '''
    run one or all verification suites; exit 1 when any check fails
    '''
    start = time.perf_counter()
    out_dir = ensure_dir(args.out)
    log_file = os.path.join(out_dir, 'verify.log')
    log_header(log_file, 'verify')
    suites, trials, seed, config = _verification_run(args)

    outputs = {'log': log_file}
    ok = True
    for suite in suites:
        write_to_log(log_file, f'running suite {suite}')
        result = run_suite(suite, trials, seed, config, log_file)
        outputs[suite] = os.path.join(out_dir, f'verify_{suite}.csv')
        result.to_csv(outputs[suite])
        print(result.to_text(), end='')
        write_to_log(log_file, result.summary_line())
        ok = ok and result.passed

    resolved = {'suites': list(suites), 'trials': trials, 'estimation': config.to_dict()}
    _write_manifest(out_dir, 'verify', resolved, seed, start, outputs)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _write_manifest(out_dir, command, config, seed, start, outputs):
    manifest = RunManifest(
        command=command,
        config=config,
        seed=seed,
        version=VERSION,
        wall_clock=round(time.perf_counter() - start, 3),
        outputs={name: os.path.basename(path) for name, path in outputs.items()},
        argv=sys.argv[1:],
    )
    manifest.to_json(os.path.join(out_dir, 'manifest.json'))
    return manifest


def build_parser():
    parser = argparse.ArgumentParser(prog='wgedebayes', description='E-Bayesian estimation for the WGED under progressive type-II censoring')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    sub = parser.add_subparsers(dest='command', required=True)

    est = sub.add_parser('estimate', help='estimate alpha, system reliabilities and the hazard rate from data')
    est.add_argument('data', nargs='?', help='failure-time file, one value per line')
    est.add_argument('--builtin', help='built-in data set (electric)')
    est.add_argument('--config', help='estimation config (.json or .yaml), default the bundled table1 config')
    est.add_argument('--scheme', help="removal vector, e.g. '4,4,1,0*7'")
    est.add_argument('--n', type=int, help='units on test (default m + sum(R))')
    est.add_argument('--lambda', dest='lam', type=float, help='known lambda')
    est.add_argument('--theta', type=float, help='known theta')
    est.add_argument('--prior', help='gamma prior a,b')
    est.add_argument('--hyper', help='hyperprior u,v,c')
    est.add_argument('--loss', help="'self' or 'linex:q' (default both, q per target from the config)")
    est.add_argument('--t', type=float, help='mission / hazard time for every time target')
    est.add_argument('--k', type=int, help='number of components')
    est.add_argument('--method', default='all', help=f"comma separated: all or {', '.join(METHODS)}")
    est.add_argument('--manifest', help='re-run from a manifest.json written by an earlier estimate')
    est.add_argument('--out', default='results', help='output directory')
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser('simulate', help='monte carlo comparison of the estimators')
    sim.add_argument('--config', help='simulation config (.json or .yaml), default the bundled table3 config')
    sim.add_argument('--manifest', help='re-run from a manifest.json written by an earlier simulate')
    sim.add_argument('--reps', type=int, help='replications per scheme')
    sim.add_argument('--seed', type=int, help='master seed (WGED_SEED overrides)')
    sim.add_argument('--procs', type=int, help='worker processes')
    sim.add_argument('--redraw-truth', action='store_true', help='draw (a, b, alpha) from the priors in every replication')
    sim.add_argument('--out', default='results', help='output directory')
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser('verify', help='run a verification suite')
    ver.add_argument('--suite', choices=SUITES + ('all',), default='all')
    ver.add_argument('--trials', type=int, help='random configurations (theorems: 1000, oracles: 100)')
    ver.add_argument('--seed', type=int, default=1, help='master seed (WGED_SEED overrides)')
    ver.add_argument('--config', help='estimation config for the table2 and continuity checks')
    ver.add_argument('--manifest', help='re-run from a manifest.json written by an earlier verify')
    ver.add_argument('--out', default='results', help='output directory')
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    '''
    parse arguments, run the command and map errors onto exit codes
    '''
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EstimatorFailure as err:
        print(f'error: {err}', file=sys.stderr)
        return EXIT_INPUT if isinstance(err.cause, InputError) else EXIT_NUMERICAL
    except InputError as err:
        print(f'error: {err}', file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as err:
        print(f'numerical failure: {err}', file=sys.stderr)
        return EXIT_NUMERICAL


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
