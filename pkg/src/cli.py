"""Command-line surface of ebkit.

Every subcommand reads its input file, runs one module and writes a CSV (or
JSON with --json) plus a report.json inside a timestamped run directory.
Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""
import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from src.cgf.init_cgf import CGF_CLASSES, init_cgf
from src.checks import CHECKS, run_checks
from src.config_utils.run_config import RunConfig, parse_grid, parse_params, parse_points, prepare_run_config
from src.data_io import (
    emit_plot_data, read_frame, read_grouped_csv, read_interval_csv, read_interval_grouped_csv, read_rankings_csv,
    read_scalar_csv, write_output,
)
from src.dirs import LOG_PATH, PROSTATE_URL, SUSHI_URL
from src.errors import EbkitError, UsageError, ZeroResultant
from src.linear_eb import (
    estimate_interval_scalar, estimate_interval_vector, estimate_with_factors, rank_estimates, summarize,
)
from src.moments import classical_moments, symbolic_moments
from src.pearson import fit_pearson, reconstruct_density, score
from src.ranking import CARRIERS, consensus, rank_posterior, standardize_rankings, vmf_mle
from src.saddlepoint import generalized_tweedie_term, saddle_density
from src.symbolic_cluster import DistanceKind, Standardization, dca, standardize
from src.tweedie import binomial_posterior, normal_variance_posterior, poisson_posterior, posterior_normal
from src.utils import RunLogger, dump_json

logger = logging.getLogger(__name__)

TWEEDIE_MODELS = ('normal', 'binomial', 'poisson', 'variance')
FLAG_THRESHOLD = 2.0
FDR_CUTOFF = 0.2


@dataclass
class CommandResult:
    """
    Attributes:
        frame (pd.DataFrame): Main output table.
        report (Dict[str, Any]): Run summary written to report.json.
        name (str): Default output file name inside the run directory.
        extra (Dict[str, pd.DataFrame]): Secondary tables; the `<key>_output` flag sets their path.
    """
    frame: pd.DataFrame
    report: Dict[str, Any]
    name: str
    extra: Dict[str, pd.DataFrame] = field(default_factory=dict)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('-o', '--output', default=None, help='output file (default: inside the run directory)')
    parser.add_argument('--json', action='store_true', help='write structured output as JSON instead of CSV')
    parser.add_argument('--seed', type=int, default=None, help='random seed (EBKIT_SEED overrides)')
    parser.add_argument('--log-dir', default=str(LOG_PATH), help='parent folder of run directories')
    parser.add_argument('-v', '--verbose', action='count', default=0)
    parser.add_argument('-q', '--quiet', action='store_true')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ebkit', description='Empirical Bayes estimation toolkit.',
        epilog=f'External data sets: prostate z-values {PROSTATE_URL}; sushi preferences {SUSHI_URL}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('moments', help='classical or symbolic moments of a sample')
    p.add_argument('input')
    p.add_argument('--column', default=None)
    p.add_argument('--interval', action='store_true', help='treat the file as lower/upper column pairs')

    p = sub.add_parser('pearson', help='fit a Pearson system to a sample')
    p.add_argument('input')
    p.add_argument('--column', default=None)
    p.add_argument('--grid', default=None, help='density grid lo:hi:n')
    p.add_argument('--plot-data', default=None, help='write score and density curves to this file')

    p = sub.add_parser('tweedie', help='Tweedie posterior estimates')
    p.add_argument('model', choices=TWEEDIE_MODELS)
    p.add_argument('input')
    p.add_argument('--column', default=None)
    p.add_argument('--sigma2', type=float, default=None)
    p.add_argument('--n', type=int, default=None, help='binomial trials')
    p.add_argument('--nu', type=int, default=None, help='degrees of freedom of the variance estimates')
    p.add_argument('--level', type=float, default=None)
    p.add_argument('--pi0', type=float, default=None)
    p.add_argument('--plot-data', default=None)

    p = sub.add_parser('linear-eb', help='linear EB estimates of group means')
    p.add_argument('input')
    p.add_argument('--group-col', default='group')
    p.add_argument('--ridge', type=float, default=0.0)
    p.add_argument('--rank', action='store_true', help='append the rank of every coordinate within its estimate')

    p = sub.add_parser('linear-eb-interval', help='linear EB estimates of interval group means')
    p.add_argument('input')
    p.add_argument('--group-col', default='group')
    p.add_argument('--mode', choices=('auto', 'scalar', 'vector'), default='auto')
    p.add_argument('--ridge', type=float, default=0.0)

    p = sub.add_parser('cluster', help='dynamic clustering of interval objects')
    p.add_argument('input')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--distance', choices=[d.value for d in DistanceKind], default=None)
    p.add_argument('--standardize', choices=[s.value for s in Standardization], default=None)
    p.add_argument('--squared', action='store_true')
    p.add_argument('--max-iter', type=int, default=100)
    p.add_argument('--label-col', default=None)
    p.add_argument('--report', default=None, help='also write the report JSON to this file')

    p = sub.add_parser('rank-eb', help='Tweedie posteriors and consensus of rankings')
    p.add_argument('input')
    p.add_argument('--carrier', choices=CARRIERS, default=None)
    p.add_argument('--group-col', default=None)
    p.add_argument('--sigma', choices=('sample', 'identity'), default='sample')
    p.add_argument('--posterior-output', default=None)

    p = sub.add_parser('saddlepoint', help='saddlepoint density and generalized Tweedie term')
    p.add_argument('--dist', choices=sorted(CGF_CLASSES), required=True)
    p.add_argument('--params', default=None, help='model parameters key=value,key=value')
    p.add_argument('--x', required=True, help='points lo:hi:n or a comma-separated list')

    p = sub.add_parser('check', help='run the built-in validation suite')
    p.add_argument('--names', nargs='*', default=None, choices=sorted(CHECKS))

    for p in sub.choices.values():
        _add_common(p)
    return parser


def configure_logging(verbose: int = 0, quiet: bool = False) -> None:
    level = logging.ERROR if quiet else [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    logging.getLogger().setLevel(level)
    logging.captureWarnings(True)


def _read_sample(config: RunConfig) -> np.ndarray:
    return read_scalar_csv(config.input, column=config.flags.get('column'))


def _moments_rows(config: RunConfig) -> List[Dict[str, Any]]:
    if config.flags.get('interval'):
        bounds, _ = read_interval_csv(config.input)
        return [{'variable': f'dim_{j + 1}', **symbolic_moments(bounds[:, j, :]).to_dict()}
                for j in range(bounds.shape[1])]
    frame = read_frame(config.input)
    columns = [config.flags['column']] if config.flags.get('column') else list(frame.columns)
    rows = []
    for col in columns:
        rows.append({'variable': col, **classical_moments(read_scalar_csv(config.input, column=col)).to_dict()})
    return rows


def cmd_moments(config: RunConfig) -> CommandResult:
    rows = _moments_rows(config)
    return CommandResult(pd.DataFrame(rows), {'moments': rows}, 'moments')


def cmd_pearson(config: RunConfig) -> CommandResult:
    sample = _read_sample(config)
    fit = fit_pearson(classical_moments(sample))
    row = {key: value for key, value in fit.to_dict().items() if key != 'moments'}
    row['mode'] = fit.mode
    report = {'fit': fit.to_dict(), 'poles': fit.poles()}

    plot_path = config.flags.get('plot_data')
    if plot_path:
        if config.flags.get('grid'):
            grid = parse_grid(config.flags['grid'])
        else:
            spread = 6 * np.sqrt(fit.source.mu2)
            grid = (fit.loc - spread, fit.loc + spread, 1201)
        dens = reconstruct_density(fit, grid)
        emit_plot_data(plot_path, dens['x'], {'score': score(fit, dens['x'].to_numpy()), 'density': dens['density']})
        report['plot_data'] = os.path.basename(plot_path)
    return CommandResult(pd.DataFrame([row]), report, 'pearson')


def _tweedie_normal(config: RunConfig, values: np.ndarray) -> CommandResult:
    flags = config.flags
    fit = fit_pearson(classical_moments(values))
    frame = posterior_normal(values, flags['sigma2'], fit, level=flags['level'], pi0=flags['pi0'])
    report = {
        'fit': fit.to_dict(),
        'n_clamped': frame.attrs['n_clamped'],
        'n_flagged': int((frame['post_mean'].abs() > FLAG_THRESHOLD).sum()),
        'n_fdr': int((frame['fdr'] <= FDR_CUTOFF).sum()),
    }
    if flags.get('plot_data'):
        curve = frame.sort_values('z')
        emit_plot_data(flags['plot_data'], curve['z'], {'post_mean': curve['post_mean'], 'post_var': curve['post_var']})
    return CommandResult(frame, report, 'posterior')


def cmd_tweedie(config: RunConfig) -> CommandResult:
    flags = config.flags
    model = flags['model']
    values = _read_sample(config)
    if model == 'normal':
        return _tweedie_normal(config, values)

    fit = fit_pearson(classical_moments(values))
    report: Dict[str, Any] = {'fit': fit.to_dict(), 'model': model}
    if model == 'binomial':
        if flags.get('n') is None:
            raise UsageError('tweedie binomial needs --n')
        pairs = [binomial_posterior(x, flags['n'], fit) for x in values]
        frame = pd.DataFrame({'x': values, 'theta_mean': [p[0] for p in pairs], 'p_mean': [p[1] for p in pairs]})
    elif model == 'poisson':
        frame = pd.DataFrame({'x': values, 'rate_mean': poisson_posterior(values, fit)})
    else:
        if flags.get('nu') is None:
            raise UsageError('tweedie variance needs --nu')
        frame = pd.DataFrame({'u': values, 'var_mean': normal_variance_posterior(values, flags['nu'], fit)})
    if flags.get('plot_data'):
        curve = frame.sort_values(frame.columns[0])
        emit_plot_data(flags['plot_data'], curve.iloc[:, 0], {c: curve[c] for c in curve.columns[1:]})
    return CommandResult(frame, report, 'posterior')


def _estimate_frame(labels, estimates: np.ndarray, prefix: str = 't') -> pd.DataFrame:
    frame = pd.DataFrame(estimates, columns=[f'{prefix}_{j + 1}' for j in range(estimates.shape[1])])
    frame.insert(0, 'group', labels)
    return frame


def cmd_linear_eb(config: RunConfig) -> CommandResult:
    data = read_grouped_csv(config.input, group_col=config.flags['group_col'])
    estimates, factors = estimate_with_factors(data, ridge=config.flags['ridge'])
    summary = summarize(data)
    frame = _estimate_frame(data.labels, estimates)
    if config.flags.get('rank'):
        ranks = rank_estimates(estimates)
        for j in range(ranks.shape[1]):
            frame[f'rank_{j + 1}'] = ranks[:, j]
    report = {'N': data.N, 'p': data.p, 'grand_mean': summary.grand_mean, 'S2': summary.S2, 'U2': summary.U2,
              'v': summary.v, 'n_singletons': summary.n_singletons, 'shrinkage': factors}
    return CommandResult(frame, report, 'estimates')


def cmd_linear_eb_interval(config: RunConfig) -> CommandResult:
    data = read_interval_grouped_csv(config.input, group_col=config.flags['group_col'])
    mode = config.flags['mode']
    if mode == 'auto':
        mode = 'scalar' if data.p == 1 else 'vector'
    if mode == 'scalar':
        estimates = estimate_interval_scalar(data)[:, None]
    else:
        estimates = estimate_interval_vector(data, ridge=config.flags['ridge'])
    centers = np.stack([g.mean(axis=2).mean(axis=0) for g in data.groups])
    frame = _estimate_frame(data.labels, centers, prefix='center')
    for j in range(estimates.shape[1]):
        frame[f't_{j + 1}'] = estimates[:, j]
    report = {'N': data.N, 'p': data.p, 'mode': mode, 'grand_mean': centers.mean(axis=0)}
    return CommandResult(frame, report, 'estimates')


def cmd_cluster(config: RunConfig) -> CommandResult:
    flags = config.flags
    bounds, labels = read_interval_csv(config.input, label_col=flags.get('label_col'))
    X = standardize(bounds, flags['standardize'])
    partition = dca(X, flags['k'], kind=flags['distance'], seed=config.seed, max_iter=flags['max_iter'],
                    squared=flags['squared'])
    frame = pd.DataFrame({'object': labels, 'cluster': partition.assignments})
    report = {'standardize': Standardization(flags['standardize']).value, **partition.to_dict()}
    if flags.get('report'):
        dump_json(report, flags['report'])
    return CommandResult(frame, report, 'assignments')


def cmd_rank_eb(config: RunConfig) -> CommandResult:
    flags = config.flags
    rankings, groups, objects = read_rankings_csv(config.input, group_col=flags.get('group_col'))
    xs = standardize_rankings(rankings)
    carrier = flags['carrier']
    report: Dict[str, Any] = {'carrier': carrier, 'N': xs.shape[0], 't': xs.shape[1]}
    vmf = None
    if carrier == 'vmf':
        try:
            vmf = vmf_mle(xs)
        except ZeroResultant as err:
            logger.warning('%s; using kappa = 0', err)
            vmf = err.params
        report['vmf'] = {'m': vmf.m, 'kappa': vmf.kappa, 'r': vmf.r, 'null_direction': vmf.null_direction}
    posteriors = rank_posterior(xs, carrier=carrier, Sigma=flags['sigma'], vmf=vmf)

    post_frame = pd.DataFrame(posteriors, columns=objects)
    post_frame.insert(0, 'judge', np.arange(xs.shape[0]))
    if groups is not None:
        post_frame.insert(0, 'group', groups)
    frame = consensus(posteriors, groups, objects).reset_index()
    return CommandResult(frame, report, 'consensus', extra={'posterior': post_frame})


def cmd_saddlepoint(config: RunConfig) -> CommandResult:
    model = init_cgf(config.flags['dist'], parse_params(config.flags.get('params')))
    rows = []
    for x in parse_points(config.flags['x']):
        res = saddle_density(model, float(x))
        exact = model.exact_density(float(x))
        row = {'x': float(x), 't_hat': res.t_hat, 'approx': res.density,
               'exact': np.nan if exact is None else exact,
               'ratio': np.nan if not exact else res.density / exact}
        if model.tweedie_available:
            row['tweedie_term'] = generalized_tweedie_term(model, float(x))
        rows.append(row)
    return CommandResult(pd.DataFrame(rows), {'model': model.to_dict()}, 'saddlepoint')


def cmd_check(config: RunConfig) -> CommandResult:
    results = run_checks(config.flags.get('names'), progress=not config.flags.get('quiet'))
    report = {'n_checks': len(results), 'n_passed': int(results['passed'].sum())}
    return CommandResult(results, report, 'checks')


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    'moments': cmd_moments,
    'pearson': cmd_pearson,
    'tweedie': cmd_tweedie,
    'linear-eb': cmd_linear_eb,
    'linear-eb-interval': cmd_linear_eb_interval,
    'cluster': cmd_cluster,
    'rank-eb': cmd_rank_eb,
    'saddlepoint': cmd_saddlepoint,
    'check': cmd_check,
}


def _output_path(config: RunConfig, run_logger: RunLogger, name: str, explicit: Optional[str]) -> str:
    if explicit:
        return explicit
    return os.path.join(run_logger.run_dir, f"{name}.{'json' if config.format == 'json' else 'csv'}")


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parses argv, runs one subcommand and returns the process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    configure_logging(args.verbose, args.quiet)

    try:
        config = prepare_run_config(args.command, vars(args))
        run_logger = RunLogger(keys=[], logs_path=args.log_dir, command=args.command)
        run_logger.log_json({'config': config.to_dict()})
        result = COMMANDS[args.command](config)
        frame = result.frame

        out_path = write_output(frame, _output_path(config, run_logger, result.name, config.output), config.format)
        for key, extra in result.extra.items():
            write_output(extra, _output_path(config, run_logger, key, config.flags.get(f'{key}_output')), config.format)
        run_logger.log_json({'report': {'command': args.command, 'seed': config.seed, **result.report}})
        run_logger.save_readable({'command': args.command, 'seed': config.seed, 'output': out_path})
    except EbkitError as err:
        print(f'{type(err).__name__}: {err}', file=sys.stderr)
        return err.exit_code

    if not args.quiet:
        if args.command == 'check':
            print(frame.to_string(index=False))
        print(f'{args.command}: wrote {out_path} (seed {config.seed}, run {run_logger.run_name})')
    if args.command == 'check' and not frame['passed'].all():
        return 3
    return 0


def main() -> None:
    sys.exit(run())
