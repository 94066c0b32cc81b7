#!/usr/bin/env python
"""
probgeo: probability-coordinate geometry from the command line.

Subcommands compute probability barycenters, Kolmogorov moments, boundary
diagnostics and copula coordinates for CSV data or named distributions, and
run seeded limit-theorem experiments. Reports go to standard output; logs go
to standard error.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field, replace
from typing import Any, List, Optional, Sequence

from src import settings
from src.asymptotics import delta_method_stderr, run_clt_experiment, run_lln_experiment
from src.barycenter import Source, barycenter, compare_charts
from src.charts import Chart, parse_chart, split_chart_specs
from src.distributions import Distribution, parse_distribution
from src.errors import InvalidParameter, ProbGeoError, UsageError
from src.moments import (
    absolute_centred_moment,
    centred_moment,
    initial_moment,
    kolmogorov_variance,
    pseudo_mgf,
)
from src.multivariate import (
    ChartBundle,
    corner_masses,
    intrinsic_bundle,
    multivariate_barycenter,
    pseudo_observations,
)
from src.report_io import FORMATS, TEXT, emit_report, ingest_csv, write_replicates_csv
from src.tails import boundary_mass

# Set up logging
logger = logging.getLogger('probgeo')


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Validated command-line invocation"""

    subcommand: str
    input_path: Optional[str] = None
    dist_spec: Optional[str] = None
    chart_spec: Optional[str] = None
    seed: int = 0
    output_format: str = TEXT
    column: str = '0'
    columns: List[str] = field(default_factory=list)
    chart_specs: List[str] = field(default_factory=list)
    intrinsic: bool = False
    order: Optional[int] = None
    moment_kind: str = 'initial'
    mgf_t: Optional[float] = None
    mode: Optional[str] = None
    n_grid: List[int] = field(default_factory=list)
    reps: int = 1
    csv_path: Optional[str] = None
    epsilon: Optional[float] = None
    orders: List[int] = field(default_factory=list)
    stderr: bool = False


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--seed', type=int, default=settings.DEFAULT_SEED,
                        help='Master seed for all randomness (default: %(default)s)')
    parser.add_argument('--format', dest='output_format', choices=FORMATS, default=TEXT,
                        help='Report format (default: %(default)s)')
    parser.add_argument('--json', dest='output_format', action='store_const', const='json',
                        help='Shorthand for --format json')


def _add_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--input', dest='input_path', help='CSV file of observations')
    group.add_argument('--dist', dest='dist_spec', help='Distribution such as normal:0,1')
    parser.add_argument('--column', default='0', help='Column index or header name (default: 0)')


def build_parser() -> ArgumentParser:
    """The full subcommand grammar"""
    parser = ArgumentParser(prog='probgeo', description='Probability-coordinate geometry')
    subparsers = parser.add_subparsers(dest='subcommand', parser_class=ArgumentParser)
    subparsers.required = True

    bary = subparsers.add_parser('barycenter', help='Probability barycenter under a chart')
    _add_source(bary)
    bary.add_argument('--chart', required=True, help='Chart: family:params, empirical or intrinsic')
    bary.add_argument('--stderr', action='store_true',
                      help='Report the delta-method standard error instead (data only)')
    _add_common(bary)

    moments = subparsers.add_parser('moments', help='Kolmogorov moments')
    _add_source(moments)
    moments.add_argument('--chart', required=True)
    moments.add_argument('--order', type=int, help='Moment order r >= 1')
    kind = moments.add_mutually_exclusive_group()
    kind.add_argument('--centred', dest='moment_kind', action='store_const', const='centred')
    kind.add_argument('--absolute', dest='moment_kind', action='store_const', const='absolute')
    kind.add_argument('--variance', dest='moment_kind', action='store_const', const='variance')
    moments.add_argument('--mgf', dest='mgf_t', type=float,
                         help='Also report the pseudo-generating function at t')
    moments.set_defaults(moment_kind='initial')
    _add_common(moments)

    simulate = subparsers.add_parser('simulate', help='Seeded limit-theorem experiments')
    modes = simulate.add_subparsers(dest='mode', parser_class=ArgumentParser)
    modes.required = True
    lln = modes.add_parser('lln', help='Barycenter along one growing sample path')
    clt = modes.add_parser('clt', help='Replicated scaled errors')
    for sub in (lln, clt):
        sub.add_argument('--dist', dest='dist_spec', required=True)
        sub.add_argument('--chart', required=True)
        sub.add_argument('--n', dest='n_grid', type=_int_list, required=True,
                         help='Sample sizes (lln) or the single sample size (clt)')
        sub.add_argument('--csv', dest='csv_path', help='Write the per-replicate table here')
        _add_common(sub)
    clt.add_argument('--reps', type=int, required=True)

    tails = subparsers.add_parser('tails', help='Boundary concentration of the coordinates')
    _add_source(tails)
    tails.add_argument('--chart', required=True)
    tails.add_argument('--epsilon', type=float, required=True)
    tails.add_argument('--orders', type=_int_list, default=[])
    _add_common(tails)

    copula = subparsers.add_parser('copula', help='Componentwise coordinates on the unit cube')
    copula.add_argument('--input', dest='input_path', required=True)
    copula.add_argument('--columns', required=True, help='Comma-separated column indices or names')
    charts = copula.add_mutually_exclusive_group(required=True)
    charts.add_argument('--charts', help='One chart per column')
    charts.add_argument('--intrinsic', action='store_true', help='Empirical chart per column')
    copula.add_argument('--epsilon', type=float, required=True)
    _add_common(copula)

    compare = subparsers.add_parser('compare', help='Barycenters under several charts')
    _add_source(compare)
    compare.add_argument('--charts', required=True)
    _add_common(compare)

    return parser


def _check_chart_spec(flag: str, spec: str, has_data: bool) -> None:
    key = spec.strip().lower()
    if key == 'empirical' and not has_data:
        raise UsageError(f"{flag} empirical needs --input data")
    if key in ('empirical', 'intrinsic'):
        return
    try:
        parse_distribution(spec)
    except InvalidParameter as e:
        raise UsageError(f"{flag}: {e}") from e


def _check_dist_spec(spec: Optional[str]) -> None:
    if spec is None:
        return
    try:
        parse_distribution(spec)
    except InvalidParameter as e:
        raise UsageError(f"--dist: {e}") from e


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Parse and validate command-line arguments

    Raises:
        UsageError: naming the offending flag; domain errors found while
            checking flag values are chained as the cause
    """
    ns = build_parser().parse_args(argv)
    config = RunConfig(
        subcommand=ns.subcommand,
        input_path=getattr(ns, 'input_path', None),
        dist_spec=getattr(ns, 'dist_spec', None),
        chart_spec=getattr(ns, 'chart', None),
        seed=ns.seed,
        output_format=ns.output_format,
        column=getattr(ns, 'column', '0'),
        intrinsic=getattr(ns, 'intrinsic', False),
        order=getattr(ns, 'order', None),
        moment_kind=getattr(ns, 'moment_kind', 'initial'),
        mgf_t=getattr(ns, 'mgf_t', None),
        mode=getattr(ns, 'mode', None),
        n_grid=getattr(ns, 'n_grid', None) or [],
        reps=getattr(ns, 'reps', 1),
        csv_path=getattr(ns, 'csv_path', None),
        epsilon=getattr(ns, 'epsilon', None),
        orders=getattr(ns, 'orders', None) or [],
        stderr=getattr(ns, 'stderr', False),
    )

    if config.seed < 0:
        raise UsageError(f"--seed must be non-negative, got {config.seed}")
    _check_dist_spec(config.dist_spec)
    has_data = config.input_path is not None
    if config.chart_spec is not None:
        _check_chart_spec('--chart', config.chart_spec, has_data)

    chart_list = getattr(ns, 'charts', None)
    if chart_list:
        config.chart_specs = split_chart_specs(chart_list)
        if not config.chart_specs:
            raise UsageError("--charts: no charts given")
        for spec in config.chart_specs:
            _check_chart_spec('--charts', spec, has_data)

    if config.subcommand == 'moments':
        if config.moment_kind == 'variance':
            config.order = 2
        elif config.order is None:
            raise UsageError("--order is required unless --variance is given")
        if config.order < 1:
            raise UsageError(f"--order must be at least 1, got {config.order}")

    if config.subcommand == 'barycenter' and config.stderr and not has_data:
        raise UsageError("--stderr needs --input data")

    if config.subcommand == 'simulate':
        if config.mode == 'clt':
            if len(config.n_grid) != 1:
                raise UsageError("--n takes a single sample size for clt runs")
            if config.reps < 1:
                raise UsageError(f"--reps must be at least 1, got {config.reps}")
        if not config.n_grid or min(config.n_grid) < 1:
            raise UsageError("--n must list positive sample sizes")
        if any(b <= a for a, b in zip(config.n_grid, config.n_grid[1:])):
            raise UsageError("--n sizes must be strictly increasing")

    if config.epsilon is not None and not 0.0 < config.epsilon < 0.5:
        raise UsageError(f"--epsilon must lie in (0, 1/2), got {config.epsilon}")
    if any(r < 1 for r in config.orders):
        raise UsageError("--orders must all be at least 1")

    if config.subcommand == 'copula':
        config.columns = [c.strip() for c in ns.columns.split(',') if c.strip()]
        if not config.columns:
            raise UsageError("--columns: no columns given")
        if config.chart_specs and len(config.chart_specs) != len(config.columns):
            raise UsageError(
                f"--charts gives {len(config.chart_specs)} charts for {len(config.columns)} columns"
            )

    return config


def _column_key(text: str):
    return int(text) if text.strip().lstrip('-').isdigit() else text


def load_source(config: RunConfig) -> Source:
    """Observations from --input or the law named by --dist"""
    if config.dist_spec is not None:
        return parse_distribution(config.dist_spec)
    return ingest_csv(config.input_path, _column_key(config.column))


def load_chart(spec: str, source: Source) -> Chart:
    if isinstance(source, Distribution):
        return parse_chart(spec, distribution=source)
    return parse_chart(spec, data=source)


def run_barycenter(config: RunConfig) -> Any:
    source = load_source(config)
    chart = load_chart(config.chart_spec, source)
    if config.stderr:
        return delta_method_stderr(source, chart)
    return barycenter(source, chart)


def run_moments(config: RunConfig) -> Any:
    source = load_source(config)
    chart = load_chart(config.chart_spec, source)
    if config.moment_kind == 'variance':
        report = kolmogorov_variance(source, chart)
    elif config.moment_kind == 'centred':
        report = centred_moment(source, chart, config.order)
    elif config.moment_kind == 'absolute':
        report = absolute_centred_moment(source, chart, config.order)
    else:
        report = initial_moment(source, chart, config.order)

    data = report.to_dict()
    if config.mgf_t is not None:
        data['pseudo_mgf'] = pseudo_mgf(source, chart, config.mgf_t)
    return data


def run_simulate(config: RunConfig) -> Any:
    dist = parse_distribution(config.dist_spec)
    chart = parse_chart(config.chart_spec, distribution=dist)
    if config.mode == 'lln':
        report = run_lln_experiment(dist, chart, config.n_grid, config.seed)
    else:
        report = run_clt_experiment(dist, chart, config.n_grid[0], config.reps, config.seed)
    if config.csv_path:
        write_replicates_csv(report, config.csv_path)
    return report


def run_tails(config: RunConfig) -> Any:
    source = load_source(config)
    chart = load_chart(config.chart_spec, source)
    return boundary_mass(source, chart, config.epsilon, config.orders)


def run_copula(config: RunConfig) -> Any:
    data = ingest_csv(config.input_path, [_column_key(c) for c in config.columns])
    if config.intrinsic:
        report = multivariate_barycenter(data, intrinsic_bundle(data))
        return replace(report, corner_masses=corner_masses(pseudo_observations(data), config.epsilon))
    bundle = ChartBundle(tuple(parse_chart(spec, data=data[:, i]) for i, spec in enumerate(config.chart_specs)))
    return multivariate_barycenter(data, bundle, config.epsilon)


def run_compare(config: RunConfig) -> Any:
    source = load_source(config)
    charts = {spec: load_chart(spec, source) for spec in config.chart_specs}
    return compare_charts(source, charts)


HANDLERS = {
    'barycenter': run_barycenter,
    'moments': run_moments,
    'simulate': run_simulate,
    'tails': run_tails,
    'copula': run_copula,
    'compare': run_compare,
}


def setup_logging() -> None:
    """Configure logging from settings; stdout is reserved for reports"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.WARNING),
        format=settings.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one invocation

    Returns:
        0 on success, 1 for computation and input errors, 2 for usage errors
    """
    setup_logging()
    try:
        config = parse_args(argv)
        logger.info(f"Running {config.subcommand}")
        report = HANDLERS[config.subcommand](config)
        emit_report(report, config.output_format)
    except ProbGeoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"probgeo: error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
