"""
Helper methods for use by the CLI.
"""

from contextlib import contextmanager
import json
import sys

import click
from tabulate import tabulate

from ghrr.encoder import FrequencyDistribution
from ghrr.exceptions import GHRRError, InvalidDistributionError
from ghrr.experiments import dims_for
from ghrr.log import console
from ghrr.matalg import AngleDistribution


def _split(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return list(value)
    return [x.strip() for x in str(value).split(',') if x.strip()]


def validate_int_list(ctx, param, value):
    """Validate a comma-separated list of positive integers and convert it to a list."""
    items = _split(value)
    if not items:
        return None

    result = []
    for item in items:
        try:
            number = int(item)
        except (TypeError, ValueError):
            raise click.BadParameter('Non-integer value "{0}" provided.'.format(item))
        if number < 1:
            raise click.BadParameter('Value "{0}" must be a positive integer.'.format(item))
        result.append(number)

    return result


def validate_float_list(ctx, param, value):
    """Validate a comma-separated list of finite numbers."""
    items = _split(value)
    if not items:
        return None

    result = []
    for item in items:
        try:
            number = float(item)
        except (TypeError, ValueError):
            raise click.BadParameter('Non-numeric value "{0}" provided.'.format(item))
        if number != number or number in (float('inf'), float('-inf')):
            raise click.BadParameter('Value "{0}" must be finite.'.format(item))
        result.append(number)

    return result


def validate_unit_interval_list(ctx, param, value):
    """Validate a comma-separated list of numbers in [0, 1]."""
    numbers = validate_float_list(ctx, param, value)
    if numbers is None:
        return None

    for number in numbers:
        if not 0.0 <= number <= 1.0:
            raise click.BadParameter('Value "{0}" is outside [0, 1].'.format(number))

    return numbers


def validate_angle_dist(ctx, param, value):
    """Parse a phase angle distribution descriptor."""
    try:
        return AngleDistribution.parse(value)
    except InvalidDistributionError as ex:
        raise click.BadParameter(str(ex))


def validate_freq_dist(ctx, param, value):
    """Parse a frequency distribution descriptor."""
    try:
        return FrequencyDistribution.parse(value)
    except InvalidDistributionError as ex:
        raise click.BadParameter(str(ex))


def resolve_dims(total_dim, d, m, round_dims, required=True):
    """
    D for the given m from exactly one of ``--total-dim`` (D m^2) or ``--d``.

    Raises click.UsageError when both or (if ``required``) neither are given.
    """
    if total_dim is not None and d is not None:
        raise click.UsageError('--total-dim and --d are mutually exclusive.')
    if d is not None:
        return d
    if total_dim is None:
        if required:
            raise click.UsageError('One of --total-dim or --d is required.')
        return None
    return dims_for(total_dim, m, round_dims, console)


@contextmanager
def ghrr_error_handler():
    """Context manager to handle GHRRError exceptions in a standard way."""
    try:
        yield
    except GHRRError as ex:
        console.error(str(ex))
        sys.exit(1)


def report_rows(rows, output_format='table', headers=None):
    """
    Print a list of dicts in the given format.
    """
    if output_format == 'json':
        click.echo(json.dumps(rows, indent=4, default=str))
        return

    if not rows:
        console.info('Nothing to report')
        return

    headers = headers or list(rows[0].keys())
    click.echo(tabulate([[_cell(row.get(h)) for h in headers] for row in rows], headers=headers, tablefmt='grid'))


def _cell(value):
    if isinstance(value, float):
        return '{0:.6g}'.format(value)
    if isinstance(value, (list, tuple)):
        return ' '.join(_cell(v) for v in value)
    if value is None:
        return '-'
    return value


def report_result(runner, result, headers=None, output_format='table'):
    """Write an ExperimentResult through the runner and print its summary (and analysis) tables."""
    directory = runner.write(result.name, result.records, result.summary, result.analysis)
    if output_format == 'json':
        report_rows({'summary': result.summary, 'analysis': result.analysis}, output_format)
        return directory
    report_rows(result.summary, output_format, headers=headers)
    if result.analysis:
        report_rows(result.analysis, output_format)
    return directory


def _set_seed(ctx, param, value):
    if value is not None:
        ctx.obj.config.seed = value
    return value


def _set_out_dir(ctx, param, value):
    if value is not None:
        ctx.obj.config.out_dir = value
    return value


def run_options(func):
    """--seed and --out on a subcommand, overriding the group-level values when given."""
    func = click.option('--out', type=click.Path(file_okay=False), expose_value=False, callback=_set_out_dir,
                        help='Directory for result files (overrides the global --out).')(func)
    func = click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), expose_value=False, callback=_set_seed,
                        help='64-bit root seed (overrides the global --seed).')(func)
    return func


def dimension_options(func):
    """Mutually exclusive --total-dim / --d plus rounding control."""
    func = click.option('--round-dims/--strict-dims', default=True,
                        help='Round an indivisible total dimension down to a multiple of m^2 (default) '
                        'or fail.')(func)
    func = click.option('--d', 'd', type=click.IntRange(1), default=None,
                        help='Number of matrix elements D.')(func)
    func = click.option('--total-dim', type=click.IntRange(1), default=None,
                        help='Total dimension D * m^2; exclusive with --d.')(func)
    return func


def output_format_option(func):
    return click.option('--output-format', '-f', default='table', type=click.Choice(['table', 'json']),
                        help='Console output format (default: table).')(func)


def start_run(ctx):
    """Record the running subcommand and its parameters on the runner and return it."""
    runner = ctx.obj
    runner.configure(ctx.info_name, ctx.params)
    return runner
