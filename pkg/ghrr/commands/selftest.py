"""
Command running the invariant suite.
"""

import sys

import click

from ghrr import helpers
from ghrr.log import console
from ghrr.runner import ExperimentRecord
from ghrr.selftest import run_selftest


@click.command('selftest', short_help='Run the invariant suite.')
@click.option('--full/--quick', default=True,
              help='Run the statistical checks too (default, takes several minutes) or only the exact ones.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def selftest(ctx, full, output_format):
    """Run the invariant suite; exit 1 on any failure. --quick runs only the exactness checks."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        results = run_selftest(runner, full=full)

    records = [ExperimentRecord('selftest', {'check': r.name}, 0, {'passed': r.passed, 'detail': r.detail})
               for r in results]
    runner.write('selftest', records)
    helpers.report_rows([{'check': r.name, 'result': 'pass' if r.passed else 'FAIL', 'detail': r.detail}
                         for r in results], output_format)

    failed = [r.name for r in results if not r.passed]
    if failed:
        console.error('{0} of {1} checks failed: {2}'.format(len(failed), len(results), ', '.join(failed)))
        sys.exit(1)
    console.info('All {0} checks passed'.format(len(results)))
