"""
GHRR CLI.
"""

import os

import click
import numpy as np

from ghrr.version import __version__
from ghrr import encoder, experiments, hdalg, helpers, matalg
from ghrr.commands.experiments import capacity, demo_nested, diagonality, tree_accuracy
from ghrr.commands.selftest import selftest
from ghrr.hdalg import BaseSamplerSpec, Hypervector
from ghrr.log import console
from ghrr.runner import OUTPUT_FORMATS, ExperimentRecord, ExperimentRunner, RunConfig

Q_MODE_CHOICES = ['shared', 'varying', 'shared-across-dims', 'varying-across-dims', 'fixed']


@click.group(help='GHRR v{0} - Generalized holographic reduced representations.'.format(__version__))
@click.version_option(version=__version__)
@click.option('--boring', is_flag=True, default=False, help='Remove color from console output.')
@click.option('--verbose', '-v', is_flag=True, default=False, type=bool,
              help='Add more verbose debugging output.')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), default=None,
              help='64-bit root seed. Drawn from OS entropy when omitted; always recorded with the results.')
@click.option('--out', default='./results', envvar='GHRR_OUT_DIR', type=click.Path(file_okay=False),
              help='Directory for result files. Defaults to ./results or the value of the environment '
              'variable GHRR_OUT_DIR.')
@click.option('--format', 'output_format', default='both', envvar='GHRR_FORMAT', type=click.Choice(OUTPUT_FORMATS),
              help='Result file format. Defaults to both or the value of the environment variable GHRR_FORMAT.')
@click.option('--threads', default=1, envvar='GHRR_THREADS', type=click.IntRange(1),
              help='Maximum worker threads. Defaults to 1 or the value of the environment variable GHRR_THREADS.')
@click.pass_context
def cli(ctx, boring, verbose, seed, out, output_format, threads):
    """Main command line entry point."""
    console.colorize = not boring

    if verbose:
        console.setLevel('DEBUG')
    else:
        console.setLevel('INFO')

    with helpers.ghrr_error_handler():
        config = RunConfig(command=ctx.invoked_subcommand or '', seed=seed, out_dir=out,
                           output_format=output_format, threads=threads)
        ctx.obj = ExperimentRunner(config)


@cli.command('sample', short_help='Sample base hypervectors.')
@helpers.dimension_options
@click.option('--m', default=3, type=click.IntRange(1), help='Matrix size m (default: 3).')
@click.option('--q-mode', default='varying', type=click.Choice(Q_MODE_CHOICES),
              help='Share one Q across all elements or draw one per element (default: varying).')
@click.option('--q-method', default='haar', type=click.Choice(matalg.SAMPLING_MODES),
              help='Unitary sampling method (default: haar).')
@click.option('--angles', default='uniform', callback=helpers.validate_angle_dist,
              help='Phase angle distribution: uniform, uniform:LOW:HIGH or roots:K.')
@click.option('--count', '-n', default=1, type=click.IntRange(1), help='Number of hypervectors to sample.')
@click.option('--save-dir', type=click.Path(file_okay=False),
              help='Save every hypervector as sample-<i>.ghrr in this directory.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def sample(ctx, total_dim, d, round_dims, m, q_mode, q_method, angles, count, save_dir, output_format):
    """Sample base hypervectors and report their shape and self-similarity."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        d = helpers.resolve_dims(total_dim, d, m, round_dims)
        spec = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=q_mode, q_method=q_method, angle_dist=angles)
        rng = runner.rng('sample', d, m, spec.q_mode, q_method, spec.angle_dist.describe())

        records = []
        for index in range(count):
            h = hdalg.sample_base(spec, rng)
            if save_dir:
                h.save(_sample_path(save_dir, index))
            records.append(ExperimentRecord('sample', {'d': d, 'm': m, 'total_dim': h.total_dim}, index,
                                            {'unitary': matalg.is_unitary(h.elements),
                                             'self_similarity': hdalg.similarity(h, h)}))

        runner.write('sample', records)
        helpers.report_rows([r.row() for r in records], output_format)


def _sample_path(directory, index):
    if not os.path.isdir(directory):
        os.makedirs(directory)
    return os.path.join(directory, 'sample-{0}.ghrr'.format(index))


@cli.command('similarity', short_help='Similarity of saved or freshly sampled hypervectors.')
@click.argument('files', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@helpers.dimension_options
@click.option('--m', default=3, type=click.IntRange(1), help='Matrix size m (default: 3).')
@click.option('--q-mode', default='varying', type=click.Choice(Q_MODE_CHOICES),
              help='Q mode of sampled pairs (default: varying).')
@click.option('--pairs', default=10, type=click.IntRange(1), help='Number of sampled pairs (default: 10).')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def similarity(ctx, files, total_dim, d, round_dims, m, q_mode, pairs, output_format):
    """
    With two FILES, print their similarity and degree of commutativity. Without files,
    sample pairs and report similarity, similarity to the bound pair and commutativity.
    """
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        if files:
            if len(files) != 2:
                raise click.UsageError('similarity takes exactly two files.')
            h1, h2 = Hypervector.load(files[0]), Hypervector.load(files[1])
            helpers.report_rows([_pair_row(h1, h2)], output_format)
            return

        d = helpers.resolve_dims(total_dim, d, m, round_dims)
        spec = BaseSamplerSpec(dim_d=d, dim_m=m, q_mode=q_mode)
        records = []
        for index in range(pairs):
            rng = runner.rng('similarity', d, m, spec.q_mode, index)
            h1, h2 = hdalg.sample_base(spec, rng), hdalg.sample_base(spec, rng)
            records.append(ExperimentRecord('similarity', {'d': d, 'm': m, 'q_mode': spec.q_mode}, index,
                                            _pair_row(h1, h2)))

        runner.write('similarity', records)
        helpers.report_rows([r.row() for r in records], output_format)


def _pair_row(h1, h2):
    row = {'similarity': hdalg.similarity(h1, h2)}
    if h1.unitary and h2.unitary:
        row['bound_similarity'] = hdalg.similarity(h1, hdalg.bind(h1, h2))
        row['commutativity'] = hdalg.degree_of_commutativity(h1, h2)
    return row


@cli.command('kernel', short_help='Empirical vs analytic encoder kernel.')
@helpers.dimension_options
@click.option('--m', default=2, type=click.IntRange(1), help='Matrix size m (default: 2).')
@click.option('--n', 'n_features', default=1, type=click.IntRange(1), help='Input dimension n (default: 1).')
@click.option('--dist', default='gaussian', callback=helpers.validate_freq_dist,
              help='Frequency distribution: gaussian, cauchy or uniform, optionally KIND:SCALE.')
@click.option('--delta', default='0,0.5,1,2', callback=helpers.validate_float_list,
              help='Comma-separated displacements along the first input axis.')
@click.option('--trials', default=1, type=click.IntRange(1),
              help='Independent encoders per displacement (default: 1).')
@click.option('--q-mode', default='varying', type=click.Choice(Q_MODE_CHOICES),
              help='Q mode of the encoder (default: varying).')
@click.option('--pairing', default='same', type=click.Choice(['same', 'resample']),
              help='Use one encoder on both sides, or pair it with a Q-resampled copy.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def kernel(ctx, total_dim, d, round_dims, m, n_features, dist, delta, trials, q_mode, pairing, output_format):
    """Similarity of phi(0) and phi(delta) next to the closed-form kernel."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        d = helpers.resolve_dims(total_dim, d, m, round_dims)
        displacements = [np.eye(n_features)[0] * value for value in delta]

        if trials > 1:
            result = experiments.exp_kernel_profile(d, m, n_features, displacements, trials, runner=runner,
                                                    freq_dist=dist, q_modes=(q_mode,), pairing=pairing)
            helpers.report_result(runner, result, ['q_mode', 'pairing', 'delta', 'mean', 'std', 'analytic'],
                                  output_format)
            return

        rng = runner.rng('kernel', d, m, n_features, q_mode, pairing)
        enc = encoder.make_encoder(n_features, d, m, q_mode=q_mode, freq_dist=dist, rng=rng)
        partner = enc if pairing == 'same' else encoder.resample_q(enc, rng)
        origin = np.zeros(n_features)
        records = []
        for value, displacement in zip(delta, displacements):
            empirical = encoder.empirical_kernel(enc, partner, origin, displacement)
            analytic = encoder.analytic_kernel(enc.freq_dist, displacement) if pairing == 'same' else None
            records.append(ExperimentRecord('kernel', {'d': d, 'm': m, 'q_mode': enc.q_mode, 'pairing': pairing,
                                                       'delta': value}, 0,
                                            {'empirical': empirical, 'analytic': analytic}))

        runner.write('kernel', records)
        helpers.report_rows([r.row() for r in records], output_format,
                            headers=['delta', 'empirical', 'analytic'])


@cli.command('tensor-view', short_help='Check a bound element against its tensor-product view.')
@click.option('--m', default=3, type=click.IntRange(1), help='Matrix size m (default: 3).')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def tensor_view(ctx, m, output_format):
    """
    Sample Q, R and two phase diagonals, bind Q diag(lam) with R diag(eta) and recover
    lam eta^T column by column.
    """
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        rng = runner.rng('tensor-view', m)
        q, r = matalg.sample_unitaries(m, 2, 'haar', rng)
        lam, eta = matalg.random_phases(m, rng), matalg.random_phases(m, rng)
        _, outer = hdalg.tensor_view(q, r, lam, eta)
        expected = np.outer(lam.phasors(), eta.phasors())

        rows = [{'row': k, 'column': l, 'expected': _complex(expected[k, l]), 'recovered': _complex(outer[k, l]),
                 'error': float(abs(outer[k, l] - expected[k, l]))} for k in range(m) for l in range(m)]
        helpers.report_rows(rows, output_format)
        console.info('Maximum reconstruction error: {0:.3g}'.format(max(row['error'] for row in rows)))


def _complex(value):
    return '{0:+.6f}{1:+.6f}i'.format(value.real, value.imag)


@cli.command('histogram', short_help='Similarity histograms for quasi-orthogonality or memorization.')
@click.argument('kind', type=click.Choice(['quasi-orthogonality', 'memorization']))
@helpers.dimension_options
@click.option('--m', default=3, type=click.IntRange(1), help='Matrix size m (default: 3).')
@click.option('--pairs', default=2000, type=click.IntRange(100),
              help='Pairs for the quasi-orthogonality histograms (default: 2000).')
@click.option('--q-mode', default='varying', type=click.Choice(Q_MODE_CHOICES),
              help='Q mode of the bound pairs and bundled items (default: varying).')
@click.option('--bundle-sizes', default='25,150', callback=helpers.validate_int_list,
              help='Comma-separated bundle sizes for memorization (default: 25,150).')
@click.option('--bins', default=40, type=click.IntRange(1), help='Histogram bins (default: 40).')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def histogram(ctx, kind, total_dim, d, round_dims, m, pairs, q_mode, bundle_sizes, bins, output_format):
    """
    quasi-orthogonality: similarities of independent pairs with shared and varying Q and of
    H1 against H1 * H2 (default D = 1000). memorization: similarity of bundled items to
    their own and to another bundle (default total dimension 600).
    """
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        if kind == 'quasi-orthogonality':
            if total_dim is None and d is None:
                d = 1000
            d = helpers.resolve_dims(total_dim, d, m, round_dims)
            result = experiments.exp_quasi_orthogonality(d, m, pairs, q_mode=q_mode, runner=runner, bins=bins)
            headers = ['histogram', 'mean', 'std', 'min', 'max']
        else:
            if d is not None:
                if total_dim is not None:
                    raise click.UsageError('--total-dim and --d are mutually exclusive.')
                total_dim = d * m * m
            total_dim = total_dim or 600
            result = experiments.exp_memorization_histogram(total_dim, m, bundle_sizes, runner=runner,
                                                            round_dims=round_dims, q_mode=q_mode)
            headers = ['bundle_size', 'memorized', 'min_gap', 'overlapping']
        helpers.report_result(runner, result, headers, output_format)


cli.add_command(demo_nested)
cli.add_command(diagonality)
cli.add_command(tree_accuracy)
cli.add_command(capacity)
cli.add_command(selftest)
