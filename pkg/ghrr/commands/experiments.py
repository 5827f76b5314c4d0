"""
Commands for the structure, diagonality and capacity experiments.
"""

import click
import numpy as np

from ghrr import experiments, helpers, matalg

STRUCTURE_Q_MODES = ['shared', 'varying']


@click.command('demo-nested', short_help='Nested dictionary decoding demo.')
@helpers.dimension_options
@click.option('--m', default=3, type=click.IntRange(1), help='Matrix size m (default: 3).')
@click.option('--points', default='0,1,2,3', callback=helpers.validate_float_list,
              help='The four scalar values encoded as V1..V4 (default: 0,1,2,3).')
@click.option('--bandwidth', default=3.0, type=float,
              help='Scale of the Gaussian encoder frequencies (default: 3.0).')
@click.option('--grid-size', default=101, type=click.IntRange(2), help='Points in the similarity sweep.')
@click.option('--key-diagonality', type=click.FloatRange(0.0, 1.0), default=None,
              help='Optimize both keys to this diagonality instead of sampling them.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def demo_nested(ctx, total_dim, d, round_dims, m, points, bandwidth, grid_size, key_diagonality, output_format):
    """
    Encode K1*(K1*V1 + K2*V2) + K2*(K1*V3 + K2*V4), decode every value and sweep its
    similarity against the encoding of x over a grid around the points.
    """
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        d = helpers.resolve_dims(total_dim, d, m, round_dims)
        if len(points) != 4:
            raise click.BadParameter('Exactly four points are needed.', param_hint='--points')
        grid = np.linspace(min(points) - 1.0, max(points) + 1.0, grid_size)
        result = experiments.exp_nested_demo(d, m, runner=runner, value_points=points, grid=grid,
                                             key_diagonality=key_diagonality, bandwidth=bandwidth)
        helpers.report_result(runner, result, ['leaf', 'keys', 'true_x', 'peak_x', 'peak_similarity', 'decoded',
                                               'sim_V1', 'sim_V2', 'sim_V3', 'sim_V4'], output_format)


@click.command('diagonality', short_help='Diagonality vs degree of commutativity.')
@click.option('--m', 'm_values', default='3', callback=helpers.validate_int_list,
              help='Comma-separated matrix sizes (default: 3).')
@click.option('--targets', default='0,0.25,0.5,0.75,1', callback=helpers.validate_unit_interval_list,
              help='Comma-separated diagonality targets in [0, 1].')
@click.option('--pairs', default=40, type=click.IntRange(1),
              help='Optimized pairs per target (default: 40).')
@click.option('--d', 'd', default=1000, type=click.IntRange(1), help='Number of matrix elements D (default: 1000).')
@click.option('--pairing', default='matched', type=click.Choice(experiments.PAIRINGS),
              help='Optimize Q2 to the target of Q1 (default) or to a target drawn from the list.')
@click.option('--free-samples', default=200, type=click.IntRange(0),
              help='Pairs of freely sampled unitaries for the natural diagonality (default: 200).')
@click.option('--tol', default=0.02, type=click.FloatRange(0.0, 1.0), help='Optimizer tolerance.')
@click.option('--max-iters', default=2000, type=click.IntRange(1), help='Optimizer iteration limit.')
@click.option('--q-method', default='haar', type=click.Choice(matalg.SAMPLING_MODES),
              help='Sampling method of the free unitaries (default: haar).')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def diagonality(ctx, m_values, targets, pairs, d, pairing, free_samples, tol, max_iters, q_method, output_format):
    """Correlate diag(Q1) + diag(Q2) with the degree of commutativity of the two hypervectors."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        result = experiments.exp_diagonality_commutativity(m_values, targets, pairs, runner=runner, d=d,
                                                           free_samples=free_samples, tol=tol, max_iters=max_iters,
                                                           q_method=q_method, pairing=pairing)
        helpers.report_result(runner, result, ['mode', 'm', 'count', 'skipped', 'pearson_r', 'median_diagonality',
                                               'mean_commutativity'], output_format)


@click.command('tree-accuracy', short_help='Tree decoding accuracy against depth.')
@click.option('--total-dim', default=600, type=click.IntRange(1),
              help='Total dimension D * m^2 shared by every m (default: 600).')
@click.option('--m', 'm_values', default='1,2,3', callback=helpers.validate_int_list,
              help='Comma-separated matrix sizes (default: 1,2,3).')
@click.option('--depths', default='1,2,3,4,5,6,7,8', callback=helpers.validate_int_list,
              help='Comma-separated tree depths (default: 1..8).')
@click.option('--permute', is_flag=True, default=False, help='Permute every subtree before binding it.')
@click.option('--fresh-keys', is_flag=True, default=False, help='Use a new key set at every level.')
@click.option('--q-mode', default='shared', type=click.Choice(STRUCTURE_Q_MODES),
              help='One Q per key and value hypervector (default) or one per element.')
@click.option('--targets', default=None, callback=helpers.validate_unit_interval_list,
              help='Comma-separated key diagonalities; keys use random Q when omitted.')
@click.option('--trials', default=25, type=click.IntRange(1), help='Trees per point (default: 25).')
@click.option('--round-dims/--strict-dims', default=True,
              help='Round an indivisible total dimension down to a multiple of m^2 (default) or fail.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def tree_accuracy(ctx, total_dim, m_values, depths, permute, fresh_keys, q_mode, targets, trials, round_dims,
                  output_format):
    """Fraction of correctly decoded leaves of binary trees at a fixed total dimension."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        result = experiments.exp_tree_accuracy(total_dim, m_values, depths, runner=runner, permute=permute,
                                               diagonality_targets=targets, trials=trials, round_dims=round_dims,
                                               fresh_keys=fresh_keys, q_mode=q_mode)
        helpers.report_result(runner, result, ['m', 'total_dim', 'q_mode', 'permute', 'diagonality', 'depth', 'mean',
                                               'std', 'count', 'skipped'], output_format)


@click.command('capacity', short_help='Memorization capacity of bundled strings.')
@click.option('--components', default=1, type=click.IntRange(1),
              help='Symbols bound into each string (default: 1).')
@click.option('--total-dims', default='150,300,600,900', callback=helpers.validate_int_list,
              help='Comma-separated total dimensions (default: 150,300,600,900).')
@click.option('--m', 'm_values', default='1,2,3', callback=helpers.validate_int_list,
              help='Comma-separated matrix sizes (default: 1,2,3).')
@click.option('--distinct/--no-distinct', default=True,
              help='Treat reordered strings as different (default) or as the same string.')
@click.option('--q-mode', default='shared', type=click.Choice(STRUCTURE_Q_MODES),
              help='One Q per symbol hypervector (default) or one per element.')
@click.option('--trials', default=5, type=click.IntRange(1), help='Seeds voting at every N (default: 5).')
@click.option('--round-dims/--strict-dims', default=True,
              help='Round an indivisible total dimension down to a multiple of m^2 (default) or fail.')
@helpers.output_format_option
@helpers.run_options
@click.pass_context
def capacity(ctx, components, total_dims, m_values, distinct, q_mode, trials, round_dims, output_format):
    """Largest bundle size whose strings are all closer to their own bundle than to another."""
    runner = helpers.start_run(ctx)
    with helpers.ghrr_error_handler():
        cfg = experiments.CapacityConfig.from_total_dims(components, total_dims, m_values, round_dims=round_dims,
                                                         logger=runner.logger, permutations_distinct=distinct,
                                                         trials=trials, q_mode=q_mode)
        result = experiments.exp_capacity(cfg, runner=runner)
        helpers.report_result(runner, result, ['total_dim', 'm', 'n_components', 'permutations_distinct',
                                               'alphabet_size', 'capacity'], output_format)
