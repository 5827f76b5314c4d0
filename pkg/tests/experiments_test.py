"""
Tests for the scripted experiments and their helpers.
"""

import unittest

from ddt import ddt, data, unpack
import mock
import numpy as np

from ghrr import experiments, hdalg, structures
from ghrr.exceptions import CapacityError, ConvergenceError, DimensionError, GHRRError
from ghrr.experiments import CapacityConfig
from ghrr.hdalg import BaseSamplerSpec
from ghrr.runner import ExperimentRunner, RunConfig


def make_runner(seed=42, threads=1):
    return ExperimentRunner(RunConfig(seed=seed, threads=threads), logger=mock.MagicMock())


def metric_rows(result):
    return [(r.trial, sorted(r.point.items()), sorted(r.metrics.items())) for r in result.records]


@ddt
class HelpersTestCase(unittest.TestCase):
    """Test dimension, string and search helpers."""

    @data((600, 1, 600), (600, 2, 150), (900, 3, 100))
    @unpack
    def test_dims_for(self, total_dim, m, expected):
        """Test exact divisions."""
        self.assertEqual(experiments.dims_for(total_dim, m), expected)

    def test_dims_for_rounding(self):
        """Test indivisible totals raise unless rounding, which warns."""
        with self.assertRaises(DimensionError):
            experiments.dims_for(600, 3)
        logger = mock.MagicMock()
        self.assertEqual(experiments.dims_for(600, 3, round_dims=True, logger=logger), 66)
        logger.warning.assert_called_once()
        with self.assertRaises(DimensionError):
            experiments.dims_for(3, 2, round_dims=True)

    @data((1, 15000), (2, 123), (3, 25))
    @unpack
    def test_alphabet_size_for(self, n_components, expected):
        """Test the smallest alphabet covering the string pool."""
        self.assertEqual(experiments.alphabet_size_for(n_components), expected)

    def test_available_strings(self):
        """Test counts with and without distinct permutations."""
        self.assertEqual(experiments.available_strings(3, 2, True), 9)
        self.assertEqual(experiments.available_strings(3, 2, False), 6)

    def test_sample_strings(self):
        """Test sampled strings are distinct, up to reordering when asked."""
        rng = np.random.default_rng(0)
        strings = experiments.sample_strings(3, 2, 6, False, rng)
        self.assertEqual(len({tuple(sorted(s)) for s in strings}), 6)
        strings = experiments.sample_strings(3, 2, 9, True, rng)
        self.assertEqual(len(set(strings)), 9)
        with self.assertRaises(CapacityError):
            experiments.sample_strings(3, 2, 7, False, rng)

    @data((37, 1000, 37), (37, 20, 20), (1, 1000, 1), (64, 64, 64), (0, 100, 0))
    @unpack
    def test_find_capacity(self, threshold, n_max, expected):
        """Test the search finds the largest passing N."""
        self.assertEqual(experiments.find_capacity(lambda n, trial: n <= threshold, n_max, 3), expected)

    def test_find_capacity_majority_vote(self):
        """Test N passes only when most trials pass, and each N is evaluated once."""
        calls = []

        def evaluate(size, trial):
            calls.append((size, trial))
            return size <= 10 or (size <= 20 and trial == 0)

        self.assertEqual(experiments.find_capacity(evaluate, 1000, 3), 10)
        self.assertEqual(len(calls), len(set(calls)))

    def test_memorized(self):
        """Test the memorization predicate and its empty case."""
        spec = BaseSamplerSpec(dim_d=200, dim_m=2)
        rng = np.random.default_rng(4)
        items = [hdalg.sample_base(spec, rng) for _ in range(6)]
        c1, c2 = hdalg.bundle_all(items[:3]), hdalg.bundle_all(items[3:])
        self.assertTrue(experiments.memorized(items[:3], c1, c2))
        self.assertFalse(experiments.memorized(items[:3], c2, c1))
        logger = mock.MagicMock()
        self.assertTrue(experiments.memorized([], c1, c2, logger=logger))
        logger.warning.assert_called_once()

    @data(([1, 2, 3], [2, 4, 6], 1.0), ([1, 2, 3], [6, 4, 2], -1.0), ([1, 1, 1], [1, 2, 3], None),
          ([1, 2], [1, 2], None))
    @unpack
    def test_pearson(self, xs, ys, expected):
        """Test correlation and its undefined cases."""
        if expected is None:
            self.assertIsNone(experiments.pearson(xs, ys))
        else:
            self.assertAlmostEqual(experiments.pearson(xs, ys), expected, places=12)

    def test_capacity_trends(self):
        """Test rank correlation and fit per m."""
        summary = [{'m': 1, 'total_dim': t, 'capacity': c} for t, c in ((100, 5), (200, 10), (300, 16))]
        summary.append({'m': 2, 'total_dim': 100, 'capacity': 4})
        trends = experiments.capacity_trends(summary)
        self.assertEqual([t['m'] for t in trends], [1, 2])
        self.assertAlmostEqual(trends[0]['spearman_rho'], 1.0)
        self.assertGreater(trends[0]['slope'], 0)
        self.assertGreater(trends[0]['r_squared'], 0.99)
        self.assertIsNone(trends[1]['spearman_rho'])


@ddt
class ExperimentsTestCase(unittest.TestCase):
    """Test small runs of every experiment."""

    def test_quasi_orthogonality(self):
        """Test histogram summaries and near-zero means."""
        result = experiments.exp_quasi_orthogonality(100, 2, 100, runner=make_runner(), bins=10)
        self.assertEqual(len(result.records), 100)
        self.assertEqual([row['histogram'] for row in result.summary], ['shared', 'varying', 'binding'])
        for row in result.summary:
            self.assertLess(abs(row['mean']), 0.03)
            self.assertEqual(sum(row['counts']), 100)
            self.assertEqual(len(row['edges']), 11)

    def test_quasi_orthogonality_identical(self):
        """Test comparing hypervectors with themselves gives 1."""
        result = experiments.exp_quasi_orthogonality(20, 2, 100, runner=make_runner(), identical=True)
        self.assertAlmostEqual(result.summary[0]['mean'], 1.0, places=12)
        self.assertAlmostEqual(result.summary[1]['min'], 1.0, places=12)

    def test_quasi_orthogonality_needs_pairs(self):
        """Test fewer than 100 pairs raises."""
        with self.assertRaises(GHRRError):
            experiments.exp_quasi_orthogonality(20, 2, 50, runner=make_runner())

    def test_threads_do_not_change_results(self):
        """Test a threaded run reproduces a sequential one."""
        sequential = experiments.exp_quasi_orthogonality(30, 2, 100, runner=make_runner(threads=1))
        threaded = experiments.exp_quasi_orthogonality(30, 2, 100, runner=make_runner(threads=4))
        self.assertEqual(metric_rows(sequential), metric_rows(threaded))

    def test_kernel_profile(self):
        """Test records and summary rows per displacement."""
        result = experiments.exp_kernel_profile(200, 2, 1, [0.0, 1.0], 3, runner=make_runner(),
                                                q_modes=('shared', 'varying'))
        self.assertEqual(len(result.records), 12)
        self.assertEqual([(row['q_mode'], row['delta']) for row in result.summary],
                         [('shared', '0.0'), ('shared', '1.0'), ('varying', '0.0'), ('varying', '1.0')])
        self.assertAlmostEqual(result.summary[0]['mean'], 1.0, places=12)
        self.assertAlmostEqual(result.summary[1]['analytic'], np.exp(-0.5), places=12)

    def test_kernel_profile_pairing(self):
        """Test unknown pairings raise."""
        with self.assertRaises(GHRRError):
            experiments.exp_kernel_profile(20, 2, 1, [0.0], 3, runner=make_runner(), pairing='swap')

    def test_nested_demo_decodes(self):
        """Test m = 3 decodes every leaf and peaks near its value."""
        result = experiments.exp_nested_demo(200, 3, runner=make_runner())
        self.assertEqual([row['keys'] for row in result.summary], ['K1,K1', 'K1,K2', 'K2,K1', 'K2,K2'])
        for row in result.summary:
            self.assertEqual(row['decoded'], row['leaf'])
            self.assertAlmostEqual(row['peak_x'], row['true_x'], delta=0.3)
        self.assertEqual(len(result.records), 4 * 101)

    def test_nested_demo_scalar_confusion(self):
        """Test m = 1 retrieves the same mixture for K1,K2 and K2,K1."""
        result = experiments.exp_nested_demo(1800, 1, runner=make_runner())
        second, third = result.summary[1], result.summary[2]
        self.assertEqual(second['decoded'], third['decoded'])
        self.assertLess(abs(second['sim_V2'] - second['sim_V3']), 0.1)

    def test_nested_demo_needs_four_values(self):
        """Test other value counts raise."""
        with self.assertRaises(GHRRError):
            experiments.exp_nested_demo(20, 2, runner=make_runner(), value_points=(0.0, 1.0))

    def test_diagonality_commutativity(self):
        """Test controlled and free rows and their summaries."""
        result = experiments.exp_diagonality_commutativity([2], [0.2, 0.8], 2, runner=make_runner(), d=50,
                                                           free_samples=3)
        modes = [r.point['mode'] for r in result.records]
        self.assertEqual(modes.count('free'), 3)
        self.assertEqual(modes.count('controlled'), 4)
        self.assertEqual([row['mode'] for row in result.summary], ['controlled', 'free'])
        self.assertEqual(result.summary[0]['skipped'], 0)
        for record in result.records:
            self.assertLessEqual(record.metrics['commutativity'], 1.0 + 1e-12)
            if record.point['mode'] == 'controlled':
                self.assertEqual(record.point['target_2'], record.point['target_1'])
                for key in ('diagonality_1', 'diagonality_2'):
                    self.assertLessEqual(abs(record.metrics[key] - record.point['target_1']), 0.02)

    def test_diagonality_independent_pairing(self):
        """Test independent pairing draws the partner target from the list."""
        result = experiments.exp_diagonality_commutativity([2], [0.2, 0.8], 4, runner=make_runner(), d=50,
                                                           pairing='independent')
        self.assertEqual(len(result.records), 8)
        for record in result.records:
            self.assertEqual(record.point['pairing'], 'independent')
            self.assertIn(record.point['target_2'], (0.2, 0.8))
            self.assertLessEqual(abs(record.metrics['diagonality_2'] - record.point['target_2']), 0.02)

    def test_diagonality_skipped_pairs_counted(self):
        """Test pairs the optimizer gives up on are reported in the summary."""
        error = ConvergenceError('stuck', extra={'best': None, 'diagonality': 0.5, 'iterations': 1, 'restarts': 0})
        with mock.patch('ghrr.matalg.optimize_diagonality', side_effect=error):
            result = experiments.exp_diagonality_commutativity([2], [0.2], 3, runner=make_runner(), d=20,
                                                               free_samples=2)
        self.assertEqual([(row['mode'], row['skipped']) for row in result.summary], [('controlled', 3), ('free', 0)])
        self.assertIsNone(result.summary[0]['pearson_r'])

        with mock.patch('ghrr.matalg.optimize_diagonality', side_effect=[np.eye(2), np.eye(2), error]):
            result = experiments.exp_diagonality_commutativity([2], [1.0], 2, runner=make_runner(), d=20)
        self.assertEqual([(row['count'], row['skipped']) for row in result.summary], [(1, 1)])

    def test_diagonality_correlation_matched(self):
        """Test matched pairs at m = 3 correlate summed diagonality with commutativity."""
        result = experiments.exp_diagonality_commutativity([3], [0.0, 1 / 3.0, 2 / 3.0, 1.0], 10,
                                                           runner=make_runner(), d=500)
        row = result.summary[0]
        self.assertEqual((row['count'], row['skipped']), (40, 0))
        self.assertGreater(row['pearson_r'], 0.85)

    def test_diagonality_invalid_target(self):
        """Test targets outside [0, 1] raise."""
        with self.assertRaises(GHRRError):
            experiments.exp_diagonality_commutativity([2], [1.5], 1, runner=make_runner())

    def test_diagonality_invalid_pairing(self):
        """Test an unknown pairing raises."""
        with self.assertRaises(GHRRError):
            experiments.exp_diagonality_commutativity([2], [0.5], 1, runner=make_runner(), pairing='random')

    def test_diagonality_scalar(self):
        """Test m = 1 skips targets below 1 and always commutes."""
        result = experiments.exp_diagonality_commutativity([1], [0.5, 1.0], 3, runner=make_runner(), d=20)
        for record in result.records:
            self.assertEqual(record.point['target_1'], 1.0)
            self.assertEqual(record.metrics['commutativity'], 1.0)

    def test_tree_accuracy(self):
        """Test one summary row per (m, depth) at a fixed total dimension."""
        result = experiments.exp_tree_accuracy(900, [1, 2, 3], [1, 2], runner=make_runner(), trials=2)
        self.assertEqual(len(result.records), 12)
        rows = [(row['m'], row['d'], row['depth'], row['count']) for row in result.summary]
        self.assertEqual(rows, [(1, 900, 1, 2), (1, 900, 2, 2), (2, 225, 1, 2), (2, 225, 2, 2),
                                (3, 100, 1, 2), (3, 100, 2, 2)])
        for row in result.summary:
            if row['depth'] == 1:
                self.assertEqual(row['mean'], 1.0)
            self.assertEqual(row['diagonality'], 'random')
            self.assertEqual(row['q_mode'], 'shared')
            self.assertEqual(row['skipped'], 0)

    @data('shared', 'varying')
    def test_tree_accuracy_q_mode(self, q_mode):
        """Test the key and value Q mode reaches the codebook and the records."""
        with mock.patch('ghrr.structures.codebook_for', wraps=structures.codebook_for) as codebook_mock:
            result = experiments.exp_tree_accuracy(800, [2], [1, 2], runner=make_runner(), trials=1, q_mode=q_mode)
        self.assertEqual({call[1]['q_mode'] for call in codebook_mock.call_args_list}, {q_mode})
        self.assertEqual({r.point['q_mode'] for r in result.records}, {q_mode})
        self.assertEqual(result.summary[0]['mean'], 1.0)

    def test_tree_accuracy_q_mode_changes_keys(self):
        """Test shared keys hold one Q across elements and varying keys do not."""
        captured = {}
        codebook_for = structures.codebook_for

        def capture(spec, d, m, rng, **kwargs):
            codebook = codebook_for(spec, d, m, rng, **kwargs)
            captured[kwargs['q_mode']] = codebook
            return codebook

        with mock.patch('ghrr.structures.codebook_for', side_effect=capture):
            for q_mode in ('shared', 'varying'):
                experiments.exp_tree_accuracy(400, [2], [1], runner=make_runner(), trials=1, q_mode=q_mode)
        for q_mode, expected in (('shared', True), ('varying', False)):
            key = captured[q_mode].keys[0].elements
            magnitudes = np.abs(key)
            self.assertEqual(np.allclose(magnitudes, magnitudes[0], atol=1e-12), expected)

    def test_tree_accuracy_skipped_trials(self):
        """Test trials whose keys cannot be optimized show up as skipped."""
        error = ConvergenceError('stuck', extra={'best': None, 'diagonality': 0.5, 'iterations': 1, 'restarts': 0})
        with mock.patch('ghrr.matalg.optimize_diagonality', side_effect=error):
            result = experiments.exp_tree_accuracy(400, [2], [1, 2], runner=make_runner(), trials=2,
                                                   diagonality_targets=[0.5])
        self.assertEqual(result.records, [])
        self.assertEqual([(row['depth'], row['count'], row['skipped'], row['mean']) for row in result.summary],
                         [(1, 0, 2, None), (2, 0, 2, None)])

    def test_tree_accuracy_indivisible(self):
        """Test an indivisible total dimension raises without rounding."""
        with self.assertRaises(DimensionError):
            experiments.exp_tree_accuracy(600, [3], [1], runner=make_runner(), trials=1)

    def test_tree_accuracy_diagonality_targets(self):
        """Test controlled key diagonality, skipping m = 1 below 1."""
        result = experiments.exp_tree_accuracy(400, [1, 2], [1], runner=make_runner(), trials=1,
                                               diagonality_targets=[0.5])
        self.assertEqual([(row['m'], row['diagonality']) for row in result.summary], [(2, 0.5)])

    def test_memorization_histogram(self):
        """Test own and other similarities per bundle size."""
        result = experiments.exp_memorization_histogram(600, 2, [5, 50], runner=make_runner())
        self.assertEqual(len(result.records), 55)
        self.assertEqual([row['bundle_size'] for row in result.summary], [5, 50])
        self.assertTrue(result.summary[0]['memorized'])
        self.assertEqual(result.summary[0]['overlapping'], 0)

    def test_capacity_config(self):
        """Test building (D, m) pairs from total dimensions."""
        cfg = CapacityConfig.from_total_dims(1, [36], [1, 2, 3])
        self.assertEqual(cfg.dims, ((36, 1), (9, 2), (4, 3)))
        self.assertEqual(cfg.to_dict()['alphabet_size'], 15000)
        with self.assertRaises(GHRRError):
            CapacityConfig(n_components=0, dims=((10, 1),))
        self.assertEqual(cfg.to_dict()['q_mode'], 'shared')
        with self.assertRaises(GHRRError):
            CapacityConfig(n_components=1, dims=((10, 1),), trials=0)

    @data('shared', 'varying')
    def test_capacity_q_mode(self, q_mode):
        """Test symbols are drawn with the configured Q mode."""
        cfg = CapacityConfig(n_components=1, dims=((20, 2),), trials=1, string_pool=40, q_mode=q_mode)
        with mock.patch('ghrr.hdalg.sample_base', wraps=hdalg.sample_base) as sample_mock:
            result = experiments.exp_capacity(cfg, runner=make_runner())
        self.assertEqual({call[0][0].q_mode for call in sample_mock.call_args_list}, {q_mode})
        self.assertGreater(result.summary[0]['capacity'], 0)

    def test_capacity(self):
        """Test capacities are positive, records are ordered and reruns match."""
        cfg = CapacityConfig(n_components=2, dims=((40, 1), (10, 2)), trials=1, string_pool=400)
        result = experiments.exp_capacity(cfg, runner=make_runner())
        self.assertEqual([(row['d'], row['m']) for row in result.summary], [(40, 1), (10, 2)])
        for row in result.summary:
            self.assertGreater(row['capacity'], 0)
            self.assertEqual(row['alphabet_size'], 20)
        keys = [(r.point['d'], r.point['m'], r.point['bundle_size'], r.trial) for r in result.records]
        self.assertEqual(keys, sorted(keys))
        self.assertEqual([t['m'] for t in result.analysis], [1, 2])

        again = experiments.exp_capacity(cfg, runner=make_runner(threads=3))
        self.assertEqual(again.summary, result.summary)
        self.assertEqual(metric_rows(again), metric_rows(result))
