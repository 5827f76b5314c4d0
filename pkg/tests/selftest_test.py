"""
Tests for the invariant suite.
"""

import unittest

from mock import MagicMock, patch

from ghrr import experiments, selftest
from ghrr.exceptions import ConvergenceError
from ghrr.experiments import ExperimentResult
from ghrr.runner import ExperimentRunner, RunConfig


class SelftestTestCase(unittest.TestCase):
    """Test the invariant suite."""

    def setUp(self):
        self.runner = ExperimentRunner(RunConfig(seed=2024), logger=MagicMock())

    def test_exact_checks_pass(self):
        """Test every exactness check passes."""
        results = selftest.run_selftest(self.runner)
        self.assertEqual([r.name for r in results], [name for name, _ in selftest.EXACT_CHECKS])
        for result in results:
            self.assertTrue(result.passed, '{0}: {1}'.format(result.name, result.detail))

    def test_statistical_checks_only_when_full(self):
        """Test --full adds the statistical checks."""
        checks = [(name, MagicMock(return_value=(True, 'ok'))) for name, _ in selftest.STATISTICAL_CHECKS]
        with patch.object(selftest, 'STATISTICAL_CHECKS', checks):
            results = selftest.run_selftest(self.runner, full=True)
        self.assertEqual(len(results), len(selftest.EXACT_CHECKS) + len(checks))
        for _, check in checks:
            check.assert_called_once_with(self.runner)

    def test_raising_check_fails(self):
        """Test a check raising a library error is reported as failed."""
        check = MagicMock(side_effect=ConvergenceError('stuck'))
        result = selftest._run('diagonality-correlation', check, self.runner)
        self.assertFalse(result.passed)
        self.assertIn('stuck', result.detail)

    def test_reproducible(self):
        """Test one seed gives the same details."""
        first = selftest.run_selftest(ExperimentRunner(RunConfig(seed=3)))
        second = selftest.run_selftest(ExperimentRunner(RunConfig(seed=3)))
        self.assertEqual(first, second)


def tree_result(curves):
    summary = [{'m': m, 'depth': depth, 'mean': mean} for m, curve in curves.items() for depth, mean in curve.items()]
    return ExperimentResult('tree-accuracy', [], summary)


class StatisticalCheckTestCase(unittest.TestCase):
    """Test the decisions of the statistical checks on fixed experiment results."""

    def setUp(self):
        self.runner = ExperimentRunner(RunConfig(seed=1), logger=MagicMock())

    @patch('ghrr.experiments.exp_tree_accuracy')
    def test_permutation_holds_longer(self, experiment_mock):
        """Test the permuted curve must stay perfect to a greater depth."""
        plain = tree_result({1: {1: 1.0, 2: 0.75, 3: 0.5}})
        permuted = tree_result({1: {1: 1.0, 2: 1.0, 3: 0.9}})
        experiment_mock.side_effect = [plain, permuted]
        self.assertEqual(selftest.check_permutation_holds_longer(self.runner),
                         (True, 'perfect up to depth 2 permuted, 1 plain'))
        self.assertTrue(experiment_mock.call_args[1]['permute'])

        experiment_mock.side_effect = [plain, plain]
        self.assertFalse(selftest.check_permutation_holds_longer(self.runner)[0])

    @patch('ghrr.experiments.exp_tree_accuracy')
    def test_tree_depth_ordering(self, experiment_mock):
        """Test every m > 1 curve must not fall below the m = 1 curve."""
        fhrr = {1: 1.0, 2: 0.75, 3: 0.5}
        experiment_mock.return_value = tree_result({1: fhrr, 2: {1: 1.0, 2: 1.0, 3: 0.94}, 3: {1: 1.0, 2: 1.0, 3: 1.0}})
        self.assertTrue(selftest.check_tree_depth_ordering(self.runner)[0])

        experiment_mock.return_value = tree_result({1: fhrr, 2: {1: 1.0, 2: 0.6, 3: 0.94}, 3: fhrr})
        passed, detail = selftest.check_tree_depth_ordering(self.runner)
        self.assertFalse(passed)
        self.assertIn('-0.150', detail)

    @patch('ghrr.experiments.exp_capacity')
    def test_capacity_growth(self, experiment_mock):
        """Test capacity must grow strictly with the total dimension for every m."""
        def result(capacities):
            summary = [{'m': m, 'total_dim': t, 'capacity': c}
                       for m, row in capacities.items() for t, c in zip((150, 300, 600), row)]
            return ExperimentResult('capacity', [], summary, experiments.capacity_trends(summary))

        experiment_mock.return_value = result({1: [20, 41, 80], 2: [22, 40, 83], 3: [18, 37, 70]})
        self.assertTrue(selftest.check_capacity_growth(self.runner)[0])

        experiment_mock.return_value = result({1: [20, 41, 80], 2: [22, 40, 83], 3: [18, 37, 37]})
        self.assertFalse(selftest.check_capacity_growth(self.runner)[0])

    @patch('ghrr.experiments.exp_diagonality_commutativity')
    def test_diagonality_correlation(self, experiment_mock):
        """Test the correlation check needs r above 0.9 and no skipped pairs."""
        def result(r, skipped):
            return ExperimentResult('diagonality', [], [{'mode': 'controlled', 'm': 3, 'count': 200 - skipped,
                                                         'skipped': skipped, 'pearson_r': r}])

        experiment_mock.return_value = result(0.95, 0)
        self.assertTrue(selftest.check_diagonality_correlation(self.runner)[0])
        self.assertEqual(experiment_mock.call_args[1]['pairing'], 'matched')
        self.assertEqual(experiment_mock.call_args[0][1:], ([0.0, 1 / 3.0, 2 / 3.0, 1.0], 50))

        experiment_mock.return_value = result(0.95, 3)
        self.assertFalse(selftest.check_diagonality_correlation(self.runner)[0])
        experiment_mock.return_value = result(0.86, 0)
        self.assertFalse(selftest.check_diagonality_correlation(self.runner)[0])
