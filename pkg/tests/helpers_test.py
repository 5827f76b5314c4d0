"""
Tests for the CLI helpers.
"""

import json
import unittest

import click
from ddt import ddt, data, unpack
from mock import MagicMock, patch

from ghrr import helpers
from ghrr.exceptions import DimensionError, GHRRError
from ghrr.experiments import ExperimentResult


@ddt
class GHRRHelperTestCase(unittest.TestCase):
    """Test GHRR helper methods."""

    @data(
        ('1,2,3', [1, 2, 3]),
        (' 4 , 5 ', [4, 5]),
        ('7', [7]),
        ('', None),
        (None, None),
    )
    @unpack
    def test_validate_int_list(self, value, expected):
        """Test parsing comma-separated positive integers."""
        self.assertEqual(helpers.validate_int_list(None, None, value), expected)

    @data('1,x', '0', '1,-2', '1.5')
    def test_validate_int_list_invalid(self, value):
        """Test non-integers and non-positive values are rejected."""
        with self.assertRaises(click.BadParameter):
            helpers.validate_int_list(None, None, value)

    @data(
        ('0,0.5,1', [0.0, 0.5, 1.0]),
        ('-2.5', [-2.5]),
        ('1e-3', [0.001]),
    )
    @unpack
    def test_validate_float_list(self, value, expected):
        """Test parsing comma-separated numbers."""
        self.assertEqual(helpers.validate_float_list(None, None, value), expected)

    @data('a', 'nan', '1,inf', '-inf')
    def test_validate_float_list_invalid(self, value):
        """Test non-numeric and non-finite values are rejected."""
        with self.assertRaises(click.BadParameter):
            helpers.validate_float_list(None, None, value)

    def test_validate_unit_interval_list(self):
        """Test values must lie in [0, 1]."""
        self.assertEqual(helpers.validate_unit_interval_list(None, None, '0,1'), [0.0, 1.0])
        self.assertIsNone(helpers.validate_unit_interval_list(None, None, None))
        with self.assertRaises(click.BadParameter):
            helpers.validate_unit_interval_list(None, None, '0.5,1.01')

    @data(
        (None, 50, 3, False, 50),
        (600, None, 2, False, 150),
        (600, None, 3, True, 66),
    )
    @unpack
    def test_resolve_dims(self, total_dim, d, m, round_dims, expected):
        """Test D from either --d or --total-dim."""
        with patch('ghrr.helpers.console'):
            self.assertEqual(helpers.resolve_dims(total_dim, d, m, round_dims), expected)

    def test_resolve_dims_usage(self):
        """Test both or neither dimension option is a usage error."""
        with self.assertRaises(click.UsageError):
            helpers.resolve_dims(600, 50, 2, True)
        with self.assertRaises(click.UsageError):
            helpers.resolve_dims(None, None, 2, True)
        self.assertIsNone(helpers.resolve_dims(None, None, 2, True, required=False))

    def test_resolve_dims_strict(self):
        """Test an indivisible total dimension raises when not rounding."""
        with self.assertRaises(DimensionError):
            helpers.resolve_dims(600, None, 3, False)

    @patch('ghrr.helpers.console')
    def test_error_handler_exits(self, console_mock):
        """Test a GHRRError is logged and exits with status 1."""
        with self.assertRaises(SystemExit) as cm:
            with helpers.ghrr_error_handler():
                raise GHRRError('boom')
        self.assertEqual(cm.exception.code, 1)
        console_mock.error.assert_called_with('boom')

    def test_error_handler_passes_other_errors(self):
        """Test other exceptions propagate."""
        with self.assertRaises(ValueError):
            with helpers.ghrr_error_handler():
                raise ValueError('other')

    @patch('ghrr.helpers.click.echo')
    def test_report_rows_json(self, echo_mock):
        """Test JSON output."""
        rows = [{'m': 2, 'mean': 0.5}]
        helpers.report_rows(rows, 'json')
        self.assertEqual(json.loads(echo_mock.call_args[0][0]), rows)

    @patch('ghrr.helpers.click.echo')
    def test_report_rows_table(self, echo_mock):
        """Test table output with selected headers and cell formatting."""
        helpers.report_rows([{'m': 2, 'mean': 1 / 3.0, 'delta': (0.5, 1.0), 'r': None}], 'table',
                            headers=['m', 'mean', 'delta', 'r'])
        table = echo_mock.call_args[0][0]
        self.assertIn('0.333333', table)
        self.assertIn('0.5 1', table)
        self.assertIn('-', table)
        self.assertNotIn('0.3333333', table)

    @patch('ghrr.helpers.console')
    @patch('ghrr.helpers.click.echo')
    def test_report_rows_empty(self, echo_mock, console_mock):
        """Test an empty table logs instead of printing."""
        helpers.report_rows([], 'table')
        echo_mock.assert_not_called()
        console_mock.info.assert_called_once()

    @patch('ghrr.helpers.click.echo')
    def test_report_result(self, echo_mock):
        """Test results are written through the runner and printed with their analysis."""
        runner = MagicMock()
        runner.write.return_value = '/tmp/out'
        result = ExperimentResult('capacity', ['record'], [{'capacity': 3}], [{'m': 1}])

        self.assertEqual(helpers.report_result(runner, result, output_format='json'), '/tmp/out')
        runner.write.assert_called_with('capacity', ['record'], [{'capacity': 3}], [{'m': 1}])
        self.assertEqual(json.loads(echo_mock.call_args[0][0]), {'summary': [{'capacity': 3}], 'analysis': [{'m': 1}]})

        echo_mock.reset_mock()
        helpers.report_result(runner, result)
        self.assertEqual(echo_mock.call_count, 2)


if __name__ == '__main__':
    unittest.main()
