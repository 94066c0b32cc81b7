"""
Tests for CSV ingestion and report rendering.
"""
import io
import json
import math
import os
import sys
import tempfile
import unittest

import numpy as np
import pandas as pd

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.asymptotics import SimulationReport
from src.barycenter import BarycenterReport
from src.errors import EmptyInput, IoError, ParseError
from src.report_io import emit_report, ingest_csv, render_report, to_json_text, write_replicates_csv
from tests.mock_data import write_fixture_files


def _simulation_report(kind: str) -> SimulationReport:
    if kind == 'lln':
        return SimulationReport(
            kind='lln', distribution='cauchy:0,1', chart='normal:0,1', seed=0, n=100, reps=1,
            truth=0.0, target_variance=1.0, estimates=[0.1, 0.02], scaled_errors=[0.316, 0.2],
            n_grid=[10, 100], sample_means=[3.5, -0.4],
        )
    return SimulationReport(
        kind='clt', distribution='normal:0,1', chart='normal:0,1', seed=4, n=50, reps=3,
        truth=0.0, target_variance=math.pi / 6, estimates=[0.01, -0.02, 0.005],
        scaled_errors=[0.07, -0.14, 0.035], empirical_variance=0.011, variance_defined=True,
    )


class TestIngestCsv(unittest.TestCase):
    """Test cases for reading observations from CSV files."""

    def setUp(self):
        """Write the CSV fixtures to a temporary directory."""
        self.temp_dir = tempfile.TemporaryDirectory()
        self.paths = write_fixture_files(self.temp_dir.name)

    def tearDown(self):
        """Remove the fixtures."""
        self.temp_dir.cleanup()

    def test_plain_column(self):
        """Test reading a headerless column in order."""
        np.testing.assert_array_equal(ingest_csv(self.paths['plain']), [1.0, 2.0, 3.0])

    def test_header_is_skipped(self):
        """Test header auto-detection."""
        np.testing.assert_array_equal(ingest_csv(self.paths['header']), [1.0, 2.0])

    def test_select_by_name_and_index(self):
        """Test column selection by header name and by index, and multi-column reads."""
        np.testing.assert_array_equal(ingest_csv(self.paths['two_column'], 'b'), [2.0, 4.0, 8.0])
        np.testing.assert_array_equal(ingest_csv(self.paths['two_column'], 0), [1.0, 3.0, 5.0])
        rows = ingest_csv(self.paths['two_column'], [0, 'b'])
        self.assertEqual(rows.shape, (3, 2))

    def test_parse_error_line_number(self):
        """Test that a non-numeric cell is reported with its line."""
        with self.assertRaises(ParseError) as ctx:
            ingest_csv(self.paths['bad'])
        self.assertEqual(ctx.exception.line, 2)
        self.assertTrue(str(ctx.exception).startswith('line 2:'))

    def test_non_finite_values_rejected(self):
        """Test that NaN and infinity are parse errors."""
        with self.assertRaises(ParseError) as ctx:
            ingest_csv(self.paths['nan'])
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(ParseError):
            ingest_csv(self.paths['inf'])

    def test_missing_and_empty_files(self):
        """Test IoError and EmptyInput."""
        with self.assertRaises(IoError):
            ingest_csv(os.path.join(self.temp_dir.name, 'missing.csv'))
        with self.assertRaises(EmptyInput):
            ingest_csv(self.paths['empty'])
        with self.assertRaises(EmptyInput):
            ingest_csv(self.paths['header_only'])

    def test_unknown_column(self):
        """Test selecting a column that does not exist."""
        with self.assertRaises(ParseError):
            ingest_csv(self.paths['two_column'], 'c')
        with self.assertRaises(ParseError):
            ingest_csv(self.paths['plain'], 3)


class TestRenderReport(unittest.TestCase):
    """Test cases for JSON, CSV and text output."""

    def setUp(self):
        """Build a barycenter report."""
        self.report = BarycenterReport(coordinate_mean=0.1, barycenter=-1.2815515655446004, n=3,
                                       boundary_flag=False, chart='normal:0,1')

    def test_json_schema_and_precision(self):
        """Test fixed keys and 17 significant digits."""
        text = render_report(self.report, 'json')
        data = json.loads(text)
        self.assertEqual(list(data), ['coordinate_mean', 'barycenter', 'n', 'boundary_flag', 'chart'])
        self.assertIn('0.10000000000000001', text)
        self.assertEqual(data['barycenter'], -1.2815515655446004)
        self.assertIs(data['boundary_flag'], False)

    def test_json_special_values(self):
        """Test null for missing and non-finite values."""
        self.assertEqual(to_json_text({'a': math.nan, 'b': None, 'c': [np.float64(1.5), np.int64(2)]}),
                         '{"a": null, "b": null, "c": [1.5, 2]}')

    def test_clt_csv(self):
        """Test the per-replicate CSV schema."""
        text = render_report(_simulation_report('clt'), 'csv')
        lines = text.strip().split('\n')
        self.assertEqual(lines[0], 'replicate,estimate,scaled_error')
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith('0,'))

    def test_lln_csv_file(self):
        """Test the per-size CSV written for LLN runs."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, 'lln.csv')
            write_replicates_csv(_simulation_report('lln'), path)
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ['n', 'estimate', 'scaled_error', 'sample_mean', 'envelope'])
        self.assertEqual(list(frame['n']), [10, 100])
        self.assertAlmostEqual(frame['envelope'].iloc[1], 0.3, places=15)

    def test_text_table(self):
        """Test the two-column text table."""
        text = render_report(self.report, 'text')
        lines = text.strip().split('\n')
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[0].startswith('coordinate_mean'))
        self.assertIn('normal:0,1', lines[-1])

    def test_dataframe_reports(self):
        """Test tables rendered as JSON records and CSV."""
        table = pd.DataFrame({'chart': ['a', 'b'], 'barycenter': [0.5, 1.0]})
        self.assertEqual(json.loads(render_report(table, 'json')), [
            {'chart': 'a', 'barycenter': 0.5}, {'chart': 'b', 'barycenter': 1.0},
        ])
        self.assertEqual(render_report(table, 'csv').split('\n')[0], 'chart,barycenter')

    def test_emit_report_to_stream(self):
        """Test writing to a given stream."""
        stream = io.StringIO()
        emit_report({'value': 1.0}, 'json', stream)
        self.assertEqual(stream.getvalue(), '{"value": 1}\n')


if __name__ == '__main__':
    unittest.main()
