"""
Unit tests for table, JSON and manifest exports.
"""
import json
import os
import tempfile
import unittest

from modules.exporter import export_json, export_manifest, export_rows, read_rows
from modules.logging_manager import sha256_of


class TestExporter(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.header = ['r', 're_H', 'im_H']
        self.rows = [['-1e-8', '-0.0333333333', '-1.0'], ['-0.5', '0.125', '-0.75']]

    def test_csv_round_trip(self):
        result = export_rows(self.header, self.rows, 'trajectory', 'csv', self.temp_dir)
        self.assertEqual(result['status'], 'success')
        self.assertEqual(result['row_count'], 2)
        self.assertEqual(read_rows(result['output_file']), self.rows)
        with open(result['output_file']) as f:
            self.assertEqual(f.readline().strip(), 'r,re_H,im_H')

    def test_csv_is_reproducible(self):
        first = export_rows(self.header, self.rows, 'a', 'csv', self.temp_dir)
        second = export_rows(self.header, self.rows, 'b', 'csv', self.temp_dir)
        self.assertEqual(sha256_of(first['output_file']), sha256_of(second['output_file']))

    def test_csv_keeps_decimal_text(self):
        """Cells are written verbatim, never reparsed as floats."""
        rows = [['0.10', '1e-8', '-0.000621907000'], ['00', 'NaN', '']]
        result = export_rows(self.header, rows, 'strings', 'csv', self.temp_dir)
        with open(result['output_file']) as f:
            self.assertEqual(f.read(), 'r,re_H,im_H\n0.10,1e-8,-0.000621907000\n00,NaN,\n')
        self.assertEqual(read_rows(result['output_file']), rows)

    def test_csv_empty_table(self):
        result = export_rows(self.header, [], 'empty', 'csv', self.temp_dir)
        self.assertEqual(result['row_count'], 0)
        self.assertEqual(read_rows(result['output_file']), [])

    def test_json_table(self):
        result = export_rows(self.header, self.rows, 'trajectory', 'json', self.temp_dir)
        with open(result['output_file']) as f:
            data = json.load(f)
        self.assertEqual(data['columns'], self.header)
        self.assertEqual(data['rows'], self.rows)

    def test_unknown_format(self):
        with self.assertRaises(ValueError):
            export_rows(self.header, self.rows, 'trajectory', 'xlsx', self.temp_dir)

    def test_manifest_checksums(self):
        table = export_rows(self.header, self.rows, 'trajectory', 'csv', self.temp_dir)['output_file']
        meta = export_json({'H0': '1'}, 'trajectory.meta', self.temp_dir)['output_file']
        self.assertTrue(meta.endswith('trajectory.meta.json'))
        result = export_manifest('solve', {'subcommand': 'solve'}, [table, meta], self.temp_dir,
                                 extra={'exit_code': 0})
        with open(result['output_file']) as f:
            manifest = json.load(f)
        self.assertEqual(manifest['artifacts']['trajectory.csv'], sha256_of(table))
        self.assertEqual(manifest['exit_code'], 0)
        self.assertIn('created', manifest)
        self.assertEqual(os.path.basename(result['output_file']), 'solve.manifest.json')


if __name__ == '__main__':
    unittest.main()
