"""
Unit tests for the dp3 command line: config layering, exit codes and artifacts.
"""
import json
import os
import tempfile
import unittest

from modules.cli import RunConfig, emit_figure_data, main
from modules.exceptions import UnknownFigureError, ValidationError


class TestRunConfig(unittest.TestCase):
    def test_flags_override_file(self):
        file_values = {'subcommand': 'solve', 'H0': '1', 'r_end': '-2', 'digits': 30}
        config = RunConfig.layered('solve', file_values, {'r_end': '-5', 'digits': None})
        self.assertEqual(config.H0, '1')
        self.assertEqual(config.r_end, '-5')
        self.assertEqual(config.digits, 30)
        self.assertEqual(config.sample_count, 500)

    def test_unknown_keys_ignored(self):
        config = RunConfig.layered('qpoly', {'colour': 'red'}, {'K': 6})
        self.assertEqual(config.K, 6)

    def test_subcommand_mismatch(self):
        with self.assertRaises(ValidationError):
            RunConfig.layered('solve', {'subcommand': 'monodromy', 'H0': '1'})

    def test_required_fields(self):
        with self.assertRaises(ValidationError) as ctx:
            RunConfig.layered('solve', flag_values={'H0': '1'}).validate()
        self.assertEqual(ctx.exception.details['missing'], ['r_end'])


class TestMain(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def _run(self, *argv):
        return main(list(argv) + ['--output-dir', self.temp_dir, '-q'])

    def _load(self, name):
        with open(os.path.join(self.temp_dir, name)) as f:
            return json.load(f)

    def test_qpoly_writes_manifest(self):
        self.assertEqual(self._run('qpoly', '--K', '8'), 0)
        manifest = self._load('qpoly.manifest.json')
        self.assertIn('qpoly.csv', manifest['artifacts'])
        self.assertIn('qpoly.checks.json', manifest['artifacts'])
        self.assertEqual(manifest['config']['K'], 8)
        self.assertTrue(self._load('qpoly.checks.json')['checks']['valid'])

    def test_polys_json_format(self):
        self.assertEqual(self._run('polys', '--N', '5', '--format', 'json'), 0)
        table = self._load('polys.json')
        self.assertEqual(len(table['rows']), 5)
        self.assertEqual(table['columns'][0], 'n')

    def test_missing_required_field(self):
        self.assertEqual(self._run('solve', '--H0=1'), 2)
        report = self._load('error.report.json')
        self.assertEqual(report['config']['subcommand'], 'solve')
        self.assertFalse(os.path.exists(os.path.join(self.temp_dir, 'solve.manifest.json')))

    def test_config_file_mismatch(self):
        path = os.path.join(self.temp_dir, 'run.json')
        with open(path, 'w') as f:
            json.dump({'subcommand': 'monodromy', 'H0': '1'}, f)
        self.assertEqual(self._run('qpoly', '--config', path), 2)

    def test_unknown_figure(self):
        self.assertEqual(self._run('figures', '--figure', 'no-such-figure'), 2)
        self.assertTrue(os.path.exists(os.path.join(self.temp_dir, 'error.report.json')))

    def test_figure_listing(self):
        self.assertEqual(self._run('figures'), 0)
        listing = self._load('figures.json')['figures']
        self.assertGreaterEqual(len(listing), 40)
        self.assertTrue(all('caption' in item for item in listing))

    def test_emit_unknown_figure(self):
        config = RunConfig('figures', output_dir=self.temp_dir)
        with self.assertRaises(UnknownFigureError):
            emit_figure_data('no-such-figure', config)


if __name__ == '__main__':
    unittest.main()
