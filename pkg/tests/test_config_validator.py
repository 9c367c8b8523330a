"""
Unit tests for run-config and figure-registry validation.
"""
import json
import os
import tempfile
import unittest

from modules.config_validator import ConfigValidator, load_config, load_figures
from modules.exceptions import ValidationError


class TestConfigValidator(unittest.TestCase):
    def setUp(self):
        self.validator = ConfigValidator()
        self.temp_dir = tempfile.mkdtemp()

    def _write(self, name, data):
        path = os.path.join(self.temp_dir, name)
        with open(path, 'w') as f:
            if isinstance(data, str):
                f.write(data)
            else:
                json.dump(data, f)
        return path

    def test_templates_are_valid(self):
        for subcommand in ('solve', 'monodromy', 'asympt', 'compare', 'coeffs', 'report'):
            result = self.validator.validate(self.validator.get_template(subcommand))
            self.assertTrue(result['valid'], msg=f'{subcommand}: {result["errors"]}')

    def test_itemized_errors(self):
        config = {'subcommand': 'solve', 'digits': 8, 'family': 'irregular', 'colour': 'red'}
        result = self.validator.validate(config)
        self.assertFalse(result['valid'])
        paths = {e['path'] for e in result['errors']}
        self.assertIn('digits', paths)
        self.assertIn('family', paths)
        self.assertEqual(len(result['errors']), 3)

    def test_generator_pattern(self):
        self.assertTrue(self.validator.validate({'subcommand': 'orbit', 'generator': 'r1r2r3'})['valid'])
        self.assertFalse(self.validator.validate({'subcommand': 'orbit', 'generator': 'r1r4'})['valid'])

    def test_missing_and_broken_files(self):
        missing = self.validator.validate_file(os.path.join(self.temp_dir, 'absent.json'))
        self.assertFalse(missing['valid'])
        broken = self.validator.validate_file(self._write('broken.json', '{"subcommand": '))
        self.assertFalse(broken['valid'])
        self.assertIn('line', broken['errors'][0])

    def test_load_config(self):
        path = self._write('run.json', {'subcommand': 'monodromy', 'H0': '-0.148+0.191i', 'digits': 30})
        self.assertEqual(load_config(path)['digits'], 30)
        bad = self._write('bad.json', {'subcommand': 'monodromy', 'digits': 'many'})
        with self.assertRaises(ValidationError) as ctx:
            load_config(bad)
        self.assertIn('errors', ctx.exception.details)


class TestFigureRegistry(unittest.TestCase):
    def test_bundled_registry(self):
        registry = load_figures()
        self.assertGreaterEqual(len(registry), 40)
        for figure_id, entry in registry.items():
            self.assertEqual(entry['id'], figure_id)
            self.assertTrue(entry['r_end'].startswith('-'), msg=figure_id)

    def test_invalid_entry(self):
        temp_dir = tempfile.mkdtemp()
        path = os.path.join(temp_dir, 'figures.json')
        with open(path, 'w') as f:
            json.dump({'figures': [{'id': 'x', 'H0': '1', 'kind': 'ReZ', 'r_end': '-1', 'caption': ''}]}, f)
        with self.assertRaises(ValidationError):
            load_figures(path)
        with self.assertRaises(ValidationError):
            load_figures(os.path.join(temp_dir, 'absent.json'))


if __name__ == '__main__':
    unittest.main()
