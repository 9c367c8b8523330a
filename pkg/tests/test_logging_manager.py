"""
Unit tests for run and audit logging.
"""
import hashlib
import json
import logging
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

from modules.exceptions import SingularityApproachError
from modules.logging_manager import RunLogger, setup_logging, sha256_of


class TestRunLogger(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.run_logger = RunLogger(os.path.join(self.temp_dir, 'logs'))

    def tearDown(self):
        self.run_logger.close()

    def _entries(self, name):
        with open(os.path.join(self.temp_dir, 'logs', name)) as f:
            return [json.loads(line.split(' - ', 2)[2]) for line in f if line.strip()]

    def test_run_event(self):
        self.run_logger.log_run_event('RUN_STARTED', 'solve', {'H0': '-1/30-1i'})
        entry = self._entries('run.log')[-1]
        self.assertEqual(entry['event_type'], 'RUN_STARTED')
        self.assertEqual(entry['details']['H0'], '-1/30-1i')

    def test_numerical_failure_carries_details(self):
        error = SingularityApproachError('integration approached a zero or pole of H', '-3.5', '1e-30')
        self.run_logger.log_numerical_failure(error, {'H0': '1e-8'})
        entry = self._entries('run.log')[-1]
        self.assertEqual(entry['event_type'], 'NUMERICAL_FAILURE')
        self.assertEqual(entry['details']['error'], 'SingularityApproachError')

    def test_validation_failure(self):
        self.run_logger.log_validation_failure('run_config', {'digits': 4}, 'digits below 16')
        entry = self._entries('run.log')[-1]
        self.assertEqual(entry['details']['reason'], 'digits below 16')

    def test_artifact_checksum(self):
        path = Path(self.temp_dir) / 'table.csv'
        path.write_text('n,a\n1,2\n')
        digest = self.run_logger.log_artifact(path, 'coefficients')
        self.assertEqual(digest, hashlib.sha256(b'n,a\n1,2\n').hexdigest())
        self.assertEqual(sha256_of(path), digest)
        entry = self._entries('audit.log')[-1]
        self.assertEqual(entry['details']['sha256'], digest)
        self.assertEqual(entry['details']['kind'], 'coefficients')


class TestSetupLogging(unittest.TestCase):
    def test_levels(self):
        setup_logging(-1)
        self.assertEqual(logging.getLogger().level, logging.WARNING)
        setup_logging(1)
        self.assertEqual(logging.getLogger().level, logging.DEBUG)
        temp_dir = tempfile.mkdtemp()
        setup_logging(0, temp_dir)
        self.assertEqual(logging.getLogger().level, logging.INFO)
        self.assertTrue(os.path.exists(os.path.join(temp_dir, 'pipeline.log')))
        setup_logging(0)

    def test_import_leaves_root_unconfigured(self):
        """Importing the library installs no handlers; only setup_logging does."""
        code = ('import logging\n'
                'import modules.acceptance, modules.cli\n'
                'root = logging.getLogger()\n'
                'print(len(root.handlers), root.level)\n')
        done = subprocess.run([sys.executable, '-c', code], cwd=Path(__file__).resolve().parents[1],
                              capture_output=True, text=True, check=True)
        self.assertEqual(done.stdout.split(), ['0', str(logging.WARNING)])


if __name__ == '__main__':
    unittest.main()
