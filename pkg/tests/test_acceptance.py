"""
Unit tests for the acceptance criteria runner (quick, cheap criteria only).
"""
import unittest

from modules.acceptance import CRITERIA, run_criterion, run_suite


class TestAcceptance(unittest.TestCase):
    def test_registry(self):
        self.assertEqual(sorted(CRITERIA), list(range(1, 16)))
        for number, (title, budget, fn) in CRITERIA.items():
            self.assertTrue(title, msg=f'criterion {number}')
            self.assertGreater(budget, 0)
            self.assertTrue(callable(fn))

    def test_cheap_criteria_pass(self):
        for number in (1, 3, 4, 12, 14):
            result = run_criterion(number, quick=True)
            self.assertTrue(result['valid'], msg=f'criterion {number}: {result["errors"]}')
            self.assertIsNone(result['errors'])
            self.assertGreaterEqual(result['elapsed'], 0)

    def test_unknown_criterion(self):
        result = run_criterion(99)
        self.assertFalse(result['valid'])
        self.assertEqual(result['errors'], ['unknown criterion 99'])

    def test_suite_summary(self):
        summary = run_suite([4, 1], quick=True)
        self.assertEqual([r['criterion'] for r in summary['results']], [1, 4])
        self.assertEqual(summary['total'], 2)
        self.assertEqual(summary['passed'], 2)
        self.assertTrue(summary['valid'])


if __name__ == '__main__':
    unittest.main()
