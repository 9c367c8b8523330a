"""
Unit tests for the precision-carrying complex type and special functions.
"""
import os
import unittest

import mpmath
from mpmath import mpc, mpf
import numpy as np
import scipy.special
import sympy

from modules.exceptions import BranchStepError, GammaPoleError, ValidationError
from modules.specfun import (
    ComplexHP, BranchTracker, bessel_modified, chebyshev_T, chebyshev_sympy, continuous_log,
    default_digits, gamma_complex, parse_complex, unwrap_logs,
)


class TestComplexHP(unittest.TestCase):
    def test_parse_examples(self):
        """Literals used throughout the examples parse exactly."""
        with mpmath.workdps(30):
            self.assertLess(abs(parse_complex('-1/30-1i', 30) - mpc(mpf(-1) / 30, -1)), mpf(10) ** -28)
            self.assertEqual(parse_complex('-300i', 30), mpc(0, -300))
            self.assertEqual(parse_complex('60-100i', 30), mpc(60, -100))
            self.assertEqual(parse_complex('i', 30), mpc(0, 1))
            self.assertEqual(parse_complex('1e-8', 30), mpc(mpf('1e-8'), 0))

    def test_parse_keeps_precision(self):
        """Parsing at the default context still carries every requested digit."""
        value = parse_complex('-1/30+2/3i', 50)
        with mpmath.workdps(60):
            self.assertLess(abs(value - mpc(mpf(-1) / 30, mpf(2) / 3)), mpf(10) ** -48)

    def test_unary_operations_keep_precision(self):
        third = ComplexHP(1, 50) / 3
        neg = -third
        conj = ComplexHP.of('1/3+1/7i', 50).conj()
        with mpmath.workdps(60):
            self.assertLess(abs(neg.value + mpf(1) / 3), mpf(10) ** -45)
            self.assertLess(abs(conj.value - mpc(mpf(1) / 3, -mpf(1) / 7)), mpf(10) ** -45)
        self.assertEqual(neg.digits, 50)

    def test_parse_rejects_garbage(self):
        for text in ('', 'abc', '1+', '2x'):
            with self.assertRaises(ValidationError):
                parse_complex(text, 20)

    def test_json_round_trip_keeps_precision(self):
        x = ComplexHP.of('-0.148+0.191i', 40)
        back = ComplexHP.from_json(x.to_json())
        self.assertEqual(back.digits, 40)
        with mpmath.workdps(40):
            self.assertLess(abs(back.value - x.value), mpf(10) ** -39)

    def test_minimum_precision(self):
        with self.assertRaises(ValidationError):
            ComplexHP(mpc(1), 8)

    def test_dp3_digits_environment(self):
        old = os.environ.get('DP3_DIGITS')
        try:
            os.environ['DP3_DIGITS'] = '24'
            self.assertEqual(default_digits(), 24)
            os.environ['DP3_DIGITS'] = '4'
            with self.assertRaises(ValidationError):
                default_digits()
        finally:
            if old is None:
                os.environ.pop('DP3_DIGITS', None)
            else:
                os.environ['DP3_DIGITS'] = old


class TestGamma(unittest.TestCase):
    def test_against_scipy(self):
        """Spouge gamma agrees with scipy's float64 gamma on both half-planes."""
        for z in (0.5, 3.25 + 1j, -2.5 + 0.75j, 0.1 - 4j, 7.0):
            ours = complex(gamma_complex(ComplexHP(mpc(z), 25)).value)
            ref = complex(scipy.special.gamma(complex(z)))
            self.assertLess(abs(ours - ref) / abs(ref), 1e-12, msg=f'z={z}')

    def test_high_precision_against_mpmath(self):
        z = mpc('0.3', '-2.7')
        with mpmath.workdps(60):
            ref = mpmath.gamma(z)
            ours = gamma_complex(ComplexHP(z, 50)).value
            self.assertLess(abs(ours - ref) / abs(ref), mpf(10) ** -45)

    def test_poles(self):
        for n in (0, -1, -7):
            with self.assertRaises(GammaPoleError):
                gamma_complex(ComplexHP(mpc(n), 20))


class TestBessel(unittest.TestCase):
    def test_against_scipy(self):
        for x in (0.3, 2.0 + 1.0j, 12.5, 45.0, 3.0 - 7.0j):
            for kind, ref_fn in (('I0', lambda v: scipy.special.iv(0, v)),
                                 ('I1', lambda v: scipy.special.iv(1, v)),
                                 ('K0', lambda v: scipy.special.kv(0, v))):
                ours = complex(bessel_modified(kind, ComplexHP(mpc(x), 25)).value)
                ref = complex(ref_fn(complex(x)))
                self.assertLess(abs(ours - ref) / abs(ref), 1e-10, msg=f'{kind}({x})')

    def test_k0_domain(self):
        with self.assertRaises(ValidationError):
            bessel_modified('K0', ComplexHP(mpc(-2), 20))
        with self.assertRaises(ValidationError):
            bessel_modified('J0', ComplexHP(mpc(1), 20))


class TestChebyshev(unittest.TestCase):
    def test_integer_polys_match_sympy(self):
        x = sympy.Symbol('x')
        for n in range(8):
            self.assertEqual(chebyshev_T(n, mode='integer_poly').as_expr().expand(),
                             sympy.chebyshevt(n, x).expand())

    def test_values(self):
        x = mpf('0.3')
        with mpmath.workdps(30):
            self.assertLess(abs(chebyshev_T(5, x=ComplexHP(mpc(x), 30)).value - mpmath.cos(5 * mpmath.acos(x))),
                            mpf(10) ** -25)

    def test_composed(self):
        s = sympy.Symbol('s')
        self.assertEqual(chebyshev_sympy(2, (s - 1) / 2), sympy.expand(2 * ((s - 1) / 2) ** 2 - 1))


class TestBranchTracking(unittest.TestCase):
    def test_unwrap_full_turn(self):
        """Logarithm along a full circle gains 2 pi i."""
        with mpmath.workdps(25):
            path = [mpmath.expjpi(mpf(2 * j) / 16) for j in range(17)]
            logs = unwrap_logs(path, 20)
            self.assertLess(abs(logs[-1].value - 2j * mpmath.pi), mpf(10) ** -15)

    def test_large_step_refused(self):
        tracker = BranchTracker.start(ComplexHP(mpc(1), 20))
        with self.assertRaises(BranchStepError):
            continuous_log(tracker, ComplexHP(mpc(-1, 1e-30), 20))

    def test_grid_independence(self):
        """A finer sampling of the same path gives the same endpoint."""
        def path(n):
            return [mpc(np.cos(t), np.sin(t)) * (1 + t) for t in np.linspace(0, 5, n)]
        coarse = unwrap_logs(path(20), 20)[-1].value
        fine = unwrap_logs(path(200), 20)[-1].value
        self.assertLess(abs(coarse - fine), 1e-12)


if __name__ == '__main__':
    unittest.main()
