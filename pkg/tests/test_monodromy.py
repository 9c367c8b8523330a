"""
Unit tests for the map from H(0) to monodromy data and nu1.
"""
import unittest

import mpmath
from mpmath import mpc, mpf
import numpy as np

from modules.exceptions import (
    BoundaryError, ConventionUnreachableError, ExcludedValueError, ValidationError, ZeroA0Error,
)
from modules.monodromy import (
    Manifold87Point, MonodromyPoint, Nu1, algebraic_cases, from_H0, linear_identities, map_variants,
    membership, nu1, rho_from_s, solve_linear_identities, tz3x3_data, unmap_variant,
    varpi_identities,
)
from modules.specfun import ComplexHP

DIGITS = 30
TOL = mpf(10) ** (8 - DIGITS)

EXAMPLE_NU1 = [
    ('-1/30-1i', 'regular', (-0.185823, -0.0001892)),
    ('60-100i', 'regular', (0.5832543, -0.162814)),
    ('-0.148+0.191i', 'singular', (0.0249933, -0.329580)),
    ('-300i', 'singular', (0.732934, -0.249469)),
]


class TestFromH0(unittest.TestCase):
    def test_random_points_on_manifold(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            H0 = ComplexHP(mpc(rng.uniform(-5, 5), rng.uniform(-5, 5)), DIGITS)
            point = from_H0(H0)
            self.assertEqual(point.s.value, 0)
            self.assertIsNotNone(point.lifted)
            result = membership(point)
            self.assertTrue(result['valid'], msg=str(result['errors']))

    def test_constant_one(self):
        point = from_H0('1', DIGITS)
        with mpmath.workdps(DIGITS):
            self.assertLess(abs(point.g3.value - 1), TOL)
            self.assertLess(abs(point.g4.value), TOL)
        self.assertTrue(membership(point)['valid'])

    def test_excluded_values(self):
        with mpmath.workdps(DIGITS + 5):
            w = mpmath.expjpi(mpf(2) / 3)
        with self.assertRaises(ExcludedValueError) as ctx:
            from_H0(ComplexHP(w, DIGITS))
        self.assertEqual(ctx.exception.case, 2)
        with self.assertRaises(ExcludedValueError) as ctx:
            from_H0(ComplexHP(mpmath.conj(w), DIGITS))
        self.assertEqual(ctx.exception.details['algebraic_case'], 3)
        with self.assertRaises(ZeroA0Error):
            from_H0('0', DIGITS)

    def test_json_round_trip(self):
        point = from_H0('0.3-2i', DIGITS)
        back = MonodromyPoint.from_json(point.to_json())
        self.assertTrue(membership(back)['valid'])
        with mpmath.workdps(DIGITS):
            self.assertLess(abs(back.g1.value - point.g1.value), TOL)

    def test_algebraic_cases(self):
        cases = algebraic_cases(DIGITS)
        self.assertEqual([c['case'] for c in cases], [1, 2, 3])
        for c in cases:
            self.assertTrue(membership(c['point'])['valid'], msg=f'case {c["case"]}')


class TestNu1(unittest.TestCase):
    def test_examples(self):
        for H0, convention, (re, im) in EXAMPLE_NU1:
            value = nu1(H0, convention, DIGITS).value
            self.assertAlmostEqual(float(value.re), re, delta=1e-6, msg=H0)
            self.assertAlmostEqual(float(value.im), im, delta=1e-6, msg=H0)

    def test_strips(self):
        regular = nu1('-1/30-1i', 'regular', DIGITS).value
        self.assertLess(abs(regular.im), mpf(1) / 6)
        singular = nu1('-0.148+0.191i', 'singular', DIGITS).value
        self.assertTrue(-1 < singular.im < 0)

    def test_unreachable(self):
        with mpmath.workdps(DIGITS + 5):
            w = mpmath.expjpi(mpf(2) / 3)
        with self.assertRaises(ConventionUnreachableError):
            nu1(ComplexHP(w, DIGITS), 'regular')
        with self.assertRaises(ValidationError):
            nu1('2', 'sideways', DIGITS)

    def test_nu_tilde(self):
        value = nu1('-1/30-1i', 'regular', DIGITS)
        back = Nu1.from_json(value.to_json())
        self.assertEqual(back.convention, 'regular')
        with mpmath.workdps(DIGITS):
            self.assertLess(abs(back.nu_tilde_plus_one.value - 1j * value.value.value), TOL)


class TestIdentities(unittest.TestCase):
    def setUp(self):
        self.H0 = ComplexHP.of('0.7+1.3i', DIGITS)
        self.point = from_H0(self.H0)

    def test_linear_relations(self):
        for name, residual in linear_identities(self.point, self.H0).items():
            self.assertLess(residual, TOL, msg=name)
        g1, g2, g3 = solve_linear_identities(self.H0)
        with mpmath.workdps(DIGITS):
            self.assertLess(abs(g1.value - self.point.g1.value), TOL)
            self.assertLess(abs(g2.value - self.point.g2.value), TOL)
            self.assertLess(abs(g3.value - self.point.g3.value), TOL)

    def test_varpi_relations(self):
        for name, residual in varpi_identities(self.point, self.H0).items():
            self.assertLess(residual, TOL * 1000, msg=name)

    def test_variants(self):
        for which in ('sym_g2neg', 'sym_g2g1'):
            target = map_variants(self.point, which)
            self.assertIsInstance(target, Manifold87Point)
            self.assertTrue(membership(target)['valid'], msg=which)
            back = unmap_variant(target, which)
            with mpmath.workdps(DIGITS):
                self.assertLess(abs(back.g1.value - self.point.g1.value), TOL)
                self.assertLess(abs(back.g2.value - self.point.g2.value), TOL)
        with self.assertRaises(ValidationError):
            map_variants(self.point, 'mirror')

    def test_tz3x3(self):
        result = tz3x3_data(self.H0)
        self.assertLess(result['agreement'], TOL)


class TestRho(unittest.TestCase):
    def test_values(self):
        rho = rho_from_s('1', DIGITS)
        with mpmath.workdps(DIGITS):
            self.assertLess(abs(rho.two_rho.value - mpf(1) / 2), TOL)
            self.assertLess(abs(rho.rho1.value - mpf(1) / 4), TOL)

    def test_boundary(self):
        for s in ('-1', '3'):
            with self.assertRaises(BoundaryError):
                rho_from_s(s, DIGITS)


if __name__ == '__main__':
    unittest.main()
