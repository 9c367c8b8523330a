"""
Unit tests for the large-|r| asymptotics, the tau-chart formulas and the
real-solution asymptotics.
"""
import dataclasses
import math
import unittest

import mpmath
from mpmath import mpc, mpf
import numpy as np

from modules.asympt import (
    GeneralAParams, H_large, I_large, I_sweep, expansion_from_leading, expansion_residual, fit_k,
    landmarks, normalize_nu1, singular_tau_suite, small_tau, tzitzeica_first_minimum,
    tzitzeica_parameters, tzitzeica_real,
)
from modules.exceptions import (
    ConditionViolationError, StripViolationError, ValidationError, WindowTooShortError,
)
from modules.monodromy import from_H0, nu1
from modules.odeint import SolveConfig, integrate
from modules.specfun import ComplexHP

EX3 = '-0.148+0.191i'
EX6 = '-0.2+0.045i'


class TestNormalization(unittest.TestCase):
    def test_regular_shift(self):
        x, flags = normalize_nu1('0.1+1.05i', 'regular', 30)
        with mpmath.workdps(30):
            self.assertLess(abs(x - mpc('0.1', '0.05')), mpf(10) ** -25)
        self.assertEqual(flags, ('renormalized',))

    def test_singular_shift(self):
        x, flags = normalize_nu1('-0.3+0.2i', 'singular', 30)
        with mpmath.workdps(30):
            self.assertLess(abs(x - mpc('-0.3', '-0.8')), mpf(10) ** -25)
        self.assertIn('renormalized', flags)

    def test_outside_validity_strip_is_flagged(self):
        _, flags = normalize_nu1('0.1+0.3i', 'regular', 30)
        self.assertIn('outside_validity_strip', flags)

    def test_boundaries(self):
        with self.assertRaises(StripViolationError):
            normalize_nu1('0.1+0.5i', 'regular', 30)
        with self.assertRaises(StripViolationError):
            normalize_nu1('0.3-0.5i', 'singular', 30)
        with self.assertRaises(ValidationError):
            normalize_nu1('0.1', 'hyperbolic', 30)


class TestLargeR(unittest.TestCase):
    def test_constant_solution(self):
        """H = 1 has I(r) = 2 sqrt(-r) and nu1 = 0."""
        value = I_large('-4', None, ComplexHP.of('1', 30), 'regular')
        self.assertIn('formal_constant', value.flags)
        with mpmath.workdps(30):
            self.assertLess(abs(value.value.value - 4), mpf(10) ** -25)
        H = H_large('-4', ComplexHP.of('0', 30), None, 'regular')
        self.assertEqual(H.value.value, 1)

    def test_positive_r_rejected(self):
        with self.assertRaises(ValidationError):
            H_large('1', '-0.18-0.0002i', '1', 'regular', 20)

    def test_regular_envelope(self):
        h = ComplexHP.of('-1/30-1i', 30)
        n = nu1(h, 'regular')
        g1 = from_H0(h).g1
        for r in ('-50', '-500'):
            value = H_large(r, n, g1, 'regular')
            bound = abs(mpmath.sqrt(6 * n.value.value)) * mpmath.cosh(value.phase.im) / (-3 * mpf(r)) ** 0.25
            self.assertLessEqual(abs(value.value.value - 1), bound * (1 + mpf(10) ** -20))

    def test_sweep_shifts_by_k(self):
        h = ComplexHP.of(EX3, 20)
        grid = [mpf(-10) - 5 * i for i in range(12)]
        k0 = I_sweep(grid, None, h, 'singular', 0)
        k1 = I_sweep(grid, None, h, 'singular', 1)
        self.assertEqual(len(k0), len(grid))
        for a, b in zip(k0, k1):
            self.assertAlmostEqual(float(b.value.re - a.value.re), 2 * math.pi, places=10)
        first = I_large(grid[0], None, h, 'singular', 0)
        self.assertLess(abs(first.value.value - k0[0].value.value), mpf(10) ** -15)

    def test_sweep_needs_decreasing_grid(self):
        with self.assertRaises(ValidationError):
            I_sweep(['-10', '-20', '-15'], None, ComplexHP.of(EX3, 20), 'singular')

    def test_fit_window(self):
        traj = integrate(ComplexHP.of(EX3, 20), '-1', SolveConfig(digits=20, sample_count=5))
        with self.assertRaises(WindowTooShortError):
            fit_k(traj, 'singular', (-600, -100))
        with self.assertRaises(ValidationError):
            fit_k(traj, 'singular', (-100, -600))


class TestLandmarks(unittest.TestCase):
    def test_last_zero_of_example(self):
        digits = 40
        h = ComplexHP.of(EX6, digits)
        marks = landmarks(nu1(h, 'singular'), from_H0(h).g1, h, 0, digits)
        self.assertIsNotNone(marks.r0)
        with mpmath.workdps(digits):
            r0 = mpf('-2.6279340765216450944920718115e24')
            self.assertLess(abs(marks.r0 - r0) / abs(r0), mpf('1e-9'))
            self.assertLess(abs(marks.y0 + 2 * (mpmath.sqrt(3) - 1) * mpmath.sqrt(-marks.r0)), 1)
        self.assertEqual(marks.to_json()['k'], 0)


class TestGeneralA(unittest.TestCase):
    def setUp(self):
        self.h = ComplexHP.of('-1/30-1i', 30)
        self.params = GeneralAParams.from_H0(self.h, 'regular')

    def test_small_tau_reproduces_H0(self):
        tau = mpf('1e-9')
        u, _ = small_tau(tau, self.params)
        with mpmath.workdps(30):
            expected = tau ** (mpf(1) / 3) * self.h.value / 2
            self.assertLess(abs(u.value.value - expected) / abs(expected), 1e-2)

    def test_condition_violations(self):
        broken = dataclasses.replace(self.params, rho=ComplexHP(mpc(0), 30))
        with self.assertRaises(ConditionViolationError) as ctx:
            small_tau('0.1', broken)
        self.assertIn('rho != 0', ctx.exception.violations)
        with self.assertRaises(ValidationError):
            GeneralAParams(self.params.a, self.params.rho, self.params.monodromy, self.params.nu_plus_one,
                           eps=2)

    def test_singular_suite_factored_form(self):
        params = GeneralAParams.from_H0(ComplexHP.of(EX3, 30), 'singular')
        value = singular_tau_suite('u2010', '50', params)
        with mpmath.workdps(30):
            gap = abs(value.value.value - value.aux['factored'].value)
            self.assertLess(gap, mpf(10) ** -20 * max(1, abs(value.value.value)))
        with self.assertRaises(ValidationError):
            singular_tau_suite('poles', 0, params)
        with self.assertRaises(ValidationError):
            singular_tau_suite('comets', '1', params)


class TestExpansion(unittest.TestCase):
    def test_generated_levels_consistent(self):
        rng = np.random.default_rng(3)
        digits = 40
        kappa = mpc(rng.uniform(-0.1, 0.1), rng.uniform(-1, 1))
        a11 = mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
        table = expansion_from_leading(6, ComplexHP(a11, digits), ComplexHP(kappa, digits), 0.2, 1.5, -1, digits)
        tol = mpf(10) ** (10 - digits)
        for name, value in table.checks.items():
            self.assertLess(value, tol, msg=name)
        self.assertEqual(table.flags, ())
        near = expansion_residual(table, mpf(10) ** 6)
        far = expansion_residual(table, mpf(10) ** 9)
        self.assertLess(far, near)

    def test_level_range(self):
        with self.assertRaises(ValidationError):
            expansion_from_leading(11, ComplexHP.of('1', 30), ComplexHP.of('0.1i', 30))


class TestRealSolutions(unittest.TestCase):
    def test_first_minimum(self):
        r_m, value = tzitzeica_first_minimum('100', 30)
        self.assertAlmostEqual(float(r_m), -0.3936948, delta=0.3936948e-4)
        self.assertAlmostEqual(float(value), -0.7291378246, delta=0.7291378246e-4)

    def test_first_minimum_small_amplitude(self):
        """The H0 = 15 minimum sits just below zero."""
        r_m, value = tzitzeica_first_minimum('15', 30)
        self.assertAlmostEqual(float(r_m), -0.8181156, delta=0.8181156e-4)
        self.assertAlmostEqual(float(value), -0.000621907, delta=0.000621907e-4)

    def test_constant(self):
        self.assertEqual(tzitzeica_parameters('1', 30).amplitude, 0)
        self.assertEqual(tzitzeica_real('-2', '1', 30).value.value, 1)
        with self.assertRaises(ValidationError):
            tzitzeica_first_minimum('1', 30)

    def test_conditions(self):
        for H0 in ('-2', '1+1i'):
            with self.assertRaises(ConditionViolationError):
                tzitzeica_parameters(H0, 30)


if __name__ == '__main__':
    unittest.main()
