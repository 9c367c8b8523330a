"""
Unit tests for algebroid families, branch functions and F_nu determinants.
"""
import unittest

import mpmath
from mpmath import mpc, mpf
import sympy
from sympy import QQ

from modules.algebroid import (
    AlgebroidFamily, BranchVector, algebraic_equation, branch_period, branch_series, ep_residual,
    fnu_checks, fnu_det, fnu_symbolic_checks, group_law_q, hp_coeffs, q_from_rho, recurrence_coeffs,
    rho_from_q, symmetry_and_group, symmetry_y_level, vandermonde_det, vandermonde_reconstruct,
)
from modules.exceptions import SingularTruncationError, UnsupportedLabelError, ValidationError, ZeroA0Error
from modules.series import taylor_coeffs
from modules.specfun import ComplexHP


class TestFamilies(unittest.TestCase):
    def test_labels(self):
        self.assertEqual(AlgebroidFamily.from_label(0).two_rho, QQ(1, 3))
        self.assertEqual(AlgebroidFamily.from_label(0).q, QQ(1))
        self.assertEqual(AlgebroidFamily.from_label(-1).two_rho, QQ(1, 2))
        self.assertEqual(AlgebroidFamily.from_label(2).two_rho, QQ(1, 7))

    def test_branching_range(self):
        with self.assertRaises(ValidationError):
            AlgebroidFamily(None, QQ(1), QQ(3, 2))
        with self.assertRaises(UnsupportedLabelError):
            AlgebroidFamily.from_label(1.5)

    def test_q_map_and_group_law(self):
        for q in (QQ(1), QQ(1, 2), QQ(5, 3)):
            self.assertEqual(q_from_rho(rho_from_q(q)), q)
        # the group law multiplies q labels
        self.assertEqual(group_law_q(2, 3), QQ(6))
        self.assertEqual(group_law_q(QQ(1, 2), 4), QQ(2))
        # 2 rho = 1/3 is the unit
        self.assertEqual(symmetry_and_group('group_law', two_rho1=QQ(2, 7), two_rho2=QQ(1, 3)), QQ(2, 7))
        with self.assertRaises(ValidationError):
            symmetry_and_group('sym_x')

    def test_branch_period(self):
        self.assertEqual(branch_period(0), (3, 4))
        self.assertEqual(branch_period(1), (5, 4))
        self.assertEqual(branch_period(-1), (1, 1))
        self.assertEqual(branch_period(-3), (3, 2))


class TestCoefficients(unittest.TestCase):
    def test_label_zero_is_h(self):
        self.assertEqual(hp_coeffs(0, 'exact', 6).a, taylor_coeffs('exact', 6).a)

    def test_numeric_matches_exact(self):
        a0 = ComplexHP.of('0.9+0.1i', 30)
        for p in (1, -1):
            exact = recurrence_coeffs(p, 10)
            numeric = hp_coeffs(p, a0, 10, 30)
            with mpmath.workdps(30):
                for k in range(1, 11):
                    ref = exact.value_at(k, a0.value, 30)
                    self.assertLess(abs(numeric.a[k].value - ref), mpf(10) ** -22 * max(1, abs(ref)),
                                    msg=f'p={p}, k={k}')

    def test_zero_a0(self):
        with self.assertRaises(ZeroA0Error):
            hp_coeffs(1, ComplexHP.of('0', 20), 5)

    def test_rational_in_a0(self):
        self.assertTrue(symmetry_y_level(1, ComplexHP.of('0.8+0.3i', 30))['valid'])

    def test_rotation_symmetry(self):
        result = symmetry_and_group('sym_n', label=1, q=1, l=0, a0=ComplexHP.of('1.3+0.2i', 30), order=12)
        self.assertLess(mpf(result['coefficient_error']), mpf(10) ** -20)
        with self.assertRaises(ValidationError):
            symmetry_and_group('sym_m', label=1, a0=ComplexHP.of('1.3+0.2i', 30))


class TestDeterminants(unittest.TestCase):
    def test_symbolic_f3(self):
        result = fnu_symbolic_checks(3)
        self.assertTrue(result['valid'], msg=str(result['errors']))
        self.assertEqual(result['degree'], 3)

    def test_degenerate_rational_vector(self):
        """f_0(0) = 0 moves the leading term of det F_3 to first order."""
        series = [[QQ(0), QQ(2), QQ(-1), QQ(3), QQ(1), QQ(0)],
                  [QQ(3), QQ(1, 2), QQ(1), QQ(0), QQ(-2), QQ(1)],
                  [QQ(-1), QQ(4), QQ(0), QQ(1), QQ(1), QQ(2)]]
        bv = BranchVector.from_series(series, mode='rational')
        det = fnu_det(bv)
        self.assertEqual(det[0], 0)
        result = fnu_checks(bv, det)
        self.assertTrue(result['valid'], msg=str(result['errors']))
        self.assertIn('first_order_when_f0_vanishes', result['checks'])


class TestAlgebraicEquation(unittest.TestCase):
    def test_resubstitution(self):
        digits = 30
        eq = algebraic_equation(1, ComplexHP.of('0.9+0.2i', digits), 8, digits)
        scale = max([mpf(1)] + [abs(c) for gk in eq.g for c in gk])
        self.assertEqual(eq.nu, branch_period(1)[0])
        self.assertLess(eq.residual, scale * mpf(10) ** (12 - digits))
        # the truncation grows with the valuation of det F
        self.assertEqual(eq.valid_order, 7)
        self.assertEqual(eq.source.order, 8 + 2 * eq.valuation)

    def test_short_supplied_branch_vector(self):
        digits = 30
        short = branch_series(1, ComplexHP.of('0.9+0.2i', digits), 4, strict=False, digits=digits)
        with self.assertRaises(SingularTruncationError):
            algebraic_equation(1, '0.9+0.2i', 4, digits, bv=short)

    def test_e3_residual_vanishes(self):
        bv = branch_series(0, sympy.Rational(2, 3), 8)
        self.assertEqual(bv.mode, 'rational')
        result = ep_residual(0, bv)
        self.assertTrue(result['valid'], msg=str(result['components']))

    def test_wrong_label(self):
        bv = branch_series(0, sympy.Rational(2, 3), 4)
        with self.assertRaises(ValidationError):
            ep_residual(1, bv)


class TestVandermonde(unittest.TestCase):
    def test_odd_determinant(self):
        for p in (3, 5, 7):
            self.assertTrue(vandermonde_det(p, 30)['agree'], msg=f'p={p}')

    def test_reconstruct(self):
        with mpmath.workdps(30):
            parts = [mpc(1, 2), mpc(-0.5, 0), mpc(0.25, -1)]
            eps = mpmath.expj(2 * mpmath.pi / 3)
            values = [mpmath.fsum(eps ** (k * q) * parts[q] for q in range(3)) for k in range(3)]
            back = vandermonde_reconstruct(3, values, 30)
            for got, want in zip(back, parts):
                self.assertLess(abs(got - want), mpf(10) ** -25)


if __name__ == '__main__':
    unittest.main()
