"""
Unit tests for the exact and numeric Taylor-coefficient machinery.
"""
import unittest

import mpmath
from mpmath import mpc, mpf
import sympy
from sympy import QQ

from modules.exceptions import TableTooShortError, ValidationError, ZeroA0Error
from modules.series import (
    A0, X, CoeffTable, LaurentRatPoly, bound_holds, cloitre, digit_sum3, epsilon_coefficient,
    evaluate_series, extract_Pn, fence_S, fence_area_direct, fence_total, g2_ode_residual,
    genfun_closed_form, genfun_coeffs, genfun_crosscheck, identity_check, kappa, nu3, padic_abs3,
    reconstruct_an, small_r_expansion, taylor_coeffs,
)
from modules.specfun import ComplexHP


class TestExactCoefficients(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.table = taylor_coeffs('exact', 16)

    def test_first_coefficients(self):
        """a_1..a_4 in closed form."""
        expected = {
            1: (A0 ** 3 + 1) / A0,
            2: -sympy.Rational(3, 4) * (A0 ** 3 + 1),
            3: (A0 ** 3 + 1) * (2 * A0 ** 3 + 1) / (4 * A0 ** 2),
            4: -(A0 ** 3 + 1) * (20 * A0 ** 3 + 17) / (64 * A0),
        }
        for n, form in expected.items():
            self.assertEqual(sympy.simplify(self.table.a[n].to_sympy(A0) - form), 0, msg=f'a_{n}')

    def test_ansatz_polynomials(self):
        self.assertEqual(extract_Pn(3, self.table).poly, sympy.Poly(2 * X + 1, X, domain=sympy.ZZ))
        self.assertEqual(extract_Pn(5, self.table).poly,
                         sympy.Poly(100 * X ** 2 + 122 * X + 25, X, domain=sympy.ZZ))
        for n in range(1, 17):
            ansatz = extract_Pn(n, self.table)
            self.assertEqual(ansatz.content, 1)
            self.assertEqual(ansatz.poly.degree(), (n - 1) // 2)
            self.assertEqual(reconstruct_an(n, ansatz.kappa, ansatz.poly), self.table.a[n])

    def test_kappa_values(self):
        self.assertEqual([kappa(n) for n in (1, 2, 3, 8)], [1, 3, 9, 3 ** (2 + 2 * 2)])

    def test_identities(self):
        for n in range(1, 17):
            self.assertTrue(identity_check('kappa', n, self.table)['valid'], msg=f'kappa n={n}')
            self.assertTrue(identity_check('Pn_minus1', n, self.table)['valid'], msg=f'P_n(-1) n={n}')
        with self.assertRaises(ValidationError):
            identity_check('odd0', 4, self.table)

    def test_generating_functions(self):
        self.assertTrue(genfun_crosscheck('g1', 14, self.table)['valid'])
        self.assertTrue(genfun_crosscheck('g2', 12, self.table)['valid'])
        with self.assertRaises(ValidationError):
            genfun_coeffs('g7', 5)

    def test_epsilon_coefficients_stay_exact(self):
        # a0^-1 = -(1 - eps)^(-1/3) = -1 - eps/3 - ...
        first = epsilon_coefficient(LaurentRatPoly({-1: 1}), 1)
        self.assertEqual(first, QQ(-1, 3))
        self.assertIsInstance(first, type(QQ(1)))
        self.assertEqual(epsilon_coefficient(LaurentRatPoly({-2: 3, 1: 1}), 2), QQ(16, 9))
        self.assertEqual(genfun_coeffs('A1', 2), [QQ(-1), QQ(1), QQ(-3, 4)])

    def test_json_round_trip(self):
        back = CoeffTable.from_json(self.table.to_json())
        self.assertEqual(back.a, self.table.a)

    def test_table_too_short(self):
        with self.assertRaises(TableTooShortError):
            self.table.require(17)


class TestNumericCoefficients(unittest.TestCase):
    def setUp(self):
        self.a0 = ComplexHP.of('0.7+0.2i', 30)
        self.table = taylor_coeffs('numeric', 20, self.a0, 30)

    def test_matches_exact_table(self):
        exact = taylor_coeffs('exact', 20)
        with mpmath.workdps(30):
            for n in (1, 5, 12, 20):
                ref = exact.value_at(n, self.a0.value, 30)
                self.assertLess(abs(self.table.a[n].value - ref), mpf(10) ** -22 * max(1, abs(ref)))

    def test_radius_bound(self):
        self.assertTrue(bound_holds(self.table)['valid'])

    def test_small_r(self):
        r = mpf('1e-6')
        H, _ = evaluate_series(self.table, r)
        approx = small_r_expansion(-self.a0.value, r, 30)
        self.assertLess(abs(H - approx.value), 10 * r ** 2 * 10)

    def test_zero_a0(self):
        with self.assertRaises(ZeroA0Error):
            taylor_coeffs('numeric', 5, 0, 20)


class TestNumberTheory(unittest.TestCase):
    def test_digit_sums(self):
        self.assertEqual(digit_sum3(5), 3)
        for n in range(1, 200):
            self.assertEqual(cloitre(n), digit_sum3(n))

    def test_fences(self):
        for l in range(5):
            self.assertEqual(fence_area_direct(l), fence_S(l))
        for L in range(6):
            self.assertEqual(fence_total(L), sum(fence_S(l) for l in range(L + 1)))

    def test_valuations(self):
        self.assertEqual(nu3(54), 3)
        self.assertEqual(padic_abs3(QQ(9, 2)), QQ(1, 9))
        self.assertEqual(padic_abs3('2/27'), QQ(27))


class TestClosedForms(unittest.TestCase):
    def test_g1_bessel_form(self):
        coeffs = genfun_coeffs('g1', 60)
        r = mpf('0.3')
        with mpmath.workdps(30):
            series_value = mpmath.fsum(mpf(int(c.numerator)) / int(c.denominator) * r ** n
                                       for n, c in enumerate(coeffs))
            closed = genfun_closed_form('g1', ComplexHP(mpc(r), 30)).value
            self.assertLess(abs(series_value - closed), mpf(10) ** -25)

    def test_g2_differential_equation(self):
        self.assertLess(g2_ode_residual(ComplexHP(mpc('0.2'), 30), 60), mpf(10) ** -20)


if __name__ == '__main__':
    unittest.main()
