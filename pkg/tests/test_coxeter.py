"""
Unit tests for the reflection group on the contracted monodromy cubic.
"""
import unittest

import mpmath
from mpmath import mpc, mpf
import numpy as np
import sympy

from modules.coxeter import (
    S, Point4, QuotientField, apply_generator, apply_word, closed_form_orbit, epsilon_point,
    from_monodromy, group_order, orbit, orbit_length_from_s, parametrize_cubic, parse_word, qk_tower,
    r3_regularized, relation_checks, seven_lines, tower_checks,
)
from modules.exceptions import (
    BoundaryError, UndefinedGeneratorError, ValidationError, WrongParameterError,
)
from modules.monodromy import from_H0
from modules.specfun import ComplexHP


class TestQuotientField(unittest.TestCase):
    def test_arithmetic(self):
        field = QuotientField(sympy.Poly(S ** 2 - 2, S))
        root = field.generator()
        self.assertEqual(root * root, field(2))
        self.assertEqual((1 + root) / (1 + root), field(1))
        self.assertEqual(1 / root, root / 2)

    def test_reducible_modulus(self):
        with self.assertRaises(ValidationError):
            QuotientField(sympy.Poly(S ** 2 - 1, S))


class TestGenerators(unittest.TestCase):
    def test_involutions_exact(self):
        field = QuotientField.rational(sympy.Rational(1, 3))
        p = parametrize_cubic(sympy.Rational(-2, 7), field.generator())
        self.assertTrue(p.on_manifold()['valid'])
        for gen in ('r1', 'r2', 'r3'):
            q = apply_generator(gen, p)
            self.assertTrue(q.on_manifold()['valid'], msg=gen)
            self.assertTrue(apply_generator(gen, q).same_as(p), msg=gen)

    def test_relations_numeric(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            p = parametrize_cubic(ComplexHP(mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)), 30),
                                  ComplexHP(mpc(rng.uniform(-0.9, 2.9)), 30), 30)
            result = relation_checks(p)
            self.assertTrue(result['valid'], msg=str(result['errors']))

    def test_words(self):
        self.assertEqual(parse_word('r1r2'), ['r1', 'r2'])
        self.assertEqual(parse_word(['r3', 'r1']), ['r3', 'r1'])
        with self.assertRaises(UndefinedGeneratorError):
            parse_word('r1r4')
        with self.assertRaises(ValidationError):
            parse_word('')

    def test_word_order(self):
        """The rightmost letter acts first."""
        p = parametrize_cubic('0.4+0.1i', '0.5', 30)
        self.assertTrue(apply_word('r1r2', p).same_as(apply_generator('r1', apply_generator('r2', p))))

    def test_r3_regularization(self):
        limit = r3_regularized('1', 30)
        for name, want in zip(('x', 'y', 'z', 's'), (0, 1, 1, 1)):
            self.assertLess(abs(getattr(limit, name).value - want), mpf(10) ** -25, msg=name)
        near = apply_generator('r3', epsilon_point('1', '1e-12', 50))
        self.assertTrue(near.same_as(limit, mpf('1e-4')))
        with self.assertRaises(UndefinedGeneratorError):
            r3_regularized('-1', 30)
        with self.assertRaises(UndefinedGeneratorError):
            apply_generator('r3', Point4.numeric('0.5', '1', '-1', '0.5', 30))

    def test_monodromy_points_lie_on_cubic(self):
        p = from_monodromy(from_H0('0.7+1.3i', 30))
        self.assertTrue(p.on_manifold()['valid'])


class TestOrbits(unittest.TestCase):
    def test_exact_lengths(self):
        for s0, expected in ((0, 3), (1, 4)):
            field = QuotientField.rational(s0)
            p = parametrize_cubic(sympy.Rational(2, 5), field.generator())
            result = orbit(p, 'r1r2', 20)
            self.assertTrue(result.finite)
            self.assertEqual(result.length, expected)
            self.assertEqual(result.verdict, f'finite({expected})')

    def test_golden_ratio_orbit(self):
        field = QuotientField(sympy.Poly(S ** 2 - S - 1, S))
        p = parametrize_cubic(sympy.Rational(3, 4), field.generator())
        self.assertEqual(orbit(p, 'r1r2', 20).length, 5)

    def test_boundary_orbits_undecided(self):
        field = QuotientField.rational(3)
        p = parametrize_cubic(sympy.Rational(3, 7), field.generator())
        result = orbit(p, 'r1r2', 15)
        self.assertFalse(result.finite)
        self.assertEqual(result.verdict, 'undecided(15)')

    def test_closed_forms(self):
        for s0 in (-1, 3):
            field = QuotientField.rational(s0)
            p0 = parametrize_cubic(sympy.Rational(3, 7), field.generator())
            current = p0
            for n in range(12):
                self.assertTrue(current.same_as(closed_form_orbit(s0, p0, n)), msg=f's={s0}, n={n}')
                current = apply_word('r1r2', current)
        with self.assertRaises(WrongParameterError):
            closed_form_orbit(0, p0, 1)

    def test_off_manifold_start(self):
        with self.assertRaises(ValidationError):
            orbit(Point4.numeric(1, 1, 1, 0, 20))


class TestPredictors(unittest.TestCase):
    def test_orbit_lengths(self):
        self.assertEqual(orbit_length_from_s(0, digits=30)['length'], 3)
        self.assertEqual(orbit_length_from_s(1, digits=30)['length'], 4)
        with mpmath.workdps(40):
            golden = (1 + mpmath.sqrt(5)) / 2
        self.assertEqual(orbit_length_from_s(ComplexHP(mpc(golden), 30), digits=30)['length'], 5)
        self.assertEqual(orbit_length_from_s(-1, digits=30)['verdict'], 'infinite')
        with self.assertRaises(WrongParameterError):
            orbit_length_from_s(4, digits=30)

    def test_group_order(self):
        self.assertEqual(group_order(1, digits=30)['order'], 16)
        self.assertEqual(group_order(0, digits=30)['order'], 24)
        with self.assertRaises(BoundaryError):
            group_order(3, digits=30)


class TestTower(unittest.TestCase):
    def test_first_polynomials(self):
        tower = qk_tower(12)
        self.assertEqual(tower[1].as_expr(), S - 3)
        self.assertEqual(tower[2].as_expr(), S + 1)
        self.assertEqual(tower[3].as_expr(), S)
        self.assertEqual(tower[4].as_expr(), S - 1)
        self.assertEqual(tower[5].as_expr(), S ** 2 - S - 1)
        self.assertEqual(tower.K, 12)

    def test_identities(self):
        checks = tower_checks(qk_tower(20))
        self.assertTrue(checks['valid'], msg=str(checks['errors']))

    def test_small_K(self):
        with self.assertRaises(ValidationError):
            qk_tower(1)


class TestSevenLines(unittest.TestCase):
    def test_lines_on_cubic(self):
        lines = seven_lines()
        self.assertEqual(len(lines), 7)
        self.assertTrue(all(line['valid'] for line in lines))


if __name__ == '__main__':
    unittest.main()
