"""
Unit tests for the Cash-Karp integrator, charts and residual checks.
"""
import unittest

import mpmath
from mpmath import mpc, mpf

from modules.exceptions import ChartDomainError, ValidationError, ZeroA0Error
from modules.odeint import (
    CSV_HEADER, SolveConfig, Trajectory, chart_inverse, chart_point, integrate, residual_check,
    transform,
)
from modules.specfun import ComplexHP


class TestSolveConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = SolveConfig(digits=30)
        rel, abs_ = cfg.tolerances()
        self.assertEqual(rel, 1e-12)
        self.assertEqual(abs_, 1e-14)
        self.assertLess(cfg.r1_value(), 0)

    def test_invalid_settings(self):
        bad = [
            {'digits': 5},
            {'r1': '1e-8'},
            {'sample_count': 1},
            {'max_step': 0},
            {'digits': 20, 'rel_tol': 1e-16},
        ]
        for kwargs in bad:
            with self.assertRaises(ValidationError, msg=str(kwargs)):
                SolveConfig(**kwargs)

    def test_json_round_trip(self):
        cfg = SolveConfig(digits=25, sample_count=40, rel_tol=1e-10)
        self.assertEqual(SolveConfig.from_json(cfg.to_json()), SolveConfig(digits=25, sample_count=40,
                                                                             rel_tol=1e-10, abs_tol=1e-14))


class TestIntegration(unittest.TestCase):
    def test_constant_solutions(self):
        """H = 1 and H = exp(2 pi i/3) are fixed points of the equation."""
        with mpmath.workdps(25):
            for H0 in (mpc(1), mpmath.expjpi(mpf(2) / 3)):
                traj = integrate(ComplexHP(H0, 20), '-5', SolveConfig(digits=20, sample_count=21))
                rel, _ = traj.config.tolerances()
                drift = max(abs(p.H.value - H0) for p in traj.samples)
                self.assertLess(drift, 10 * rel)

    def test_grid_and_residual(self):
        traj = integrate(ComplexHP.of('-1/30-1i', 20), '-2', SolveConfig(digits=20, sample_count=201))
        self.assertEqual(len(traj), 201)
        r = traj.r_values()
        self.assertTrue(all(a > b for a, b in zip(r, r[1:])))
        self.assertEqual(traj.endpoint().r, mpf(-2))
        self.assertGreater(traj.stats['accepted_steps'], 0)
        report = residual_check(traj)
        self.assertLess(report.max_residual, mpf('1e-3'))

    def test_rows_round_trip(self):
        traj = integrate(ComplexHP.of('0.5+0.5i', 20), '-1', SolveConfig(digits=20, sample_count=11))
        rows = traj.rows()
        self.assertEqual(len(rows[0]), len(CSV_HEADER))
        back = Trajectory.from_rows(rows, traj.metadata())
        self.assertEqual(back.config.tolerances(), traj.config.tolerances())
        self.assertEqual(back.config.sample_count, 11)
        with mpmath.workdps(25):
            for p, q in zip(traj.samples, back.samples):
                self.assertLess(abs(p.H.value - q.H.value), mpf(10) ** -18)
                self.assertLess(abs(p.I.value - q.I.value), mpf(10) ** -18)

    def test_invalid_requests(self):
        with self.assertRaises(ValidationError):
            integrate(ComplexHP.of('1', 20), '-1e-9', SolveConfig(digits=20))
        with self.assertRaises(ZeroA0Error):
            integrate(ComplexHP.of('0', 20), '-1', SolveConfig(digits=20))
        with self.assertRaises(ValidationError):
            residual_check(integrate(ComplexHP.of('1', 20), '-1', SolveConfig(digits=20, sample_count=2)))


class TestCharts(unittest.TestCase):
    def test_u_chart_inverts(self):
        H = ComplexHP.of('0.5+1i', 30)
        tau, u = chart_point('to_u', '-2', H)
        r, back = chart_inverse('to_u', tau, u)
        with mpmath.workdps(30):
            self.assertLess(abs(r + 2), mpf(10) ** -25)
            self.assertLess(abs(back.value - H.value), mpf(10) ** -25)

    def test_y_chart_inverts(self):
        H = ComplexHP.of('-0.3+0.2i', 30)
        t, y = chart_point('to_y', '3', H)
        r, back = chart_inverse('to_y', t, y)
        with mpmath.workdps(30):
            self.assertLess(abs(r - 3), mpf(10) ** -25)
            self.assertLess(abs(back.value - H.value), mpf(10) ** -25)

    def test_domains(self):
        H = ComplexHP.of('1', 20)
        with self.assertRaises(ChartDomainError):
            chart_point('to_u', '1', H)
        with self.assertRaises(ChartDomainError):
            chart_point('to_y', '-1', H)
        with self.assertRaises(ChartDomainError):
            chart_inverse('to_u', '0', H)
        with self.assertRaises(ValidationError):
            chart_point('to_w', '-1', H)

    def test_transform_trajectory(self):
        traj = integrate(ComplexHP.of('1', 20), '-1', SolveConfig(digits=20, sample_count=5))
        charted = transform('to_u', traj)
        self.assertEqual(len(charted), 5)
        with self.assertRaises(ChartDomainError):
            transform('to_y', traj)
        with self.assertRaises(ValidationError):
            transform('to_z', traj)


if __name__ == '__main__':
    unittest.main()
