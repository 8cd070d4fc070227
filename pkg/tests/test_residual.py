import math
import unittest

import numpy as np

from wavelab.duhamel import DuhamelSpec
from wavelab.fields import Lattice, SpaceTimeField, make_profile
from wavelab.linear_part import LinearPartSpec
from wavelab.residual import (
    ResidualReport, assemble_H, check_initial_conditions,
    coefficient_checks, expected_coefficients, loss_prefactor,
    manufactured_fields, manufactured_study, pde_residual, residual_mask,
    solution_residual, solution_study
)
from wavelab.solver import NonlinearitySpec, SolveConfig
from wavelab.sphmeans import QuadratureSpec


def bump_spec(n):
    return LinearPartSpec(make_profile("smooth_bump", 1.0),
                          make_profile("smooth_bump", 1.0), n)


def angular_mean(integrand, r, t, nodes=200):
    """
    Mean over the 3-sphere of radius t centered at distance r, as a
    Gauss-Legendre integral in the polar angle with weight 2/pi sin^2.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (x + 1.0)
    lam = np.sqrt(r * r + t * t + 2.0 * r * t * np.cos(theta))
    values = integrand(lam, theta) * np.sin(theta) ** 2
    return float(np.sum(w * values))


def fine_quadrature():
    return QuadratureSpec(base_order=12, endpoint_split=0.5, levels=40,
                          check=False)


class TestResidualReport(unittest.TestCase):
    def test_second_order(self):
        report = ResidualReport([(0.1, 1e-2), (0.05, 2.5e-3),
                                 (0.025, 6.25e-4)])
        self.assertAlmostEqual(report.convergence_order, 2.0, places=10)
        self.assertEqual(report.linf_residual, 6.25e-4)
        self.assertTrue(report.passed())

    def test_first_order_fails(self):
        report = ResidualReport([(0.1, 1e-2), (0.05, 5e-3), (0.025, 2.5e-3)])
        self.assertFalse(report.passed())

    def test_two_levels_have_no_order(self):
        report = ResidualReport([(0.1, 1e-2), (0.05, 5e-3)])
        self.assertIsNone(report.convergence_order)

    def test_coefficients(self):
        good = ResidualReport(coefficient_checks=[("data", 1.0, 1.0)])
        bad = ResidualReport(coefficient_checks=[("data", 1.0, 1.001)])
        self.assertTrue(good.coefficients_exact())
        self.assertFalse(bad.coefficients_exact())
        self.assertFalse(bad.passed())


class TestLossTerm(unittest.TestCase):
    def test_prefactor(self):
        self.assertEqual(loss_prefactor(3), 0.0)
        self.assertEqual(loss_prefactor(4), 0.5)

    def test_vanishes_in_three_dimensions(self):
        lattice = Lattice(0.1, 0.1, 3.0, 1.0)
        F = SpaceTimeField.from_function(lattice, lambda r, t: r + t)
        self.assertEqual(assemble_H(bump_spec(3), F, F, 0.5, 0.5, 0.1), 0.0)
        np.testing.assert_array_equal(
            assemble_H(bump_spec(3), F, F, np.array([0.5, 1.0]), 0.5, 0.1),
            [0.0, 0.0])

    def test_four_dimensional_coefficients(self):
        self.assertAlmostEqual(expected_coefficients(4, 1.0)["history"],
                               1.0 / (2.0 * math.pi ** 2))
        checks = coefficient_checks(n=4, eps=0.5)
        self.assertEqual([c[0] for c in checks],
                         ["history", "initial", "data"])
        report = ResidualReport(coefficient_checks=checks)
        self.assertTrue(report.coefficients_exact(), checks)

    def test_general_dimension_coefficients(self):
        for name, want, got in coefficient_checks(n=5, eps=0.3):
            self.assertAlmostEqual(got, want, delta=1e-9 * abs(want), msg=name)

    def test_four_dimensional_loss_with_f_data(self):
        q = fine_quadrature()
        f = make_profile("smooth_bump", 1.0)
        spec = LinearPartSpec(f, make_profile("zero", 1.0), 4, q=q)
        lattice = Lattice(0.05, 0.05, 3.0, 0.4)
        F = SpaceTimeField.from_function(lattice, lambda r, t: 0.3 + 0.0 * r)
        dtF = SpaceTimeField.from_function(lattice,
                                           lambda r, t: 1.5 + 0.0 * r)
        r, t, eps = 0.3, 0.4, 0.5
        lap_mean = angular_mean(lambda lam, th: f.laplacian(lam, 4), r, t)
        expected = 0.5 * (1.5 * t + 0.3 + eps * lap_mean)
        got = assemble_H(spec, F, dtF, r, t, eps, DuhamelSpec(4, q=q))
        self.assertAlmostEqual(got, expected, delta=1e-7 * abs(expected))

    def test_four_dimensional_loss_with_g_data(self):
        q = fine_quadrature()
        g = make_profile("smooth_bump", 1.0)
        spec = LinearPartSpec(make_profile("zero", 1.0), g, 4, q=q)
        lattice = Lattice(0.05, 0.05, 3.0, 0.4)
        zero = SpaceTimeField(lattice, filled_up_to=lattice.nt - 1)
        r, t, eps = 0.3, 0.4, 0.5
        # d/dt of g(lam) with lam^2 = r^2 + t^2 + 2 r t cos(theta)
        dt_mean = angular_mean(
            lambda lam, th: g.derivative(lam, 1) * (t + r * np.cos(th)) / lam,
            r, t)
        expected = 0.5 * eps * 2.0 * dt_mean
        got = assemble_H(spec, zero, zero, r, t, eps, DuhamelSpec(4, q=q))
        self.assertAlmostEqual(got, expected, delta=1e-6 * abs(expected))


class TestPdeResidual(unittest.TestCase):
    def test_manufactured_second_order(self):
        for n in (3, 4):
            report = manufactured_study(n, dr0=0.1, levels=3)
            self.assertGreater(report.convergence_order, 1.5)
            self.assertLess(report.linf_residual, 1e-2)

    def test_mask_keeps_away_from_edges(self):
        lattice = Lattice(0.1, 0.1, 3.0, 1.0)
        mask = residual_mask(lattice, lattice.nt - 1, k=1.0)
        self.assertFalse(mask[0].any())
        self.assertFalse(mask[:, 0].any())
        self.assertFalse(mask[:, -1].any())
        self.assertTrue(mask.any())

    def test_lattices_must_match(self):
        u, F, H = manufactured_fields(4, Lattice(0.1, 0.1, 3.0, 1.0))
        _, G, _ = manufactured_fields(4, Lattice(0.1, 0.05, 3.0, 1.0))
        with self.assertRaises(ValueError):
            pde_residual(u, G, H, 4)

    def test_needs_three_slices(self):
        lattice = Lattice(0.1, 0.1, 3.0, 1.0)
        u = SpaceTimeField(lattice)
        u.set_slice(0, np.zeros(lattice.nr))
        u.set_slice(1, np.zeros(lattice.nr))
        with self.assertRaises(ValueError):
            pde_residual(u, u, u, 4)


class TestInitialConditions(unittest.TestCase):
    def test_linear_in_time(self):
        spec = bump_spec(4)
        lattice = Lattice(0.1, 0.1, 3.0, 1.0)
        u = SpaceTimeField.from_function(
            lattice, lambda r, t: 0.2 * (spec.f(r) + t * spec.g(r)))
        e0, e1 = check_initial_conditions(u, spec, 0.2)
        self.assertLess(e0, 1e-14)
        self.assertLess(e1, 1e-12)

    def test_marched_solution(self):
        spec = bump_spec(3)
        cfg = SolveConfig(0.1, Lattice.covering(0.1, 1.0, 1.0))
        linf, (e0, e1) = solution_residual(spec, NonlinearitySpec(2), cfg)
        self.assertTrue(np.isfinite(linf))
        self.assertLess(e0, 1e-10)
        self.assertLess(e1, 0.05)

    def test_marched_solution_converges(self):
        for n in (3, 4):
            cfg = SolveConfig(0.5, Lattice.covering(0.1, 1.0, 1.0))
            report = solution_study(bump_spec(n), NonlinearitySpec(2), cfg,
                                    levels=3)
            self.assertEqual(len(report.levels), 3)
            self.assertGreaterEqual(report.convergence_order, 1.5,
                                    msg=(n, report.levels))


if __name__ == "__main__":
    unittest.main()
