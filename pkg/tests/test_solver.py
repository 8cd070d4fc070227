import unittest

import numpy as np

from wavelab.fields import Lattice, make_profile
from wavelab.linear_part import LinearPartSpec
from wavelab.norms import Exponents
from wavelab.solver import (
    GridCheck, LifespanResult, NonlinearitySpec, SolveConfig, fit_scaling,
    lifespan_sweep, march, picard, plateau_growth, solve
)


def bump_spec(n=3):
    return LinearPartSpec(make_profile("smooth_bump", 1.0),
                          make_profile("smooth_bump", 1.0), n)


def result(eps, T_hat, history=None):
    return LifespanResult(eps, T_hat, T_hat is not None, 1.0, 10, 0.1, 0.1,
                          10.0, norm_history=history)


class TestNonlinearity(unittest.TestCase):
    def test_forms(self):
        s = np.array([-2.0, 0.5])
        np.testing.assert_allclose(NonlinearitySpec(3).F(s), [8.0, 0.125])
        np.testing.assert_allclose(
            NonlinearitySpec(3, "signed_power").F(s), [-8.0, 0.125])
        np.testing.assert_allclose(
            NonlinearitySpec(2, "square", A=2.0).F(s), [8.0, 0.5])

    def test_derivatives(self):
        s = np.array([-2.0, 0.5])
        np.testing.assert_allclose(NonlinearitySpec(3).dF(s), [-12.0, 0.75])
        np.testing.assert_allclose(
            NonlinearitySpec(3, "signed_power").dF(s), [12.0, 0.75])
        np.testing.assert_allclose(
            NonlinearitySpec(2, "square").dF(s), [-4.0, 1.0])

    def test_validation(self):
        with self.assertRaises(ValueError):
            NonlinearitySpec(1.0)
        with self.assertRaises(ValueError):
            NonlinearitySpec(2, "cubic")
        with self.assertRaises(ValueError):
            NonlinearitySpec(3, "square")
        with self.assertRaises(ValueError):
            NonlinearitySpec(2, A=-1.0)


class TestSolveConfig(unittest.TestCase):
    def test_validation(self):
        lattice = Lattice(0.1, 0.1, 3.0, 1.0)
        with self.assertRaises(ValueError):
            SolveConfig(-1.0, lattice)
        with self.assertRaises(ValueError):
            SolveConfig(0.1, lattice, blowup_cap=0.0)
        with self.assertRaises(ValueError):
            SolveConfig(0.1, lattice, mode="newton")

    def test_with_options(self):
        cfg = SolveConfig(0.1, Lattice(0.1, 0.1, 3.0, 1.0), blowup_cap=10.0)
        other = cfg.with_options(epsilon=0.2)
        self.assertEqual(other.epsilon, 0.2)
        self.assertEqual(other.blowup_cap, 10.0)
        self.assertEqual(cfg.epsilon, 0.1)


class TestMarch(unittest.TestCase):
    def setUp(self):
        self.spec = bump_spec(3)
        self.nl = NonlinearitySpec(2)

    def test_zero_data_stays_zero(self):
        lattice = Lattice.covering(0.2, 1.0, 1.0)
        u, res = march(self.spec, self.nl, SolveConfig(0.0, lattice))
        self.assertTrue(u.complete)
        self.assertEqual(float(np.max(np.abs(u.values))), 0.0)
        self.assertFalse(res.blew_up)
        self.assertIsNone(res.T_hat)
        self.assertEqual(res.row()[1], "survived")

    def test_large_data_blows_up(self):
        lattice = Lattice.covering(0.1, 3.0, 1.0)
        cfg = SolveConfig(20.0, lattice, blowup_cap=100.0, cap_probe=True)
        u, res = march(self.spec, self.nl, cfg)
        self.assertTrue(res.blew_up)
        self.assertLess(res.T_hat, 3.0)
        self.assertLess(res.slices_completed, lattice.nt)
        self.assertEqual(u.filled_up_to, res.slices_completed - 1)
        self.assertLessEqual(res.T_low, res.T_hat)
        if res.T_high is not None:
            self.assertLessEqual(res.T_hat, res.T_high)

    def test_cap_is_on_pointwise_values(self):
        lattice = Lattice.covering(0.1, 3.0, 1.0)
        cfg = SolveConfig(20.0, lattice, blowup_cap=100.0)
        u, res = march(self.spec, self.nl, cfg)
        self.assertTrue(res.blew_up)
        filled = u.values[:, :u.filled_up_to + 1]
        self.assertLessEqual(float(np.max(np.abs(filled))), 100.0)
        last = lattice.t[u.filled_up_to]
        self.assertGreaterEqual(res.T_hat, last)
        self.assertLessEqual(res.T_hat, last + lattice.dt + 1e-12)

    def test_march_is_the_discrete_fixed_point(self):
        lattice = Lattice.covering(0.25, 1.0, 1.0)
        cfg = SolveConfig(0.05, lattice, picard_tol=1e-13,
                          picard_max_iters=20)
        marched, _ = march(self.spec, self.nl, cfg)
        fixed, iterations = picard(self.spec, self.nl, cfg)
        self.assertLessEqual(iterations, 20)
        np.testing.assert_allclose(fixed.values, marched.values,
                                   rtol=1e-9, atol=1e-12)

    def test_solve_picard_mode(self):
        lattice = Lattice.covering(0.25, 1.0, 1.0)
        cfg = SolveConfig(0.05, lattice, mode="picard", picard_tol=1e-12)
        u, res = solve(self.spec, self.nl, cfg)
        self.assertTrue(u.complete)
        self.assertFalse(res.blew_up)
        self.assertGreater(res.max_weighted_norm, 0.0)


class TestLifespan(unittest.TestCase):
    def test_sweep_validation(self):
        spec = bump_spec(3)
        cfg = SolveConfig(0.1, Lattice.covering(0.2, 1.0, 1.0))
        with self.assertRaises(ValueError):
            lifespan_sweep(spec, NonlinearitySpec(2), [], cfg)
        with self.assertRaises(ValueError):
            lifespan_sweep(spec, NonlinearitySpec(2), [0.1, 0.5], cfg)

    def test_fit_subcritical(self):
        eps = [0.8, 0.6, 0.45, 0.34, 0.25]
        results = [result(e, 3.0 * e ** -2) for e in eps]
        report = fit_scaling(results, Exponents(3, 2))
        self.assertAlmostEqual(report.slope, -2.0, places=10)
        self.assertAlmostEqual(report.predicted_slope, -2.0, places=12)
        self.assertTrue(report.passed())
        self.assertEqual(report.as_dict()["points"], 5)

    def test_fit_critical(self):
        eps = [0.8, 0.6, 0.45, 0.34]
        results = [result(e, np.exp(0.5 * e ** -2)) for e in eps]
        report = fit_scaling(results, Exponents(3, 2), law="critical")
        self.assertAlmostEqual(report.slope, 0.5, places=10)
        self.assertTrue(report.passed())

    def test_fit_needs_blowups(self):
        results = [result(0.5, 10.0), result(0.4, None), result(0.3, 30.0)]
        with self.assertRaises(ValueError):
            fit_scaling(results, Exponents(3, 2))

    def test_fit_unknown_law(self):
        results = [result(e, 1.0 / e) for e in (0.8, 0.6, 0.4, 0.2)]
        with self.assertRaises(ValueError):
            fit_scaling(results, Exponents(3, 2), law="exponential")

    def test_plateau(self):
        flat = result(0.1, None, [1.0, 2.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0])
        self.assertEqual(plateau_growth(flat), 0.0)
        growing = result(0.1, None, [1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(plateau_growth(growing), 1.0 / 3.0)
        with self.assertRaises(ValueError):
            plateau_growth(result(0.1, None, [1.0]))

    def test_grid_check(self):
        self.assertTrue(GridCheck(result(0.5, 10.0), result(0.5, 10.5),
                                  0.1).passed)
        self.assertFalse(GridCheck(result(0.5, 10.0), result(0.5, 20.0),
                                   0.1).passed)
        self.assertFalse(GridCheck(result(0.5, None), result(0.5, 20.0),
                                   0.1).passed)
        self.assertTrue(GridCheck(result(0.5, None), result(0.5, None),
                                  0.1).passed)


if __name__ == "__main__":
    unittest.main()
