"""
Tests of the finite particle system solver
"""
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from cbp.exceptions import ConvergenceError, InterfaceError
from cbp.model import InitialConfig, PathBundle, SystemParams, TimeGrid, sample_brownian
from cbp.solver import (
    ParticleSolution, ResidualReport, Tolerances, mirror_solution, skorokhod_regulator, solve, solve_finite,
    solve_p0, solve_p1, solve_packed, verify_solution)
from cbp.test_helpers import linear_paths, two_chain_system


class TestSkorokhodRegulator(unittest.TestCase):
    def test_regulator(self):
        y = np.array([0.0, 1.0, -0.5, 0.2, -1.0, 3.0])
        assert_allclose(skorokhod_regulator(y), [0.0, 0.0, 0.5, 0.5, 1.0, 1.0])
        self.assertTrue(np.all(y + skorokhod_regulator(y) >= 0))


class TestSmallSystems(unittest.TestCase):
    def test_single_particle(self):
        grid = TimeGrid.uniform(1.0, 8)
        bundle = sample_brownian(grid, 1, seed=4)
        sol = solve_finite(bundle, InitialConfig.from_values([2.0]), SystemParams(p=0.3, drifts=(1.5,)), 1)
        assert_allclose(sol.X[0], 2.0 + bundle.values[0] + 1.5 * grid.times)
        self.assertEqual(sol.L.shape, (0, 9))

    def test_two_particles_pushing(self):
        """The lower particle runs into the upper one, which is pushed up by p and the lower one down by q"""
        grid = TimeGrid.uniform(1.0, 4)
        V = linear_paths(grid, [1.0, 0.0])
        for p in (0.0, 0.25, 0.5, 0.75, 1.0):
            sol = solve_finite(V, InitialConfig.packed(), SystemParams(p=p), 2)
            assert_allclose(sol.local_time(1), grid.times, atol=1e-12)
            assert_allclose(sol.X[0], p * grid.times, atol=1e-12)
            assert_allclose(sol.X[1], p * grid.times, atol=1e-12)

    def test_two_particles_collapse(self):
        grid = TimeGrid.uniform(1.0, 8)
        V = linear_paths(grid, [1.0, -1.0])
        for p in (0.0, 0.3, 0.5, 0.7):
            sol = solve(V, InitialConfig.packed(), SystemParams(p=p), 2)
            assert_allclose(sol.X[0], (2 * p - 1) * grid.times, atol=1e-9)
            assert_allclose(sol.X[1], (2 * p - 1) * grid.times, atol=1e-9)
            assert_allclose(sol.local_time(1), 2 * grid.times, atol=1e-9)

    def test_separated_particles_do_not_interact(self):
        grid = TimeGrid.uniform(1.0, 16)
        V = sample_brownian(grid, 3, seed=1)
        sol = solve_finite(V, InitialConfig.from_values([-100.0, 0.0, 100.0]), SystemParams(p=0.5), 3)
        assert_array_equal(sol.L, 0.0)

    def test_two_chain_positions(self):
        V, x0, params = two_chain_system()
        sol = solve_finite(V, x0, params, 4)
        # the pair (2,3) moves together with speed -1/2 after t = 0.25
        assert_allclose(sol.X[1, 3], -0.025, atol=1e-12)
        assert_allclose(sol.X[2, 3], -0.025, atol=1e-12)
        assert_allclose(sol.X[0, 4], -0.2, atol=1e-12)
        assert_array_equal(sol.local_time(3), 0.0)
        self.assertGreater(sol.local_time(1)[5], 0.0)
        self.assertEqual(sol.local_time(1)[4], 0.0)

    def test_input_errors(self):
        V = sample_brownian(TimeGrid.uniform(1.0, 4), 2, seed=0)
        with self.assertRaises(InterfaceError):
            solve_finite(V, InitialConfig.packed(), SystemParams(p=0.5), 0)
        with self.assertRaises(InterfaceError):
            solve_finite(V, InitialConfig.packed(), SystemParams(p=0.5), 3)


class TestRandomSystems(unittest.TestCase):
    def setUp(self):
        self.grid = TimeGrid.uniform(1.0, 128)
        self.V = sample_brownian(self.grid, 8, seed=2024)

    def test_residuals(self):
        for p in (0.1, 0.5, 0.9):
            sol = solve_finite(self.V, InitialConfig.packed(), SystemParams(p=p), 8)
            report = sol.diagnostics
            self.assertTrue(report.converged)
            self.assertLessEqual(report.max_order_violation, 1e-9)
            self.assertLessEqual(report.max_identity_residual, 1e-9)
            self.assertLessEqual(report.max_monotonicity_violation, 1e-9)
            self.assertGreater(report.picard_iters, 0)

    def test_p0_closed_form_matches_iteration(self):
        x0 = InitialConfig.spread(0.2)
        iterated = solve_finite(self.V, x0, SystemParams(p=0.0), 8)
        closed = solve_p0(self.V, x0, 8)
        assert_allclose(iterated.X, closed.X, atol=1e-10)
        assert_allclose(iterated.L, closed.L, atol=1e-10)

    def test_p1_mirror_matches_iteration(self):
        x0 = InitialConfig.spread(0.2)
        params = SystemParams(p=1.0, drifts=(0.5, -0.5))
        iterated = solve_finite(self.V, x0, params, 8)
        closed = solve_p1(self.V, x0, 8, params)
        assert_allclose(iterated.X, closed.X, atol=1e-10)
        assert_allclose(iterated.L, closed.L, atol=1e-10)

    def test_mirror_symmetry(self):
        sol = solve_finite(self.V, InitialConfig.packed(), SystemParams(p=0.3), 8)
        image = solve_finite(self.V.mirrored(), InitialConfig.packed(), SystemParams(p=0.7), 8)
        assert_allclose(mirror_solution(sol).X, image.X, atol=1e-9)

    def test_truncation_is_monotone(self):
        x0 = InitialConfig.power(0.5, 1.0)
        params = SystemParams(p=0.4)
        big = solve(self.V, x0, params, 8)
        for M in range(1, 8):
            small = solve(self.V, x0, params, M)
            self.assertLessEqual(float(np.max(big.X[:M] - small.X)), 1e-9)

    def test_packed_bracket(self):
        x0 = InitialConfig.from_values([-0.5, 0.0, 0.1, 0.3, 0.3, 0.8, 1.0, 1.2])
        params = SystemParams(p=0.6)
        sol = solve(self.V, x0, params, 8)
        packed = solve_packed(self.V, params, 8)
        self.assertTrue(np.all(-0.5 + packed.X <= sol.X + 1e-9))
        self.assertTrue(np.all(sol.X <= 1.2 + packed.X + 1e-9))

    def test_dispatch(self):
        for p in (0.0, 0.5, 1.0):
            sol = solve(self.V, InitialConfig.packed(), SystemParams(p=p), 4)
            self.assertEqual(sol.params.p, p)
            self.assertTrue(sol.diagnostics.converged)

    def test_non_convergence(self):
        with self.assertRaises(ConvergenceError) as cm:
            solve_finite(self.V, InitialConfig.packed(), SystemParams(p=0.5), 8, max_iter=1)
        self.assertIsInstance(cm.exception.report, ResidualReport)
        self.assertFalse(cm.exception.report.converged)


class TestVerifySolution(unittest.TestCase):
    def test_detects_broken_solution(self):
        grid = TimeGrid.uniform(1.0, 4)
        V = linear_paths(grid, [1.0, 0.0])
        good = solve_finite(V, InitialConfig.packed(), SystemParams(p=0.5), 2)
        broken = ParticleSolution(grid, good.X, np.zeros_like(good.L), good.params, good.x0, good.driving)
        report = verify_solution(broken, Tolerances())
        self.assertFalse(report.converged)
        self.assertGreater(report.max_identity_residual, 0.1)

    def test_order_violation(self):
        grid = TimeGrid.uniform(1.0, 2)
        V = PathBundle.deterministic(grid, [[0.0, 1.0, 2.0], [0.0, 0.0, 0.0]])
        free = ParticleSolution(grid, np.zeros((2, 3)) + V.values, np.zeros((1, 3)), SystemParams(p=0.5),
                                np.zeros(2), V)
        report = verify_solution(free)
        self.assertAlmostEqual(report.max_order_violation, 2.0)
