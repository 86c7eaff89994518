"""
Tests of collision chains and the decoupling of the lowest particles
"""
import unittest
import warnings

import numpy as np

from cbp.chains import GAP_EPS, LOCAL_TIME_INC, collision_hits, compare_rules, k_star, verify_decoupling
from cbp.exceptions import InterfaceError, SimulationWarning
from cbp.model import InitialConfig, SystemParams, TimeGrid, sample_brownian
from cbp.solver import solve
from cbp.test_helpers import brute_k_star, linear_paths, two_chain_system


class TestTwoChain(unittest.TestCase):
    def setUp(self):
        V, x0, params = two_chain_system()
        self.sol = solve(V, x0, params, 4)

    def test_hits(self):
        hits = collision_hits(self.sol)
        self.assertEqual(list(np.flatnonzero(hits[1]))[0], 3)
        self.assertEqual(list(np.flatnonzero(hits[0]))[0], 5)
        self.assertFalse(np.any(hits[2]))

    def test_k_star(self):
        report = k_star(self.sol, 1, (0.0, 1.0))
        self.assertEqual(report.k_star, 2)
        np.testing.assert_allclose(report.chain_times, (0.3, 0.5))
        self.assertFalse(report.censored)
        self.assertEqual(report.detection_rule, LOCAL_TIME_INC)

    def test_short_window(self):
        self.assertEqual(k_star(self.sol, 1, (0.0, 0.4)).k_star, 0)
        self.assertEqual(k_star(self.sol, 2, (0.0, 0.4)).k_star, 1)

    def test_gap_rule_agrees(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error', SimulationWarning)
            by_local_time, by_gap = compare_rules(self.sol, 1, (0.0, 1.0), eps=1e-9)
        self.assertEqual(by_local_time.k_star, by_gap.k_star)
        self.assertEqual(by_gap.detection_rule, GAP_EPS)

    def test_decoupling(self):
        report = verify_decoupling(self.sol, 1)
        self.assertEqual(report.k_star, 2)
        self.assertTrue(report.matched)
        self.assertFalse(report.inconclusive)
        self.assertLessEqual(report.max_deviation, 1e-9)

    def test_invalid(self):
        with self.assertRaises(InterfaceError):
            k_star(self.sol, 5)
        with self.assertRaises(InterfaceError):
            collision_hits(self.sol, GAP_EPS, 0.0)
        with self.assertRaises(InterfaceError):
            collision_hits(self.sol, 'other')


class TestRandomChains(unittest.TestCase):
    def setUp(self):
        grid = TimeGrid.uniform(1.0, 12)
        self.V = sample_brownian(grid, 6, seed=77)

    def test_greedy_equals_enumeration(self):
        for p in (0.2, 0.5, 0.8):
            sol = solve(self.V, InitialConfig.spread(0.3), SystemParams(p=p), 6)
            for i in (1, 2, 3):
                for lo, hi in ((0, 12), (3, 9)):
                    window = (float(sol.grid.times[lo]), float(sol.grid.times[hi]))
                    report = k_star(sol, i, window)
                    if not report.censored:
                        self.assertEqual(report.k_star, brute_k_star(sol, i, lo, hi))

    def test_censored_when_packed(self):
        sol = solve(linear_paths(self.V.grid, [1.0, 0.0, -1.0]), InitialConfig.packed(), SystemParams(p=0.5), 3)
        report = k_star(sol, 1)
        self.assertTrue(report.censored)
        self.assertEqual(report.k_star, 2)
        decoupling = verify_decoupling(sol, 1)
        self.assertTrue(decoupling.inconclusive)
        self.assertIsNone(decoupling.matched)

    def test_k_star_grows_with_the_window(self):
        nested = ((4, 8), (3, 8), (3, 10), (0, 12))
        for p in (0.2, 0.5, 0.8):
            sol = solve(self.V, InitialConfig.spread(0.3), SystemParams(p=p), 6)
            times = sol.grid.times
            for i in (1, 2, 3):
                values = [k_star(sol, i, (float(times[lo]), float(times[hi]))).k_star for lo, hi in nested]
                self.assertEqual(values, sorted(values))

    def test_decoupling_on_wide_spacing(self):
        """With gaps of 2.5 no chain reaches the top pair, so every comparison is conclusive"""
        for seed in range(5):
            V = sample_brownian(TimeGrid.uniform(1.0, 64), 6, seed=seed)
            sol = solve(V, InitialConfig.spread(2.5), SystemParams(p=0.5), 6)
            for i in (1, 2):
                report = verify_decoupling(sol, i)
                self.assertFalse(report.inconclusive)
                self.assertTrue(report.matched)
