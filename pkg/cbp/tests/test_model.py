"""
Tests of the model types that do not need the solver
"""
import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from cbp.exceptions import DataError, InterfaceError
from cbp.model import (
    RAW, InitialConfig, PathBundle, SystemParams, TimeGrid, drift_apply, replica_seed, sample_brownian,
    translate_path)


class TestSystemParams(unittest.TestCase):
    def test_derived_ratios(self):
        params = SystemParams(p=0.25)
        self.assertEqual(params.q, 0.75)
        self.assertAlmostEqual(params.r, 1 / 3)
        self.assertAlmostEqual(params.sigma, 3.0)
        self.assertIsNone(SystemParams(p=1.0).r)
        self.assertIsNone(SystemParams(p=0.0).sigma)

    def test_invalid_p(self):
        for p in (-0.1, 1.5, math.nan):
            with self.assertRaises(InterfaceError):
                SystemParams(p=p)

    def test_drifts(self):
        params = SystemParams(p=0.5, drifts=(1.0, -2.0), drift_tail=0.5)
        assert_array_equal(params.drift_vector(4), [1.0, -2.0, 0.5, 0.5])
        self.assertEqual(params.drift_sup, 2.0)
        self.assertEqual(params.drift_square_sum, math.inf)
        self.assertEqual(SystemParams(p=0.5, drifts=(1.0, -2.0)).drift_square_sum, 5.0)
        with self.assertRaises(InterfaceError):
            params.drift(0)


class TestTimeGrid(unittest.TestCase):
    def test_uniform(self):
        grid = TimeGrid.uniform(2.0, 4)
        assert_allclose(grid.times, [0.0, 0.5, 1.0, 1.5, 2.0])
        self.assertEqual(grid.n_steps, 4)
        self.assertEqual(grid.horizon, 2.0)
        self.assertEqual(grid.index_of(1.5), 3)

    def test_index_of_refuses_other_times(self):
        with self.assertRaises(InterfaceError):
            TimeGrid.uniform(1.0, 4).index_of(0.3)

    def test_invalid(self):
        with self.assertRaises(InterfaceError):
            TimeGrid([0.0, 0.5, 0.5])
        with self.assertRaises(InterfaceError):
            TimeGrid([0.1, 0.5])
        with self.assertRaises(InterfaceError):
            TimeGrid.uniform(0.0, 3)

    def test_suffix(self):
        grid = TimeGrid.uniform(1.0, 4).suffix(2)
        assert_allclose(grid.times, [0.0, 0.25, 0.5])


class TestInitialConfig(unittest.TestCase):
    def test_packed(self):
        assert_array_equal(InitialConfig.packed().first(3), [0.0, 0.0, 0.0])
        self.assertFalse(InitialConfig.packed().is_admissible)

    def test_power(self):
        x0 = InitialConfig.power(2.0, 0.5, 1.0)
        assert_allclose(x0.first(4), [3.0, 2.0 * math.sqrt(2) + 1, 2.0 * math.sqrt(3) + 1, 5.0])
        self.assertFalse(x0.is_admissible)
        self.assertTrue(InitialConfig.power(1.0, 0.75).is_admissible)
        self.assertTrue(InitialConfig.spread(0.5).is_admissible)

    def test_from_values_continues_by_last(self):
        x0 = InitialConfig.from_values([-1.0, 0.0, 2.0])
        assert_array_equal(x0.first(5), [-1.0, 0.0, 2.0, 2.0, 2.0])
        assert_array_equal(x0.mirrored(3).first(3), [-2.0, 0.0, 1.0])

    def test_decreasing_refused(self):
        with self.assertRaises(InterfaceError):
            InitialConfig.from_values([0.0, -1.0])

    def test_half_poisson(self):
        x0 = InitialConfig.half_poisson(20, seed=3)
        x = x0.first(25)
        self.assertTrue(np.all(np.diff(x) > 0))
        self.assertAlmostEqual(x[20] - x[19], 1.0)
        assert_array_equal(x, InitialConfig.half_poisson(20, seed=3).first(25))
        self.assertTrue(x0.is_admissible)


class TestPaths(unittest.TestCase):
    def setUp(self):
        self.grid = TimeGrid.uniform(1.0, 64)

    def test_sample_brownian_is_reproducible(self):
        a = sample_brownian(self.grid, 3, seed=11)
        b = sample_brownian(self.grid, 3, seed=11)
        assert_array_equal(a.values, b.values)
        assert_array_equal(a.values[:, 0], 0.0)
        self.assertFalse(np.array_equal(a.values, sample_brownian(self.grid, 3, seed=12).values))

    def test_more_rows_keep_the_prefix(self):
        small = sample_brownian(self.grid, 3, seed=5)
        large = sample_brownian(self.grid, 7, seed=5)
        assert_array_equal(small.values, large.values[:3])

    def test_increment_variance(self):
        bundle = sample_brownian(TimeGrid.uniform(1.0, 4), 20000, seed=1)
        final = bundle.values[:, -1]
        self.assertLess(abs(np.mean(final)), 0.05)
        self.assertLess(abs(np.var(final) - 1.0), 0.05)

    def test_increments_are_uncorrelated(self):
        bundle = sample_brownian(TimeGrid.uniform(1.0, 4), 10000, seed=3)
        increments = np.diff(bundle.values, axis=1)
        correlation = np.corrcoef(increments.T)
        off_diagonal = correlation[~np.eye(4, dtype=bool)]
        self.assertLess(float(np.max(np.abs(off_diagonal))), 0.05)

    def test_drift_apply(self):
        bundle = sample_brownian(self.grid, 2, seed=0)
        driven = drift_apply(bundle, SystemParams(p=0.5, drifts=(1.0,), drift_tail=-2.0))
        self.assertEqual(driven.kind, 'driven')
        assert_allclose(driven.values - bundle.values, [self.grid.times, -2.0 * self.grid.times])

    def test_drift_is_added_once(self):
        driven = drift_apply(sample_brownian(self.grid, 2, seed=0), SystemParams(p=0.5, drifts=(1.0,)))
        with self.assertRaises(InterfaceError):
            drift_apply(driven, SystemParams(p=0.5, drifts=(1.0,)))
        deterministic = PathBundle.deterministic(self.grid, np.zeros((1, 65)))
        shifted = drift_apply(deterministic, SystemParams(p=0.5, drifts=(2.0,)))
        assert_allclose(shifted.values[0], 2.0 * self.grid.times)

    def test_brownian_must_start_at_zero(self):
        with self.assertRaises(DataError):
            PathBundle(self.grid, np.ones((1, 65)), 'brownian')
        with self.assertRaises(DataError):
            PathBundle(self.grid, np.zeros((1, 10)), 'deterministic')

    def test_require_rows(self):
        with self.assertRaises(InterfaceError):
            sample_brownian(self.grid, 2, seed=0).row(3)

    def test_translate_path(self):
        grid = TimeGrid.uniform(1.0, 4)
        bundle = PathBundle.deterministic(grid, [[0.0, 1.0, 3.0, 6.0, 10.0]])
        assert_allclose(translate_path(bundle, 0.5).values, [[0.0, 3.0, 7.0]])
        assert_allclose(translate_path(bundle, 0.5, RAW).values, [[3.0, 6.0, 10.0]])
        self.assertIs(translate_path(bundle, 0.0), bundle)

    def test_translate_to_the_horizon(self):
        bundle = PathBundle.deterministic(TimeGrid.uniform(1.0, 4), [[0.0, 1.0, 3.0, 6.0, 10.0]])
        assert_allclose(translate_path(bundle, 0.75).values, [[0.0, 4.0]])
        with self.assertRaises(InterfaceError):
            translate_path(bundle, 1.0)

    def test_translations_compose(self):
        grid = TimeGrid.uniform(2.0, 32)
        bundle = sample_brownian(grid, 3, seed=12)
        once = translate_path(bundle, grid.times[12])
        twice = translate_path(translate_path(bundle, grid.times[8]), grid.times[4])
        assert_allclose(twice.times, once.times, atol=1e-12)
        assert_allclose(twice.values, once.values, atol=1e-12)
        raw = translate_path(translate_path(bundle, grid.times[8], RAW), grid.times[4], RAW)
        assert_array_equal(raw.values, bundle.values[:, 12:])

    def test_mirrored(self):
        bundle = PathBundle.deterministic(TimeGrid.uniform(1.0, 1), [[0.0, 1.0], [0.0, 2.0]])
        assert_array_equal(bundle.mirrored().values, [[0.0, -2.0], [0.0, -1.0]])


class TestReplicaSeed(unittest.TestCase):
    def test_distinct_and_stable(self):
        seeds = [replica_seed(7, k) for k in range(100)]
        self.assertEqual(len(set(seeds)), 100)
        self.assertEqual(seeds, [replica_seed(7, k) for k in range(100)])
        self.assertNotEqual(replica_seed(7, 0), replica_seed(8, 0))
