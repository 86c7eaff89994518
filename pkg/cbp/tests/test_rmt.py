"""
Tests of the GUE sampler and the Jacobi eigensolver
"""
import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import stats

from cbp.exceptions import ConvergenceError, InterfaceError
from cbp.lpp import v_plus
from cbp.model import TimeGrid, replica_seed, sample_brownian
from cbp.rmt import (
    jacobi_eigen, ks_distance, lambda_max, real_embedding, sample_gue_batch, sample_gue_lambda_max,
    sample_gue_matrix)
from cbp.test_helpers import skipUnless, slow_tests


class TestJacobi(unittest.TestCase):
    def test_against_lapack(self):
        rng = np.random.default_rng(5)
        for n in (1, 2, 5, 8):
            a = rng.standard_normal((n, n))
            S = a + a.T
            values, vectors, _ = jacobi_eigen(S)
            assert_allclose(np.sort(values), np.linalg.eigvalsh(S), atol=1e-10)
            assert_allclose(S @ vectors, vectors * values, atol=1e-10)
            assert_allclose(vectors.T @ vectors, np.eye(n), atol=1e-10)

    def test_diagonal_needs_no_sweep(self):
        values, _, sweeps = jacobi_eigen(np.diag([3.0, -1.0, 2.0]))
        assert_allclose(values, [3.0, -1.0, 2.0])
        self.assertEqual(sweeps, 0)

    def test_degenerate_pairs_of_the_embedding(self):
        """The real embedding has every eigenvalue twice, the sweeps must still stop"""
        for M in (2, 3, 4, 6):
            for k in range(60):
                H = sample_gue_matrix(M, 1.0, replica_seed(10 ** 6, k))
                S = real_embedding(H)
                values, vectors, sweeps = jacobi_eigen(S)
                assert_allclose(np.sort(values), np.linalg.eigvalsh(S), atol=1e-10)
                assert_allclose(S @ vectors, vectors * values, atol=1e-9)
                self.assertLess(sweeps, 20)

    def test_batch_matches_lapack(self):
        for M in (2, 3):
            batch = sample_gue_batch(M, 1.0, 300, base_seed=11)
            expected = [np.linalg.eigvalsh(sample_gue_matrix(M, 1.0, replica_seed(11, k)))[-1]
                        for k in range(300)]
            assert_allclose(batch, expected, atol=1e-10)

    def test_sweep_cap(self):
        with self.assertRaises(ConvergenceError) as cm:
            jacobi_eigen(np.array([[1.0, 2.0], [2.0, 1.0]]), max_sweeps=0)
        self.assertEqual(cm.exception.report, 0)


class TestGue(unittest.TestCase):
    def test_hermitian(self):
        H = sample_gue_matrix(4, 2.0, seed=8)
        assert_allclose(H, H.conj().T)
        assert_allclose(np.diag(H).imag, 0.0)

    def test_embedding_doubles_the_spectrum(self):
        H = sample_gue_matrix(3, 1.0, seed=1)
        expected = np.linalg.eigvalsh(H)
        doubled = np.linalg.eigvalsh(real_embedding(H))
        assert_allclose(doubled, np.sort(np.concatenate((expected, expected))), atol=1e-12)
        value, residual, _ = lambda_max(H)
        self.assertAlmostEqual(value, expected[-1], places=10)
        self.assertLess(residual, 1e-9)

    def test_order_one_is_gaussian_entry(self):
        H = sample_gue_matrix(1, 1.0, seed=2)
        self.assertAlmostEqual(sample_gue_lambda_max(1, 1.0, seed=2).lambda_max, H[0, 0].real)

    def test_order_two_closed_form(self):
        for k in range(200):
            seed = replica_seed(7, k)
            H = sample_gue_matrix(2, 1.5, seed)
            a, d, b = H[0, 0].real, H[1, 1].real, H[0, 1]
            expected = (a + d) / 2 + np.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
            self.assertAlmostEqual(sample_gue_lambda_max(2, 1.5, seed).lambda_max, expected, places=10)

    def test_conventions(self):
        split = sample_gue_matrix(3, 1.0, seed=4, convention='split')
        full = sample_gue_matrix(3, 1.0, seed=4, convention='full')
        assert_allclose(full[0, 1], np.sqrt(2.0) * split[0, 1])
        with self.assertRaises(InterfaceError):
            sample_gue_matrix(3, 1.0, seed=4, convention='other')

    def test_batch_is_reproducible(self):
        a = sample_gue_batch(3, 1.0, 5, base_seed=10)
        assert_allclose(a, sample_gue_batch(3, 1.0, 5, base_seed=10))
        self.assertEqual(a[2], sample_gue_lambda_max(3, 1.0, replica_seed(10, 2)).lambda_max)

    def test_invalid(self):
        with self.assertRaises(InterfaceError):
            sample_gue_matrix(0, 1.0, seed=0)
        with self.assertRaises(InterfaceError):
            sample_gue_matrix(2, 0.0, seed=0)


class TestKsDistance(unittest.TestCase):
    def test_against_scipy(self):
        rng = np.random.default_rng(3)
        a, b = rng.standard_normal(200), rng.standard_normal(150) + 0.3
        self.assertAlmostEqual(ks_distance(a, b), stats.ks_2samp(a, b).statistic)
        self.assertEqual(ks_distance([1.0, 2.0], [1.0, 2.0]), 0.0)
        self.assertEqual(ks_distance([0.0], [1.0]), 1.0)

    def test_empty(self):
        with self.assertRaises(InterfaceError):
            ks_distance([], [1.0])


class TestVplusIsGue(unittest.TestCase):
    def compare(self, M, n_steps, samples):
        grid = TimeGrid.uniform(1.0, n_steps)
        gue = sample_gue_batch(M, 1.0, samples, base_seed=11 + M)
        lpp = [v_plus(sample_brownian(grid, M, replica_seed(100 + M, k)), 1, M).value for k in range(samples)]
        return ks_distance(gue, lpp)

    def test_order_one(self):
        # Vplus_1(1, 1) = B(1) exactly, on any grid
        self.assertLess(self.compare(1, 4, 1000), 0.08)

    def test_order_two(self):
        self.assertLess(self.compare(2, 512, 1500), 0.1)

    def test_order_three(self):
        self.assertLess(self.compare(3, 1024, 1500), 0.1)

    @skipUnless(slow_tests, "Monte Carlo comparison, enabled by SLOW_TESTS=on")
    def test_acceptance_orders(self):
        for M in (1, 2, 3):
            self.assertLess(self.compare(M, 4096, 2000), 0.06)
