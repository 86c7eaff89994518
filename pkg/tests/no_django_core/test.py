import tempfile
import unittest

import numpy as np

from cbp.harness.config import parse_config
from cbp.harness.runner import run_experiment
from cbp.lpp import v_plus
from cbp.model import InitialConfig, SystemParams, TimeGrid, sample_brownian
from cbp.solver import solve


class Test(unittest.TestCase):

    def test_no_django(self):
        self.assertRaises(ImportError, __import__, 'django.core')

    def test_solve(self):
        bundle = sample_brownian(TimeGrid.uniform(1.0, 16), 3, seed=1)
        sol = solve(bundle, InitialConfig.packed(), SystemParams(p=0.5), 3)
        self.assertTrue(sol.diagnostics.converged)
        self.assertTrue(np.all(np.diff(sol.X, axis=0) >= -1e-9))
        self.assertLessEqual(sol.X[2, -1], v_plus(bundle, 1, 3).value + 1e-9)

    def test_harness(self):
        with tempfile.TemporaryDirectory() as tmp:
            manifest = run_experiment(parse_config({'scenario': 'gue', 'M': 2, 'replicas': 2, 'output_dir': tmp,
                                                    'max_workers': 1}))
        self.assertEqual(manifest['status'], 'ok')
