import unittest

from numpy.testing import assert_array_equal

from cbp.common import get_picard_max_iter, get_setting
from cbp.exceptions import ConvergenceError
from cbp.model import InitialConfig, SystemParams, TimeGrid, sample_brownian
from cbp.rmt import sample_gue_matrix
from cbp.solver import solve


class SettingsModuleTest(unittest.TestCase):
    def test_values(self):
        self.assertEqual(get_picard_max_iter(), 3)
        self.assertEqual(get_setting('CBP_FAILURE_CAP'), 0.5)
        # not in the module
        self.assertEqual(get_setting('CBP_TOL_ORDER'), 1e-9)

    def test_picard_limit(self):
        bundle = sample_brownian(TimeGrid.uniform(1.0, 32), 8, seed=3)
        with self.assertRaises(ConvergenceError):
            solve(bundle, InitialConfig.packed(), SystemParams(p=0.5), 8)

    def test_gue_convention(self):
        assert_array_equal(sample_gue_matrix(3, 1.0, 5), sample_gue_matrix(3, 1.0, 5, 'full'))
