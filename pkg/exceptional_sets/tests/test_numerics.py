import math

import numpy as np
from django.test import SimpleTestCase

from exceptional_sets.exceptions import NumericFailure
from exceptional_sets.numerics import adaptive_simpson, golden_section_min, multistart_min, parallel_map


class GoldenSectionTests(SimpleTestCase):
    def test_interior_minimum(self):
        res = golden_section_min(lambda x: (x - 0.3) ** 2, 0.0, 1.0)
        self.assertAlmostEqual(res.argmin, 0.3, places=6)
        self.assertTrue(res.converged)

    def test_endpoint_is_a_candidate(self):
        res = golden_section_min(lambda x: x, 0.0, 1.0)
        self.assertEqual(res.argmin, 0.0)
        self.assertEqual(res.minimum, 0.0)

    def test_multistart_finds_global_minimum(self):
        x, y = multistart_min(lambda xs: np.sin(xs) + 0.1 * xs, lambda x: math.sin(x) + 0.1 * x, 0.0, 10.0)
        self.assertAlmostEqual(x, 2 * math.pi - math.acos(-0.1), places=6)
        self.assertLess(y, -0.53)

    def test_multistart_all_nonfinite(self):
        x, y = multistart_min(lambda xs: np.full(xs.shape, np.nan), lambda x: math.nan, 0.0, 1.0)
        self.assertTrue(math.isnan(x))
        self.assertEqual(y, math.inf)


class AdaptiveSimpsonTests(SimpleTestCase):
    def test_polynomial_is_exact(self):
        res = adaptive_simpson(lambda x: x * x, 0.0, 1.0)
        self.assertAlmostEqual(res.value, 1 / 3, places=14)
        self.assertTrue(res.converged)

    def test_reciprocal(self):
        self.assertAlmostEqual(float(adaptive_simpson(lambda x: 1 / x, 1.0, math.e)), 1.0, places=9)

    def test_empty_interval(self):
        res = adaptive_simpson(lambda x: 1.0, 2.0, 2.0)
        self.assertEqual((res.value, res.evaluations, res.converged), (0.0, 0, True))

    def test_evaluation_budget(self):
        res = adaptive_simpson(math.sqrt, 0.0, 1.0, tol=1e-14, max_evaluations=11)
        self.assertFalse(res.converged)
        self.assertLess(res.evaluations, 40)
        self.assertAlmostEqual(res.value, 2 / 3, places=2)

    def test_nonfinite_integrand(self):
        with self.assertRaises(NumericFailure):
            adaptive_simpson(lambda x: math.nan, 0.0, 1.0, max_evaluations=101)


class ParallelMapTests(SimpleTestCase):
    def test_order_is_kept(self):
        self.assertEqual(parallel_map(abs, [-3, 1, -2]), [3, 1, 2])
        self.assertEqual(parallel_map(abs, [-3, 1, -2], workers=2), [3, 1, 2])
