import math

import numpy as np
from django.test import SimpleTestCase

from exceptional_sets import gauges
from exceptional_sets.exceptions import DomainError, InvalidInput, UnsupportedGauge


class GaugeEvalTests(SimpleTestCase):
    def test_catalog_values(self):
        self.assertEqual(gauges.identity()(2.0), 2.0)
        self.assertAlmostEqual(gauges.concave_power(0.5)(4.0), 2.0, places=12)
        self.assertAlmostEqual(gauges.unit_convex_power(2)(0.1), 0.01, places=12)

    def test_vector_eval_keeps_shape(self):
        values = gauges.concave_power(0.5)(np.array([1.0, 4.0, 9.0]))
        np.testing.assert_allclose(values, [1.0, 2.0, 3.0])

    def test_outside_domain(self):
        with self.assertRaises(DomainError):
            gauges.identity()(-1.0)
        with self.assertRaises(DomainError):
            gauges.convex_power(1)(0.0)
        with self.assertRaises(DomainError):
            gauges.unit_concave_power(0.5)(1.5)

    def test_factory_parameter_checks(self):
        with self.assertRaises(InvalidInput):
            gauges.concave_power(1.5)
        with self.assertRaises(InvalidInput):
            gauges.rapid_power(1.0)
        with self.assertRaises(InvalidInput):
            gauges.unit_stolz_power(0.5)

    def test_from_spec(self):
        g = gauges.from_spec("concave_power:a=0.5")
        self.assertEqual(g.kind, gauges.GaugeKind.PLANE_CONCAVE_POWER)
        self.assertEqual(g.params, {"a": 0.5})
        self.assertAlmostEqual(g.doubling_up, math.sqrt(2))
        self.assertEqual(gauges.from_spec({"kind": "identity"}).doubling_up, 2.0)
        self.assertEqual(gauges.Gauge.from_dict(g.to_dict()), g)

    def test_from_spec_errors(self):
        with self.assertRaises(UnsupportedGauge):
            gauges.from_spec("nope")
        with self.assertRaises(InvalidInput):
            gauges.from_spec("concave_power:a=x")
        with self.assertRaises(InvalidInput):
            gauges.from_spec("identity:a=1")


class DoublingTests(SimpleTestCase):
    def test_concave_power_doubling_is_exact(self):
        report = gauges.verify_doubling(gauges.concave_power(0.5), np.linspace(1, 100, 50), math.sqrt(2))
        self.assertTrue(report.passed)
        self.assertTrue(report.permitted)
        self.assertAlmostEqual(report.empirical_constant, math.sqrt(2), places=12)
        self.assertTrue(report.growth_cap_ok)

    def test_log_gauge_threshold(self):
        report = gauges.verify_doubling(gauges.concave_log(1.1), np.logspace(1, 3.5, 200), 1.1)
        self.assertAlmostEqual(report.analytic_threshold, 1024.0)
        self.assertTrue(report.passed)
        below = np.array(report.grid) < 1024
        self.assertFalse(all(np.array(report.point_passed)[below]))

    def test_constant_extremal_value_flagged(self):
        report = gauges.verify_doubling(gauges.constant(), np.linspace(1, 10, 10), 1.0)
        self.assertFalse(report.permitted)
        self.assertIn("non-permitted extremal value alpha=1 works for constant functions only", report.flags)

    def test_convex_lower_doubling(self):
        report = gauges.verify_doubling(gauges.convex_power(1), np.linspace(1, 100, 20), 0.5)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.empirical_constant, 0.5, places=12)

    def test_empty_grid(self):
        with self.assertRaises(InvalidInput):
            gauges.verify_doubling(gauges.identity(), [], 2.0)

    def test_rapid_gauge_has_no_doubling_constant(self):
        with self.assertRaises(UnsupportedGauge):
            gauges.verify_doubling(gauges.rapid_power(2), [1.0, 2.0], 2.0)


class DoublingTypeTests(SimpleTestCase):
    def test_unit_concave_limits(self):
        g = gauges.unit_concave_power(0.5)
        report = gauges.verify_doubling_type(g, lambda x: np.sqrt(1 - x), 1.0, gauges.default_grid(g))
        self.assertTrue(report.converged)
        self.assertAlmostEqual(report.limits["minus"], 1.0, places=5)
        self.assertAlmostEqual(report.limits["plus"], 1.0, places=5)

    def test_rapid_power_limits(self):
        g = gauges.rapid_power(2)
        report = gauges.verify_doubling_type(g, lambda x: 1 / x, 1.0, np.logspace(1, 4, 200))
        self.assertAlmostEqual(report.limits["minus"], 1.0, places=3)
        self.assertAlmostEqual(report.limits["plus"], 1.0, places=3)

    def test_exponential_counterexample_does_not_converge(self):
        g = gauges.unit_exp_counterexample()
        report = gauges.verify_doubling_type(g, lambda x: np.sqrt(1 - x), 1.0, gauges.default_grid(g))
        self.assertFalse(report.converged)
        self.assertIn("non-convergent", report.flags)

    def test_profiles_are_marked_partial(self):
        g = gauges.unit_convex_power(2)
        reports = gauges.verify_doubling_type_profiles(g, 2.0, gauges.default_grid(g))
        self.assertEqual(set(reports), {"1-x", "sqrt(1-x)", "1/log(1/(1-x))"})
        for report in reports.values():
            self.assertIn("partial: finitely many delta profiles checked", report.flags)
            self.assertAlmostEqual(report.limits["plus"], 0.25, places=1)

    def test_concave_plane_gauge_rejected(self):
        with self.assertRaises(UnsupportedGauge):
            gauges.verify_doubling_type(gauges.identity(), lambda x: 1 / x, 1.0, [1.0, 2.0])


class DiagnosticsTests(SimpleTestCase):
    def test_limit_trends(self):
        rapid = gauges.limit_diagnostics(gauges.rapid_power(2), np.logspace(1, 4, 50))
        self.assertEqual(rapid.trend, "decreasing")
        self.assertAlmostEqual(rapid.limits["ratio"], 1e-4)
        g = gauges.unit_concave_power(0.5)
        self.assertEqual(gauges.limit_diagnostics(g, gauges.default_grid(g)).trend, "decreasing")
        g = gauges.unit_convex_power(2)
        self.assertEqual(gauges.limit_diagnostics(g, gauges.default_grid(g)).trend, "increasing")

    def test_shape(self):
        shape = gauges.shape_diagnostics(gauges.concave_power(0.5), np.linspace(1, 100, 100))
        self.assertTrue(shape.increasing)
        self.assertTrue(shape.concave)
        self.assertFalse(shape.convex)
        shape = gauges.shape_diagnostics(gauges.convex_power(1), np.linspace(1, 100, 100))
        self.assertTrue(shape.decreasing)
        self.assertTrue(shape.convex)

    def test_default_grid(self):
        grid = gauges.default_grid(gauges.identity())
        self.assertEqual(grid.size, 512)
        self.assertAlmostEqual(grid[0], 1.0)
        self.assertAlmostEqual(grid[-1], 1e4)
        unit = gauges.default_grid(gauges.unit_convex_power(2))
        self.assertTrue(np.all((unit > 0) & (unit < 1)))
