import math
from unittest.mock import patch

import numpy as np
from django.test import SimpleTestCase

from exceptional_sets import gauges
from exceptional_sets import logderiv_bounds as lb
from exceptional_sets.disc_sets import Disc
from exceptional_sets.exceptions import InvalidInput, SingularPoint, UnsupportedGauge
from exceptional_sets.gauges import Ambient
from exceptional_sets.logderiv_bounds import ZeroPoleData


class LogDerivativeTests(SimpleTestCase):
    def test_simple_values(self):
        f = ZeroPoleData.from_lists(zeros=[1, -1])
        self.assertAlmostEqual(lb.log_derivative(f, 1, 0, 3), 0.75, places=14)
        g = ZeroPoleData.from_lists(zeros=[0])
        self.assertAlmostEqual(lb.log_derivative(g, 1, 0, 1j), -1j, places=14)

    def test_methods_agree(self):
        f = ZeroPoleData.from_lists(zeros=[1, 2, 5])
        recursive = lb.log_derivative(f, 2, 0, 10, method="recursive")
        direct = lb.log_derivative(f, 2, 0, 10, method="direct")
        self.assertLess(abs(recursive - direct), 1e-12 * abs(direct))

    def test_poles(self):
        f = ZeroPoleData.from_lists(zeros=[2], poles=[0])
        # f = (z - 2)/z, f'/f = 1/(z-2) - 1/z
        self.assertAlmostEqual(lb.log_derivative(f, 1, 0, 4), 0.5 - 0.25, places=14)

    def test_singular_and_bad_orders(self):
        f = ZeroPoleData.from_lists(zeros=[1, 2, 5])
        with self.assertRaises(SingularPoint):
            lb.log_derivative(f, 1, 0, 1)
        with self.assertRaises(InvalidInput):
            lb.log_derivative(f, 1, 1, 3)
        with self.assertRaises(InvalidInput):
            lb.log_derivative(f, 2, 0, 3, method="series")

    def test_zero_and_pole_at_once(self):
        with self.assertRaises(InvalidInput):
            ZeroPoleData.from_lists(zeros=[1], poles=[1])

    def test_payload(self):
        f = ZeroPoleData.from_lists(zeros=[1, 1, 2j], poles=[3])
        self.assertEqual(ZeroPoleData.from_dict(f.to_dict()), f)


class CountingTests(SimpleTestCase):
    def test_counts(self):
        f = ZeroPoleData.from_lists(zeros=[1, 2, 5])
        self.assertEqual(lb.counting_function(f, 0, 3), 2)
        self.assertEqual(lb.counting_function(ZeroPoleData(), 0, 3), 0)
        self.assertEqual(lb.counting_function(ZeroPoleData.from_lists(zeros=[2, 2]), 0, 3), 2)

    def test_derivative_zeros(self):
        f = ZeroPoleData.from_lists(zeros=[1, -1])
        # f' = 2z
        self.assertEqual(lb.counting_function(f, 1, 0.5), 1)
        self.assertEqual(lb.counting_function(f, 1, 10), 1)

    def test_characteristic(self):
        self.assertAlmostEqual(lb.characteristic_proxy(ZeroPoleData.from_lists(zeros=[1, 2, 3]), math.e), 3.0)
        self.assertAlmostEqual(lb.characteristic_proxy(ZeroPoleData.from_lists(poles=[1]), math.e**2), 2.0)
        with self.assertRaises(InvalidInput):
            lb.characteristic_proxy(ZeroPoleData(), 0.5)

    def test_characteristic_disc(self):
        f = ZeroPoleData.from_lists(zeros=[0.25])
        self.assertAlmostEqual(lb.characteristic_proxy_disc(f, 0.5), math.log(2))
        self.assertEqual(lb.characteristic_proxy_disc(f, 0.2), 0.0)


class CartanTests(SimpleTestCase):
    def test_single_point(self):
        discs = lb.cartan_discs([1 + 1j], 0.3)
        self.assertEqual(len(discs), 1)
        self.assertLessEqual(discs[0].radius, 0.6 + 1e-12)
        self.assertLessEqual(abs(discs[0].center - (1 + 1j)), discs[0].radius)

    def test_three_points(self):
        discs = lb.cartan_discs([0, 1, 2], 0.3)
        self.assertAlmostEqual(sum(d.radius for d in discs), 0.6)

    def test_coincident_points(self):
        discs = lb.cartan_discs([1 + 1j] * 5, 0.2)
        self.assertEqual(len(discs), 1)
        self.assertAlmostEqual(discs[0].radius, 0.4)

    def test_nearest_point_distances_outside(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(-3, 3, 12) + 1j * rng.uniform(-3, 3, 12)
        d = 0.5
        discs = lb.cartan_discs(points, d)
        self.assertLessEqual(sum(x.radius for x in discs), 2 * d * (1 + 1e-12))
        grid = np.linspace(-4, 4, 61)
        zs = (grid[:, None] + 1j * grid[None, :]).ravel()
        for z in zs:
            if any(abs(z - x.center) <= x.radius for x in discs):
                continue
            dist = np.sort(np.abs(z - points))
            m = np.arange(1, points.size + 1)
            self.assertTrue(np.all(dist > m * d / points.size * (1 - 1e-9)))

    def test_max_coverage(self):
        self.assertEqual(lb.max_coverage([], 1.0), (0, None))
        count, _ = lb.max_coverage([0, 1, 2, 10], 1.0)
        self.assertEqual(count, 3)
        with self.assertRaises(InvalidInput):
            lb.cartan_discs([0], 0.0)


class ConstructionTests(SimpleTestCase):
    def test_plane_annuli(self):
        f = ZeroPoleData.from_lists(zeros=[1, 3, 10, 40])
        construction = lb.build_exceptional_set(f, 0, 2.0, gauges.identity())
        self.assertEqual(construction.annuli[1].mu, 3)
        self.assertAlmostEqual(construction.annuli[2].d, 8 / (3 * math.log(2)) ** 2, places=12)
        self.assertAlmostEqual(construction.annuli[2].d, 1.8501, places=4)
        self.assertTrue(construction.tail_sum_ok)
        self.assertTrue(construction.closed_form_ok)
        self.assertTrue(construction.side_conditions_ok)
        self.assertTrue(construction.geometry_ok)

    def test_empty_function(self):
        construction = lb.build_exceptional_set(ZeroPoleData(), 0, 2.0, gauges.identity())
        self.assertEqual(construction.discs, [])
        self.assertEqual(construction.nu0, 3)
        self.assertEqual(construction.realized_tail, 0.0)
        samples = lb.admissible_samples(construction, 40, seed=1)
        self.assertEqual(samples.size, 40)
        self.assertTrue(np.all(construction.admissible_mask(samples)))

    def test_samples_are_prefixes(self):
        f = ZeroPoleData.from_lists(zeros=[1, 3, 10, 40])
        construction = lb.build_exceptional_set(f, 0, 2.0, gauges.identity())
        small = lb.admissible_samples(construction, 20, seed=4)
        large = lb.admissible_samples(construction, 60, seed=4)
        np.testing.assert_array_equal(small, large[:20])

    def test_gauge_and_b_checks(self):
        with self.assertRaises(UnsupportedGauge):
            lb.build_exceptional_set(ZeroPoleData(), 0, 2.0, gauges.convex_power(1))
        with self.assertRaises(InvalidInput):
            lb.build_exceptional_set(ZeroPoleData(), 0, 2.0, gauges.unit_convex_power(1), b=1.5)
        with self.assertRaises(InvalidInput):
            lb.build_exceptional_set(ZeroPoleData.from_lists(zeros=[2]), 0, 2.0, gauges.unit_convex_power(1), b=0.5)

    def test_unit_disc_construction(self):
        construction = lb.build_exceptional_set(
            ZeroPoleData.from_lists(zeros=[0]), 0, 2.0, gauges.unit_convex_power(1), b=0.5
        )
        self.assertIs(construction.ambient, Ambient.UNIT_DISC)
        self.assertEqual(construction.nu0, 5)
        self.assertAlmostEqual(construction.excluded_radius, 1 - 0.5**5)
        self.assertTrue(construction.closed_form_ok)
        self.assertTrue(construction.geometry_ok)

    def test_unit_disc_side_conditions_hold_separately(self):
        f = ZeroPoleData.from_lists(zeros=[1 - 2.0**-m for m in range(1, 13)])
        b = 0.5
        construction = lb.build_exceptional_set(f, 0, 2.0, gauges.unit_convex_power(1), b=b)
        self.assertEqual(construction.log_condition_nu, 1)
        self.assertEqual(construction.nu0, 5)
        for annulus in construction.active:
            with self.subTest(nu=annulus.nu):
                self.assertLess(4 * annulus.d, b ** (annulus.nu + 1))
                self.assertLess(b ** (annulus.nu + 1), 1 - b**annulus.nu)
                self.assertGreaterEqual(math.log(annulus.mu), 1.0)
        # nu = 4 is the last annulus failing 4d < b^(nu+1)
        self.assertGreaterEqual(4 * construction.annuli[3].d, b**5)

    def test_log_condition_moves_nu0(self):
        f = ZeroPoleData.from_lists(zeros=[100, 101, 102])
        construction = lb.build_exceptional_set(f, 0, 2.0, gauges.identity())
        self.assertTrue(construction.annuli[2].side_conditions)
        self.assertEqual(construction.log_condition_nu, 5)
        self.assertEqual(construction.nu0, 5)
        self.assertTrue(all(math.log(a.mu) >= 1 for a in construction.active))

    def test_closed_form_follows_laid_down_radii(self):
        f = ZeroPoleData.from_lists(zeros=[1, 3, 10, 40])
        construction = lb.build_exceptional_set(f, 0, 2.0, gauges.identity())
        for annulus in construction.annuli:
            self.assertAlmostEqual(annulus.used_d, annulus.d, delta=1e-12 * annulus.d)
        laid_down = lb.cartan_discs

        def inflated(points, d):
            return [Disc(disc.center, 1.5 * disc.radius) for disc in laid_down(points, d)]

        with patch("exceptional_sets.logderiv_bounds.cartan_discs", inflated):
            oversized = lb.build_exceptional_set(f, 0, 2.0, gauges.identity())
        self.assertFalse(oversized.closed_form_ok)
        self.assertAlmostEqual(oversized.annuli[2].used_d, 1.5 * construction.annuli[2].d, places=12)


class BoundCheckTests(SimpleTestCase):
    def test_inner_chain_example(self):
        f = ZeroPoleData.from_lists(zeros=[1, -1, 2j])
        lhs, rhs, final = lb.inner_chain(f, 0, 2.0, gauges.identity(), 5)
        self.assertAlmostEqual(lhs, 0.25 + 1 / 6 + 1 / math.sqrt(29), places=12)
        self.assertAlmostEqual(lhs, 0.60237, places=5)
        self.assertAlmostEqual(rhs, 4 * 3 * math.log(3) * math.log(5) ** 2 / 5, places=12)
        self.assertAlmostEqual(rhs, 6.830, places=3)
        self.assertTrue(final)

    def test_log_modulus_ratio(self):
        f = ZeroPoleData.from_lists(zeros=[0])
        self.assertAlmostEqual(lb.log_modulus_ratio(f, 100, 1), math.log(1.01), places=14)
        self.assertEqual(lb.log_modulus_ratio(f, 100, 0), 0.0)

    def test_empty_function_passes(self):
        construction = lb.build_exceptional_set(ZeroPoleData(), 0, 2.0, gauges.identity())
        samples = lb.admissible_samples(construction, 30, seed=2)
        report = lb.check_logderiv_bound(ZeroPoleData(), 1, 0, 2.0, gauges.identity(), samples, construction)
        self.assertTrue(report.passed)
        self.assertEqual(report.empirical_C, 0.0)
        self.assertEqual(set(report.to_dict()), {"summary", "samples"})

    def test_inadmissible_sample_rejected(self):
        construction = lb.build_exceptional_set(ZeroPoleData(), 0, 2.0, gauges.identity())
        with self.assertRaises(InvalidInput):
            lb.check_logderiv_bound(ZeroPoleData(), 1, 0, 2.0, gauges.identity(), [0.5], construction)

    def test_unit_disc_inner_chain_holds(self):
        f = ZeroPoleData.from_lists(zeros=[0])
        g = gauges.unit_convex_power(1)
        construction = lb.build_exceptional_set(f, 0, 2.0, g, b=0.5)
        samples = lb.admissible_samples(construction, 40, seed=3)
        report = lb.check_logderiv_bound_unitdisc(f, 1, 0, 2.0, 0.5, g, samples, construction)
        self.assertEqual(report.violations, [])
        self.assertTrue(math.isfinite(report.empirical_C))
        self.assertGreater(report.empirical_C, 0.0)

    def test_unit_disc_rhs_value(self):
        zeros = [0.1, 0.2, -0.3]
        f = ZeroPoleData.from_lists(zeros=zeros)
        g = gauges.unit_convex_power(1)
        construction = lb.build_exceptional_set(f, 0, 2.0, g, b=0.5)
        samples = lb.admissible_samples(construction, 10, seed=7)
        report = lb.check_logderiv_bound_unitdisc(f, 1, 0, 2.0, 0.5, g, samples, construction)
        for z, lhs, rhs in zip(samples, report.lhs, report.rhs):
            r = abs(z)
            s = 1 - 0.5 * (1 - r)
            T = math.fsum(math.log(s / abs(a)) for a in zeros)
            W = 3 * math.log(3) * math.log(1 / (1 - r)) ** 2 / (1 - r)
            self.assertAlmostEqual(rhs, (T - math.log(1 - r)) / (1 - r) ** 2 + W, delta=1e-9 * rhs)
            self.assertAlmostEqual(lhs, abs(sum(1 / (z - a) for a in zeros)), places=9)

    def test_empirical_constant_settles_when_samples_double(self):
        f = ZeroPoleData.from_lists(zeros=[0, 0])
        g = gauges.identity()
        construction = lb.build_exceptional_set(f, 0, 2.0, g)
        self.assertEqual(construction.nu0, 3)
        reports = [
            lb.check_logderiv_bound(f, 1, 0, 2.0, g, lb.admissible_samples(construction, n, seed=5), construction)
            for n in (40, 80)
        ]
        single, double = reports
        self.assertAlmostEqual(double.half_C, single.empirical_C, places=12)
        self.assertGreaterEqual(double.empirical_C, single.empirical_C)
        self.assertLess((double.empirical_C - single.empirical_C) / double.empirical_C, 0.10)
        self.assertTrue(double.stable)
        self.assertLess(double.empirical_C, 1 / (math.log(16) + math.log(2) * math.log(8) ** 2) * (1 + 1e-12))
