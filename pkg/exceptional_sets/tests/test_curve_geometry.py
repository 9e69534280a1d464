import math

from django.test import SimpleTestCase

from exceptional_sets import curve_geometry as cg
from exceptional_sets import disc_sets, gauges
from exceptional_sets.curve_geometry import Branch, Contact, CurveFamily
from exceptional_sets.disc_sets import Disc, build_collection
from exceptional_sets.exceptions import InvalidInput, NotInAsymptoticRegime, NotStolz, PartialDomain
from exceptional_sets.gauges import Ambient


class BoundaryPointTests(SimpleTestCase):
    def test_plane_points(self):
        p = cg.boundary_point(CurveFamily(gauges.identity(), 1.0), 3.0)
        self.assertAlmostEqual(p.real, 3.0, places=12)
        self.assertAlmostEqual(p.imag, 3.0, places=12)
        p = cg.boundary_point(CurveFamily(gauges.identity(), 1.0, phi=math.pi / 2), 3.0)
        self.assertAlmostEqual(p.real, -3.0, places=12)
        self.assertAlmostEqual(p.imag, 3.0, places=12)

    def test_lower_branch(self):
        p = cg.boundary_point(CurveFamily(gauges.concave_power(0.5), 2.0, branch=Branch.LOWER), 4.0)
        self.assertAlmostEqual(p.imag, -4.0, places=12)

    def test_unit_disc_point(self):
        p = cg.boundary_point(CurveFamily(gauges.unit_concave_power(0.5), 1.0), 0.99)
        self.assertAlmostEqual(abs(p), 0.99, places=12)
        self.assertAlmostEqual(abs(1 - p), 0.1, places=9)

    def test_family_checks(self):
        with self.assertRaises(InvalidInput):
            CurveFamily(gauges.identity(), 0.0)
        with self.assertRaises(InvalidInput):
            CurveFamily(gauges.unit_stolz_power(1), 1.0, zeta=2 + 0j)
        with self.assertRaises(InvalidInput):
            cg.boundary_point(CurveFamily(gauges.identity(), 1.0, branch=Branch.BOTH), 1.0)


class MeetsTests(SimpleTestCase):
    def test_curve_through_center(self):
        self.assertTrue(cg.meets(CurveFamily(gauges.identity(), 1.0), Disc(2 + 2j, 0.5)))

    def test_wrong_side(self):
        fam = CurveFamily(gauges.concave_power(0.5), 1.0)
        self.assertFalse(cg.meets(fam, Disc(4 - 2j, 0.1)))
        both = CurveFamily(gauges.concave_power(0.5), 1.0, branch=Branch.BOTH)
        self.assertTrue(cg.meets(both, Disc(4 - 2j, 0.1)))

    def test_near_miss(self):
        fam = CurveFamily(gauges.concave_power(0.5), 1.0)
        d = Disc(4 + 2.1j, 0.05)
        self.assertAlmostEqual(cg.nearest_distance(fam, d), 0.0970, places=3)
        self.assertIs(cg.classify(fam, d), Contact.MISS)

    def test_intersecting_indices(self):
        col = build_collection(
            Ambient.PLANE,
            gauges.identity(),
            [Disc(2 + 2j, 0.5), Disc(4 - 2j, 0.1), Disc(10 + 10.05j, 0.1)],
            1e-3,
            tail_index=0,
        )
        self.assertEqual(cg.intersecting_indices(CurveFamily(gauges.identity(), 1.0), col), [0, 2])
        self.assertEqual(cg.intersecting_indices(CurveFamily(gauges.identity(), 1.0), col, [1, 2]), [2])


class CIntervalTests(SimpleTestCase):
    def test_identity_matches_tangent_lines(self):
        d = Disc(4 + 2j, 0.1)
        report = cg.c_interval(gauges.identity(), 0.0, d)
        lo, hi = cg.linear_c_interval(d.center, d.radius)
        self.assertAlmostEqual(lo, 0.47236, places=5)
        self.assertAlmostEqual(hi, 0.52828, places=5)
        self.assertAlmostEqual(report.c_lo, lo, places=8)
        self.assertAlmostEqual(report.c_hi, hi, places=8)
        self.assertAlmostEqual(report.width_bound, 0.2)
        self.assertTrue(report.satisfied)

    def test_curve_through_disc_inside_interval(self):
        report = cg.c_interval(gauges.identity(), 0.0, Disc(2 + 2j, 0.1))
        self.assertLessEqual(report.c_lo, 1.0)
        self.assertGreaterEqual(report.c_hi, 1.0)

    def test_other_branch_is_empty(self):
        report = cg.c_interval(gauges.identity(), 0.0, Disc(4 - 2j, 0.1), Branch.UPPER)
        self.assertTrue(report.empty)
        self.assertEqual(report.width, 0.0)

    def test_partial_domain(self):
        with self.assertRaises(PartialDomain):
            cg.c_interval(gauges.convex_power(1), 0.0, Disc(1.05 + 0.5j, 0.1))
        with self.assertRaises(InvalidInput):
            cg.c_interval(gauges.identity(), 0.0, Disc(4 + 2j, 0.1), Branch.BOTH)

    def test_unit_disc_interval_contains_curve_value(self):
        g = gauges.unit_stolz_power(1)
        d = Disc(0.9 + 0.05j, 0.001)
        report = cg.c_interval(g, 1 + 0j, d)
        center_value = abs(1 - d.center) / (1 - abs(d.center))
        self.assertLess(report.c_lo, center_value)
        self.assertGreater(report.c_hi, center_value)
        self.assertTrue(report.satisfied)


class WidthBoundTests(SimpleTestCase):
    def test_bound_cc(self):
        self.assertAlmostEqual(cg.bound_cc(gauges.identity(), Disc(4 + 2j, 0.1), 1), 0.2)
        self.assertAlmostEqual(
            cg.bound_cc(gauges.concave_power(0.5), Disc(100 + 5j, 0.01), 1), 4 * math.sqrt(2) * 0.001, places=12
        )
        with self.assertRaises(NotInAsymptoticRegime):
            cg.bound_cc(gauges.identity(), Disc(1 + 0j, 0.1), 1)

    def test_bound_cc2(self):
        self.assertAlmostEqual(cg.bound_cc2(gauges.convex_power(1), Disc(10 + 0.05j, 1e-4)), 8e-3, places=6)

    def test_bound_stolz(self):
        self.assertAlmostEqual(cg.bound_stolz(1, Disc(0.9 + 0j, 0.001), 1.0), 0.06)
        with self.assertRaises(NotStolz):
            cg.bound_stolz(1, Disc(0.999j, 1e-5), 1.0)


class RapidTrendTests(SimpleTestCase):
    def test_unit_radii_shrink(self):
        col = disc_sets.gen_rapid_instance(100, 4)
        report = cg.width_trend_rapid(gauges.rapid_power(2), col)
        self.assertTrue(report.passed)
        self.assertTrue(report.technical_ok)
        self.assertLess(report.widths[-1], report.widths[0])

    def test_growing_radii_fail(self):
        discs = [Disc(complex(n, n), n / 2) for n in range(3, 51)]
        col = build_collection(Ambient.PLANE, gauges.rapid_power(2), discs, 1.0, tail_index=0)
        report = cg.width_trend_rapid(gauges.rapid_power(2), col)
        self.assertFalse(report.passed)
        self.assertFalse(report.technical_ok)
        self.assertTrue(report.failures)

    def test_empty_tail(self):
        col = build_collection(Ambient.PLANE, gauges.rapid_power(2), [], 1.0)
        self.assertTrue(cg.width_trend_rapid(gauges.rapid_power(2), col).passed)
