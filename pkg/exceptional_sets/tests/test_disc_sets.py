import math

import numpy as np
from django.test import SimpleTestCase

from exceptional_sets import disc_sets, gauges
from exceptional_sets.disc_sets import Disc, build_collection
from exceptional_sets.exceptions import InvalidInput
from exceptional_sets.gauges import Ambient


class CollectionTests(SimpleTestCase):
    def test_empty_collection_is_valid(self):
        col = build_collection(Ambient.PLANE, gauges.identity(), [], 1e-3)
        report = disc_sets.validate(col)
        self.assertTrue(report.valid)
        self.assertEqual(report.tail_sum, 0.0)
        self.assertEqual(col.tail_index, 0)

    def test_discs_sorted_by_modulus(self):
        col = build_collection(Ambient.PLANE, gauges.constant(), [Disc(10 + 0j, 0.1), Disc(3j, 0.1)])
        self.assertEqual([d.center for d in col.discs], [3j, 10 + 0j])

    def test_disc_containing_origin_is_offending(self):
        col = build_collection(Ambient.PLANE, gauges.constant(), [Disc(0.5 + 0j, 1.0)], 1e-3, tail_index=1)
        report = disc_sets.validate(col)
        self.assertFalse(report.valid)
        self.assertEqual(report.offending["contains_origin"], [0])

    def test_tail_budget_exceeded(self):
        col = build_collection(Ambient.PLANE, gauges.constant(), [Disc(10 + 0j, 0.5)], 1e-3, tail_index=0)
        report = disc_sets.validate(col)
        self.assertFalse(report.valid)
        self.assertIn("tail_sum", report.offending)

    def test_declare_tail(self):
        self.assertEqual(disc_sets.declare_tail([1.0, 0.5, 1e-4, 1e-4], 1e-3), 2)
        self.assertEqual(disc_sets.declare_tail([], 1e-3), 0)

    def test_bad_discs(self):
        with self.assertRaises(InvalidInput):
            Disc(1 + 1j, 0.0)
        with self.assertRaises(InvalidInput):
            Disc(complex(math.inf, 0), 1.0)

    def test_dict_payload(self):
        col = disc_sets.gen_example1(2, 2)
        again = disc_sets.DiscCollection.from_dict(col.to_dict())
        self.assertEqual(again.discs, col.discs)
        self.assertEqual(again.tail_index, col.tail_index)

    def test_csv_header(self):
        text = disc_sets.gen_example1(1, 1).to_csv()
        self.assertEqual(text.splitlines()[0], "n,re,im,r,ratio")
        self.assertEqual(len(text.splitlines()), 2)


class GeneratorTests(SimpleTestCase):
    def test_cantor_counts_and_diameters(self):
        col = disc_sets.gen_cantor_rset(12)
        self.assertEqual(len(col), 2**13 - 2)
        self.assertAlmostEqual(disc_sets.diameter_sum(col), 4 * (1 - (2 / 3) ** 12), places=10)
        self.assertTrue(disc_sets.validate(col).valid)
        self.assertTrue(disc_sets.cantor_nesting_ok(12))

    def test_cantor_seeded_imaginary_parts(self):
        col = disc_sets.gen_cantor_rset(3, imaginary_parts=5)
        ys = col.centers.imag
        self.assertTrue(np.all((ys >= 1) & (ys <= 2)))
        self.assertEqual(col.to_dict(), disc_sets.gen_cantor_rset(3, imaginary_parts=5).to_dict())

    def test_example_single_disc(self):
        col = disc_sets.gen_example1(1, 1)
        self.assertEqual(len(col), 1)
        self.assertAlmostEqual(disc_sets.diameter_sum(col), 0.5)
        self.assertAlmostEqual(disc_sets.gen_example2(1, 1).centers[0].imag, 1.0)

    def test_example_diameter_sums(self):
        expected = 2 * (1 - 2.0**-20) ** 2
        self.assertAlmostEqual(disc_sets.diameter_sum(disc_sets.gen_example1(20, 20)), expected, places=12)
        self.assertAlmostEqual(disc_sets.diameter_sum(disc_sets.gen_example2(20, 20)), expected, places=12)

    def test_horocycle(self):
        gap = disc_sets.horocycle_gap(2)
        self.assertAlmostEqual(1 - (1 - gap) ** 2, (1 - math.cos(0.5)) / 2, places=12)
        self.assertAlmostEqual(1 - (1 - gap) ** 2, 0.0612087, places=6)
        col = disc_sets.gen_horocycle_lset(500)
        self.assertTrue(disc_sets.validate(col).valid)
        self.assertTrue(np.all(np.abs(col.centers) + col.radii < 1))

    def test_random_is_deterministic_and_valid(self):
        args = (Ambient.PLANE, gauges.concave_power(0.5), 500, 1e-3, 1.0, 7)
        col = disc_sets.gen_random(*args)
        self.assertEqual(col.to_dict(), disc_sets.gen_random(*args).to_dict())
        report = disc_sets.validate(col)
        self.assertTrue(report.valid)
        self.assertLessEqual(report.tail_sum, 0.9e-3 * (1 + 1e-9))
        self.assertTrue(np.all(np.abs(col.centers.imag) <= col.centers.real))

    def test_random_unit_disc_in_stolz_angle(self):
        col = disc_sets.gen_random(Ambient.UNIT_DISC, gauges.unit_stolz_power(1), 200, 1e-3, 2.0, 3)
        self.assertTrue(disc_sets.validate(col).valid)
        self.assertLessEqual(disc_sets.comparability_constant(col), 2.0 + 1e-9)

    def test_random_rejects_wrong_ambient(self):
        with self.assertRaises(InvalidInput):
            disc_sets.gen_random(Ambient.UNIT_DISC, gauges.identity(), 10, 1e-3, 1.0, 1)

    def test_rapid_instance(self):
        col = disc_sets.gen_rapid_instance(100, 4)
        self.assertEqual(len(col), 98)
        self.assertTrue(np.all(col.radii == 1.0))
        self.assertTrue(disc_sets.validate(col).technical_trend)
        with self.assertRaises(InvalidInput):
            disc_sets.gen_rapid_instance(2, 4)


class ConstantTests(SimpleTestCase):
    def test_envelope_index(self):
        self.assertEqual(disc_sets.envelope_index(0.5), 1)
        self.assertEqual(disc_sets.envelope_index(1), 1)
        self.assertEqual(disc_sets.envelope_index(3), 2)
        self.assertEqual(disc_sets.envelope_index(7), 3)

    def test_comparability_on_the_radius(self):
        col = build_collection(Ambient.UNIT_DISC, gauges.unit_stolz_power(1), [Disc(0.9 + 0j, 0.001)])
        self.assertAlmostEqual(disc_sets.comparability_constant(col), 1.0, places=12)

    def test_stolz_constant(self):
        d = Disc(0.9 + 0j, 0.001)
        self.assertAlmostEqual(disc_sets.stolz_constant_disc(d, 1), 0.2 / 0.101, places=9)
        col = build_collection(Ambient.UNIT_DISC, gauges.unit_stolz_power(2), [d, Disc(0.5j, 0.01)])
        self.assertGreaterEqual(disc_sets.stolz_constant(col, 2), disc_sets.stolz_constant_disc(d, 2))
