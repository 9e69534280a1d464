import math

from django.test import SimpleTestCase

from esetlab.utils import EXPERIMENT_IDS, ExperimentConfig
from exceptional_sets.exceptions import BoundViolation, InvalidInput
from exceptional_sets.experiments import EXPERIMENTS, THEOREM_EXPERIMENTS, run_experiment


class RegistryTests(SimpleTestCase):
    def test_every_experiment_is_registered(self):
        self.assertEqual(set(EXPERIMENTS), set(EXPERIMENT_IDS))
        self.assertTrue(set(THEOREM_EXPERIMENTS.values()) <= set(EXPERIMENTS))

    def test_unknown_experiment(self):
        with self.assertRaises(InvalidInput):
            run_experiment(ExperimentConfig("nope"))

    def test_randomized_experiment_needs_seed(self):
        with self.assertRaises(InvalidInput):
            run_experiment(ExperimentConfig("intervals"))


class DeterministicExperimentTests(SimpleTestCase):
    def test_cantor(self):
        result = run_experiment(ExperimentConfig("cantor"))
        self.assertTrue(result.passed)
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(result.metrics["discs"], 2**13 - 2)
        self.assertAlmostEqual(result.metrics["projection_measure"], 4 / 3, places=9)
        self.assertIn("collection.json", result.artifacts)

    def test_examples(self):
        result = run_experiment(ExperimentConfig("examples", params={"sizes": [5, 10, 20]}))
        self.assertTrue(result.passed)
        self.assertTrue(result.metrics["example1"]["meets_all"])
        self.assertEqual(result.metrics["example2"]["met"], [5] * 5)
        self.assertTrue(result.metrics["example2"]["increasing"])

    def test_avoidance(self):
        result = run_experiment(ExperimentConfig("avoidance"))
        self.assertTrue(result.passed)
        self.assertGreater(result.metrics["plane"]["R"], 2.0)
        self.assertLess(result.metrics["unit_disc"]["limsup"], 1.0)

    def test_theorem3(self):
        result = run_experiment(ExperimentConfig("theorem3", generator={"n_max": 500}))
        self.assertTrue(result.passed)
        self.assertAlmostEqual(result.metrics["ratio_at_check"], 8.0, delta=0.08)
        self.assertLess(result.metrics["tail_increment"], 1e-6)

    def test_theorem3_tolerances(self):
        params = {"n_check": 10}
        generator = {"n_max": 50}
        loose = run_experiment(ExperimentConfig("theorem3", generator=generator, params=params))
        self.assertTrue(loose.metrics["ratio_ok"])
        self.assertFalse(loose.metrics["increment_ok"])
        tight = run_experiment(
            ExperimentConfig("theorem3", generator=generator, params=params, tolerances={"ratio": 1e-5})
        )
        self.assertFalse(tight.metrics["ratio_ok"])
        relaxed = run_experiment(
            ExperimentConfig("theorem3", generator=generator, params=params, tolerances={"tail_increment": 1.0})
        )
        self.assertTrue(relaxed.metrics["increment_ok"])

    def test_result_payload_has_no_runtime(self):
        result = run_experiment(ExperimentConfig("cantor", generator={"levels": 4}))
        self.assertEqual(set(result.to_dict()), {"experiment", "passed", "metrics"})
        self.assertGreaterEqual(result.runtime, 0.0)


class SeededExperimentTests(SimpleTestCase):
    def test_intervals(self):
        result = run_experiment(ExperimentConfig("intervals", seed=10, params={"trials": 200}))
        self.assertTrue(result.passed)
        self.assertLessEqual(result.metrics["worst_error"], 1e-5)

    def test_intervals_are_reproducible(self):
        config = ExperimentConfig("intervals", seed=3, params={"trials": 50})
        self.assertEqual(run_experiment(config).to_dict(), run_experiment(config).to_dict())

    def test_cartan(self):
        config = ExperimentConfig("cartan", seed=6, samples={"outside": 200}, params={"sets": 10, "mu_max": 15})
        result = run_experiment(config)
        self.assertTrue(result.passed)
        self.assertEqual(result.metrics["radius_violations"], 0)
        self.assertGreater(result.metrics["worst_margin"], 0.0)

    def test_theorem1(self):
        config = ExperimentConfig(
            "theorem1", seed=1, generator={"count": 60}, samples={"monte_carlo": 300}
        )
        result = run_experiment(config)
        self.assertTrue(result.passed)
        self.assertLessEqual(result.metrics["exceptional_measure"], result.metrics["exceptional_bound"])
        self.assertLessEqual(result.metrics["projection_integral"], result.metrics["projection_bound"] * (1 + 1e-9))
        self.assertIsNotNone(result.exceptional)
        self.assertEqual(
            set(result.artifacts), {"collection.json", "validation.json", "exceptional.json", "hits.json"}
        )

    def test_theorem2_structure(self):
        config = ExperimentConfig(
            "theorem2", seed=2, generator={"count": 40}, samples={"monte_carlo": 200}
        )
        result = run_experiment(config)
        self.assertEqual(result.metrics["gauge"], "convex_power")
        self.assertEqual(result.metrics["excluded"], 0)

    def test_theorem2_rejects_rapid_gauge(self):
        with self.assertRaises(InvalidInput):
            run_experiment(ExperimentConfig("theorem2", gauge="rapid_power:p=2", seed=1))

    def test_theorem2_5(self):
        result = run_experiment(ExperimentConfig("theorem2.5", seed=3, generator={"n_max": 60}))
        self.assertTrue(result.metrics["technical_ok"])
        self.assertLess(result.metrics["final_envelope_ratio"], 0.1)
        self.assertEqual(set(result.metrics["doubling_type_limits"]), {"1/x", "1/sqrt(x)", "1/log(x)"})

    def test_theorem4_structure(self):
        config = ExperimentConfig(
            "theorem4", seed=4, generator={"count": 40}, samples={"monte_carlo": 200}
        )
        result = run_experiment(config)
        self.assertEqual(result.metrics["discs"], 40)
        self.assertTrue(0.0 <= result.metrics["hit_fraction"] <= 1.0)

    def test_stolz(self):
        result = run_experiment(ExperimentConfig("stolz", seed=5, generator={"count": 40}))
        self.assertTrue(result.passed)
        for gamma in ("1", "2"):
            metrics = result.metrics["gammas"][gamma]
            self.assertEqual(metrics["width_violations"], 0)
            self.assertLessEqual(metrics["comparability_constant"], 2.0 + 1e-9)
        self.assertIn("collection_gamma2.json", result.artifacts)

    def test_logderiv_structure(self):
        config = ExperimentConfig("logderiv", seed=7, samples={"z": 40}, params={"zeros": 20, "radius": 20.0})
        result = run_experiment(config)
        self.assertTrue(result.metrics["tail_sum_ok"])
        self.assertTrue(result.metrics["closed_form_ok"])
        self.assertEqual(result.metrics["samples"], 40)
        self.assertTrue(math.isfinite(result.metrics["empirical_C"]))
        self.assertEqual(set(result.artifacts), {"construction.json", "bound.json"})

    def test_logdiff_structure(self):
        config = ExperimentConfig("logdiff", seed=8, samples={"z": 40}, params={"zeros": 20, "radius": 20.0})
        result = run_experiment(config)
        self.assertEqual(result.metrics["samples"], 40)
        self.assertTrue(result.metrics["geometry_ok"])

    def test_logderiv_disc_structure(self):
        config = ExperimentConfig("logderiv_disc", seed=9, samples={"z": 40}, params={"m_max": 6})
        result = run_experiment(config)
        self.assertEqual(result.metrics["samples"], 40)
        self.assertTrue(result.metrics["geometry_ok"])

    def test_failed_result_exit_code(self):
        result = run_experiment(ExperimentConfig("cantor", generator={"levels": 3}))
        result.passed = False
        self.assertEqual(result.exit_code, BoundViolation.exit_code)
