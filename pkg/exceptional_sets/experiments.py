"""Experiment registry: each entry builds an instance from a config, runs the
relevant checks and returns metrics plus the artifacts to write."""

import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from django.conf import settings

from esetlab.utils import ExperimentConfig

from . import gauges
from .curve_geometry import Branch, CurveFamily, meets, width_trend_rapid
from .disc_sets import (
    cantor_nesting_ok,
    comparability_constant,
    diameter_sum,
    gen_cantor_rset,
    gen_example1,
    gen_example2,
    gen_horocycle_lset,
    gen_random,
    gen_rapid_instance,
    horocycle_gap,
    horocycle_radii,
    stolz_constant,
    validate,
)
from .exceptional_avoidance import MonotoneSample, avoidance_check_plane, avoidance_check_unitdisc
from .exceptions import BoundViolation, InvalidInput
from .gauges import Ambient
from .logderiv_bounds import (
    ZeroPoleData,
    admissible_samples,
    build_exceptional_set,
    cartan_discs,
    check_logderiv_bound,
    check_logderiv_bound_unitdisc,
    check_logdiff_bound,
)
from .measure_lab import (
    ExceptionalReport,
    IntervalUnion,
    Projection,
    exceptional_c_measure,
    gauge_integral,
    k_density,
    monte_carlo_hits,
    projection,
)

logger = logging.getLogger(__name__)

# verify --theorem <key>
THEOREM_EXPERIMENTS = {
    "1": "theorem1",
    "2": "theorem2",
    "2.5": "theorem2.5",
    "3": "theorem3",
    "4": "theorem4",
    "stolz": "stolz",
}


@dataclass
class ExperimentResult:
    experiment: str
    passed: bool
    metrics: Dict[str, Any]
    artifacts: Dict[str, Any] = field(default_factory=dict)
    runtime: float = 0.0
    exceptional: Optional[ExceptionalReport] = None

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else BoundViolation.exit_code

    def to_dict(self) -> Dict[str, Any]:
        # runtime stays out so identical runs give identical files
        return {"experiment": self.experiment, "passed": self.passed, "metrics": self.metrics}

    def to_row(self) -> Dict[str, Any]:
        """One flat record: nested metrics get dotted keys, lists are JSON encoded."""
        row: Dict[str, Any] = {"experiment": self.experiment, "passed": self.passed}

        def walk(prefix: str, value: Any) -> None:
            if isinstance(value, dict):
                for key in sorted(value):
                    walk(f"{prefix}.{key}" if prefix else str(key), value[key])
            elif isinstance(value, (list, tuple)):
                row[prefix] = json.dumps(value)
            else:
                row[prefix] = value

        walk("", self.metrics)
        return row


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig], ExperimentResult]] = {}


def experiment(name: str):
    def register(func: Callable[[ExperimentConfig], ExperimentResult]):
        EXPERIMENTS[name] = func
        return func

    return register


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    try:
        runner = EXPERIMENTS[config.experiment]
    except KeyError as e:
        raise InvalidInput(f"Unknown experiment {config.experiment!r}") from e
    logger.info(f"Running experiment {config.experiment} (seed {config.seed})")
    start = time.perf_counter()
    result = runner(config)
    result.runtime = time.perf_counter() - start
    logger.info(
        f"Experiment {config.experiment} {'passed' if result.passed else 'FAILED'} in {result.runtime:.2f}s"
    )
    return result


def _gauge(config: ExperimentConfig, default: str) -> gauges.Gauge:
    return gauges.from_spec(config.gauge if config.gauge is not None else default)


def _workers(config: ExperimentConfig) -> int:
    return int(config.params.get("workers", settings.LAB["workers"]))


def _seed(config: ExperimentConfig) -> int:
    if config.seed is None:
        raise InvalidInput(f"{config.experiment} needs a seed")
    return config.seed


# Curve families in the plane and in the unit disc


def _projection_bound(gauge: gauges.Gauge, col) -> float:
    """sum over the tail of 2·alpha·r/K(|z|) (concave) or 2·r/(beta·L(|z|)) (convex)."""
    terms = []
    for n in col.tail():
        d = col.discs[n]
        if gauge.is_concave:
            terms.append(2 * gauge.doubling_up * d.radius / gauge(abs(d.center)))
        else:
            terms.append(2 * d.radius / (gauge.doubling_down * gauge(abs(d.center))))
    return math.fsum(terms)


def _plane_theorem(config: ExperimentConfig, default_gauge: str) -> ExperimentResult:
    gauge = _gauge(config, default_gauge)
    if not (gauge.is_concave or gauge.is_convex_decreasing):
        raise InvalidInput(f"{config.experiment} needs a concave or decreasing convex plane gauge")
    seed = _seed(config)
    gen = config.generator
    envelope_M = float(gen.get("envelope_M", 1.0))
    col = gen_random(
        Ambient.PLANE,
        gauge,
        int(gen.get("count", 500)),
        float(gen.get("epsilon", 1e-3)),
        envelope_M,
        seed,
        x_max=float(gen.get("x_max", 1e6)),
    )
    validation = validate(col)
    phi = float(config.params.get("phi", 0.0))
    exceptional = exceptional_c_measure(gauge, phi, col, Branch.BOTH, envelope_M)
    c_range = tuple(config.params.get("c_range", [0.1, 10.0]))
    hits = monte_carlo_hits(
        gauge, phi, col, c_range, config.sample_count("monte_carlo"), seed,
        workers=_workers(config), envelope_M=envelope_M,
    )

    E = projection(col, indices=col.tail())
    integral = gauge_integral(E, gauge)
    bound = _projection_bound(gauge, col)
    projection_ok = integral.value <= bound * (1 + 1e-9)

    passed = (
        validation.valid
        and not exceptional.partial
        and bool(exceptional.within_bound)
        and not exceptional.width_violations
        and hits.within_reference
        and bool(hits.within_bound)
        and projection_ok
    )
    metrics = {
        "gauge": gauge.kind.value,
        "discs": len(col),
        "tail_index": col.tail_index,
        "tail_sum": validation.tail_sum,
        "exceptional_measure": exceptional.measure,
        "exceptional_bound": exceptional.bound,
        "width_violations": len(exceptional.width_violations),
        "excluded": len(exceptional.excluded),
        "hit_fraction": hits.fraction,
        "hit_bound": None if hits.bound_ratio is None else hits.bound_ratio + hits.bound_slack,
        "projection_integral": integral.value,
        "projection_bound": bound,
    }
    artifacts = {
        "collection.json": col.to_dict(),
        "validation.json": validation.to_dict(),
        "exceptional.json": exceptional.to_dict(),
        "hits.json": hits.to_dict(),
    }
    return ExperimentResult(config.experiment, passed, metrics, artifacts, exceptional=exceptional)


@experiment("theorem1")
def theorem1(config: ExperimentConfig) -> ExperimentResult:
    return _plane_theorem(config, "concave_power:a=0.5")


@experiment("theorem2")
def theorem2(config: ExperimentConfig) -> ExperimentResult:
    return _plane_theorem(config, "convex_power:p=1")


@experiment("theorem2.5")
def theorem2_5(config: ExperimentConfig) -> ExperimentResult:
    gauge = _gauge(config, "rapid_power:p=2")
    col = gen_rapid_instance(int(config.generator.get("n_max", 400)), _seed(config))
    trend = width_trend_rapid(gauge, col)
    grid = gauges.default_grid(gauge)
    profiles = gauges.verify_doubling_type_profiles(gauge, float(config.params.get("gamma", 2.0)), grid)
    widths = [w for w in trend.widths if math.isfinite(w)]
    passed = trend.passed and all(r.converged for r in profiles.values())
    metrics = {
        "discs": len(col),
        "technical_ok": trend.technical_ok,
        "initial_width": widths[0] if widths else None,
        "final_width": widths[-1] if widths else None,
        "final_envelope_ratio": trend.envelope[-1] / trend.envelope[0] if trend.envelope else None,
        "failures": trend.failures,
        "doubling_type_limits": {name: r.limits for name, r in profiles.items()},
        "flags": trend.flags,
    }
    return ExperimentResult(config.experiment, passed, metrics, {"collection.json": col.to_dict()})


@experiment("theorem3")
def theorem3(config: ExperimentConfig) -> ExperimentResult:
    n_check = int(config.params.get("n_check", 100_000))
    n = np.arange(1, n_check + 1, dtype=float)
    radii, gaps = horocycle_radii(n), horocycle_gap(n)
    ratio = float(radii[-1] / gaps[-1] * math.log1p(n_check) ** 2)
    increment = float(radii[-1] / math.sqrt(gaps[-1]))

    gauge = gauges.unit_concave_power(0.5)
    col = gen_horocycle_lset(
        int(config.generator.get("n_max", 2000)), float(config.generator.get("epsilon", 1e-3))
    )
    validation = validate(col)
    exceptional = exceptional_c_measure(gauge, 1 + 0j, col)
    profiles = gauges.verify_doubling_type_profiles(gauge, 2.0, gauges.default_grid(gauge))

    ratio_ok = abs(ratio - 8) <= config.tolerance("ratio", 0.01) * 8
    increment_ok = increment < config.tolerance("tail_increment", 1e-6)
    passed = ratio_ok and increment_ok and validation.valid and not exceptional.partial and all(
        r.converged for r in profiles.values()
    )
    metrics = {
        "ratio_at_check": ratio,
        "ratio_ok": ratio_ok,
        "tail_increment": increment,
        "increment_ok": increment_ok,
        "tail_sum": validation.tail_sum,
        "discs": len(col),
        "exceptional_measure": exceptional.measure,
        "excluded": len(exceptional.excluded),
        "doubling_type_limits": {name: r.limits for name, r in profiles.items()},
    }
    return ExperimentResult(config.experiment, passed, metrics, {"collection.json": col.to_dict()})


@experiment("theorem4")
def theorem4(config: ExperimentConfig) -> ExperimentResult:
    gauge = _gauge(config, "unit_convex_power:a=2")
    if gauge.kind is not gauges.GaugeKind.UNIT_CONVEX_POWER:
        raise InvalidInput("theorem4 needs a unit convex power gauge")
    seed = _seed(config)
    gen = config.generator
    envelope_M = float(gen.get("envelope_M", 2.0))
    col = gen_random(
        Ambient.UNIT_DISC, gauge, int(gen.get("count", 500)), float(gen.get("epsilon", 1e-3)), envelope_M, seed
    )
    validation = validate(col)
    exceptional = exceptional_c_measure(gauge, 1 + 0j, col, envelope_M=envelope_M)
    c_range = tuple(config.params.get("c_range", [10.0, 1000.0]))
    hits = monte_carlo_hits(
        gauge, 1 + 0j, col, c_range, config.sample_count("monte_carlo"), seed,
        workers=_workers(config), envelope_M=envelope_M,
    )
    profiles = gauges.verify_doubling_type_profiles(gauge, 2.0, gauges.default_grid(gauge))
    passed = (
        validation.valid
        and not exceptional.partial
        and hits.within_reference
        and all(r.converged for r in profiles.values())
    )
    metrics = {
        "discs": len(col),
        "tail_index": col.tail_index,
        "tail_sum": validation.tail_sum,
        "exceptional_measure": exceptional.measure,
        "excluded": len(exceptional.excluded),
        "hit_fraction": hits.fraction,
        "reference_ratio": hits.reference_ratio,
        "doubling_type_limits": {name: r.limits for name, r in profiles.items()},
    }
    artifacts = {"collection.json": col.to_dict(), "hits.json": hits.to_dict()}
    return ExperimentResult(config.experiment, passed, metrics, artifacts, exceptional=exceptional)


@experiment("stolz")
def stolz(config: ExperimentConfig) -> ExperimentResult:
    seed = _seed(config)
    gen = config.generator
    envelope_M = float(gen.get("envelope_M", 2.0))
    passed = True
    per_gamma: Dict[str, Any] = {}
    artifacts: Dict[str, Any] = {}
    for gamma in config.params.get("gammas", [1.0, 2.0]):
        gauge = gauges.unit_stolz_power(float(gamma))
        col = gen_random(
            Ambient.UNIT_DISC, gauge, int(gen.get("count", 200)), float(gen.get("epsilon", 1e-3)), envelope_M, seed
        )
        validation = validate(col)
        exceptional = exceptional_c_measure(gauge, 1 + 0j, col, envelope_M=envelope_M)
        ok = (
            validation.valid
            and not exceptional.partial
            and not exceptional.width_violations
            and bool(exceptional.within_bound)
        )
        passed = passed and ok
        per_gamma[f"{float(gamma):g}"] = {
            "comparability_constant": comparability_constant(col),
            "stolz_constant": stolz_constant(col, float(gamma)),
            "exceptional_measure": exceptional.measure,
            "exceptional_bound": exceptional.bound,
            "width_violations": len(exceptional.width_violations),
            "passed": ok,
        }
        artifacts[f"collection_gamma{float(gamma):g}.json"] = col.to_dict()
    return ExperimentResult(config.experiment, passed, {"gammas": per_gamma}, artifacts)


# Cartan discs and logarithmic derivatives


def _outside_samples(rng: np.random.Generator, points: np.ndarray, discs, d: float, count: int) -> np.ndarray:
    """Uniform points of a box around the point set that avoid every disc."""
    pad = 2 * d + 1.0
    lo = complex(points.real.min() - pad, points.imag.min() - pad)
    hi = complex(points.real.max() + pad, points.imag.max() + pad)
    centers = np.array([disc.center for disc in discs])
    radii = np.array([disc.radius for disc in discs])
    chosen: List[np.ndarray] = []
    have = 0
    while have < count:
        zs = rng.uniform(lo.real, hi.real, 2 * count) + 1j * rng.uniform(lo.imag, hi.imag, 2 * count)
        if centers.size:
            zs = zs[~(np.abs(zs[:, None] - centers[None, :]) <= radii[None, :]).any(axis=1)]
        chosen.append(zs)
        have += zs.size
    return np.concatenate(chosen)[:count]


@experiment("cartan")
def cartan(config: ExperimentConfig) -> ExperimentResult:
    seed = _seed(config)
    sets = int(config.params.get("sets", 200))
    mu_max = int(config.params.get("mu_max", 50))
    outside = config.sample_count("outside")
    radius_violations, distance_violations, worst_margin = 0, 0, math.inf
    for child in np.random.SeedSequence(seed).spawn(sets):
        rng = np.random.default_rng(child)
        mu = int(rng.integers(1, mu_max + 1))
        points = rng.uniform(-10, 10, mu) + 1j * rng.uniform(-10, 10, mu)
        d = float(rng.uniform(0.1, 2.0))
        discs = cartan_discs(points, d)
        if math.fsum(disc.radius for disc in discs) > 2 * d * (1 + 1e-12):
            radius_violations += 1
        zs = _outside_samples(rng, points, discs, d, outside)
        distances = np.sort(np.abs(zs[:, None] - points[None, :]), axis=1)
        floors = np.arange(1, mu + 1) * d / mu
        margin = distances - floors[None, :]
        distance_violations += int(np.count_nonzero((margin <= 0).any(axis=1)))
        worst_margin = min(worst_margin, float(margin.min()))
    passed = radius_violations == 0 and distance_violations == 0
    metrics = {
        "sets": sets,
        "outside_samples": outside,
        "radius_violations": radius_violations,
        "distance_violations": distance_violations,
        "worst_margin": worst_margin,
    }
    return ExperimentResult(config.experiment, passed, metrics)


def _seeded_zeros(seed: int, count: int, radius: float) -> ZeroPoleData:
    rng = np.random.default_rng(seed)
    moduli = radius * np.sqrt(rng.uniform(0, 1, count))
    zeros = moduli * np.exp(2j * math.pi * rng.uniform(0, 1, count))
    return ZeroPoleData.from_lists(zeros=zeros.tolist())


def _bound_metrics(construction, report) -> Dict[str, Any]:
    return {
        "nu0": construction.nu0,
        "discs": len(construction.discs),
        "realized_tail": construction.realized_tail,
        "bound_tail": construction.bound_tail,
        "closed_form_tail": construction.closed_form_tail,
        "tail_sum_ok": construction.tail_sum_ok,
        "closed_form_ok": construction.closed_form_ok,
        "side_conditions_ok": construction.side_conditions_ok,
        "geometry_ok": construction.geometry_ok,
        "samples": len(report.samples),
        "empirical_C": report.empirical_C,
        "half_C": report.half_C,
        "stability": report.stability,
        "violations": len(report.violations),
    }


def _plane_construction(config: ExperimentConfig):
    p = config.params
    f = _seeded_zeros(_seed(config), int(p.get("zeros", 100)), float(p.get("radius", 50.0)))
    gauge = _gauge(config, "concave_power:a=0.75")
    alpha = float(p.get("alpha", 2.0))
    return f, gauge, alpha


@experiment("logderiv")
def logderiv(config: ExperimentConfig) -> ExperimentResult:
    f, gauge, alpha = _plane_construction(config)
    k, j = int(config.params.get("k", 1)), int(config.params.get("j", 0))
    construction = build_exceptional_set(f, j, alpha, gauge)
    zs = admissible_samples(construction, config.sample_count("z"), _seed(config))
    report = check_logderiv_bound(f, k, j, alpha, gauge, zs, construction)
    passed = report.passed and construction.tail_sum_ok and construction.closed_form_ok and construction.geometry_ok
    artifacts = {"construction.json": construction.to_dict(), "bound.json": report.to_dict()}
    return ExperimentResult(config.experiment, passed, _bound_metrics(construction, report), artifacts)


@experiment("logdiff")
def logdiff(config: ExperimentConfig) -> ExperimentResult:
    f, gauge, alpha = _plane_construction(config)
    re, im = config.params.get("shift", [1.0, 0.0])
    shift = complex(re, im)
    construction = build_exceptional_set(f, 0, alpha, gauge)
    zs = admissible_samples(construction, config.sample_count("z"), _seed(config), shift=shift)
    report = check_logdiff_bound(f, shift, alpha, gauge, zs, construction)
    passed = report.passed and construction.tail_sum_ok and construction.closed_form_ok and construction.geometry_ok
    artifacts = {"construction.json": construction.to_dict(), "bound.json": report.to_dict()}
    return ExperimentResult(config.experiment, passed, _bound_metrics(construction, report), artifacts)


@experiment("logderiv_disc")
def logderiv_disc(config: ExperimentConfig) -> ExperimentResult:
    p = config.params
    m_max = int(p.get("m_max", 12))
    f = ZeroPoleData.from_lists(zeros=[1 - 2.0**-m for m in range(1, m_max + 1)])
    gauge = _gauge(config, "unit_convex_power:a=1")
    alpha, b = float(p.get("alpha", 2.0)), float(p.get("b", 0.5))
    k, j = int(p.get("k", 1)), int(p.get("j", 0))
    construction = build_exceptional_set(f, j, alpha, gauge, b)
    zs = admissible_samples(construction, config.sample_count("z"), _seed(config))
    report = check_logderiv_bound_unitdisc(f, k, j, alpha, b, gauge, zs, construction)
    passed = (
        report.passed
        and construction.side_conditions_ok
        and construction.tail_sum_ok
        and construction.geometry_ok
    )
    artifacts = {"construction.json": construction.to_dict(), "bound.json": report.to_dict()}
    return ExperimentResult(config.experiment, passed, _bound_metrics(construction, report), artifacts)


# Deterministic instances


@experiment("avoidance")
def avoidance(config: ExperimentConfig) -> ExperimentResult:
    plane_E, plane_gauge, plane_eps = IntervalUnion(((2.0, 3.0),)), gauges.constant(), lambda r: 1 / r
    plane_grid = np.logspace(0, 4, int(config.params.get("plane_points", 400)))
    identity_sample = MonotoneSample.from_function(lambda r: r, plane_grid)
    plane = avoidance_check_plane(
        identity_sample,
        identity_sample,
        plane_E,
        plane_gauge,
        plane_eps,
        1.0,
    )

    m_max = int(config.params.get("m_max", 20))
    E = IntervalUnion.from_intervals((1 - 2.0**-m, 1 - 2.0**-m + 4.0**-m) for m in range(1, m_max + 1))
    unit_grid = 1 - 2.0 ** -np.linspace(2, m_max, int(config.params.get("unit_points", 400)))
    blowup = MonotoneSample.from_function(lambda r: 1 / (1 - r), unit_grid)
    unit_gauge = gauges.unit_convex_power(1.0)

    def b_profile(r):
        return 1 - min(0.5, 4 * (1 - r))

    unit = avoidance_check_unitdisc(blowup, blowup, E, unit_gauge, b_profile)
    passed = plane.passed and unit.passed
    metrics = {
        "plane": {"R": plane.R, "violations": len(plane.violations), "limsup": plane.limsup_estimate},
        "unit_disc": {"R": unit.R, "violations": len(unit.violations), "limsup": unit.limsup_estimate},
    }
    artifacts = {
        "avoidance_plane.json": plane.to_dict(),
        "avoidance_unit_disc.json": unit.to_dict(),
        "density_plane.json": k_density(plane_E, plane_gauge, plane_eps, plane_grid).to_dict(),
        "density_unit_disc.json": k_density(E, unit_gauge, b_profile, unit_grid).to_dict(),
    }
    return ExperimentResult(config.experiment, passed, metrics, artifacts)


@experiment("cantor")
def cantor(config: ExperimentConfig) -> ExperimentResult:
    levels = int(config.generator.get("levels", 12))
    col = gen_cantor_rset(levels)
    total = diameter_sum(col)
    expected = 4 * (1 - (2 / 3) ** levels)
    covered = projection(col, Projection.REAL).measure
    nested = cantor_nesting_ok(levels)
    tol = config.tolerance("diameter_sum", 1e-9)
    passed = abs(total - expected) <= tol and abs(covered - 4 / 3) <= tol and nested
    metrics = {
        "discs": len(col),
        "diameter_sum": total,
        "expected_diameter_sum": expected,
        "projection_measure": covered,
        "nested": nested,
    }
    return ExperimentResult(config.experiment, passed, metrics, {"collection.json": col.to_dict()})


@experiment("examples")
def examples(config: ExperimentConfig) -> ExperimentResult:
    sizes = config.params.get("sizes", [5, 10, 20])
    metrics: Dict[str, Any] = {}
    passed = True
    # past this size the rounding of the centers exceeds the radii 2^(-n-k)
    checked = int(config.params.get("meets_size", min(sizes)))
    for name, generator in (("example1", gen_example1), ("example2", gen_example2)):
        sums = [diameter_sum(generator(s, s)) for s in sizes]
        col = generator(checked, checked)
        # row n of the collection lies on curve n of the family
        met = [
            sum(meets(_example_curve(name, n), col.discs[(n - 1) * checked + k]) for k in range(checked))
            for n in range(1, checked + 1)
        ]
        increasing = all(a < b for a, b in zip(sums, sums[1:]))
        meets_all = all(count == checked for count in met)
        ok = increasing and sums[-1] < 2 and meets_all
        passed = passed and ok
        metrics[name] = {"diameter_sums": sums, "increasing": increasing, "meets_all": meets_all, "met": met}
    return ExperimentResult(config.experiment, passed, metrics)


def _example_curve(name: str, n: int) -> CurveFamily:
    """The ray arg z = 1/n as y = tan(1/n)·x, or the line y = 1/n."""
    if name == "example1":
        return CurveFamily(gauges.identity(), math.tan(1 / n))
    return CurveFamily(gauges.constant(), 1 / n)


@experiment("intervals")
def intervals(config: ExperimentConfig) -> ExperimentResult:
    rng = np.random.default_rng(_seed(config))
    trials = int(config.params.get("trials", 1000))
    span = 10.0
    worst = 0.0
    for _ in range(trials):
        count = int(rng.integers(1, 20))
        lows = rng.uniform(0, span, count)
        highs = lows + rng.uniform(1e-6, 2.0, count)
        union = IntervalUnion.from_intervals(zip(lows, highs))
        # brute force over the elementary segments cut by every endpoint
        cuts = np.unique(np.concatenate([lows, highs]))
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        inside = ((mids[:, None] >= lows[None, :]) & (mids[:, None] <= highs[None, :])).any(axis=1)
        brute = math.fsum(np.diff(cuts)[inside].tolist())
        worst = max(worst, abs(union.measure - brute))
    passed = worst <= config.tolerance("measure", 1e-6) * span
    return ExperimentResult(config.experiment, passed, {"trials": trials, "worst_error": worst})
