"""Interval unions, projection sets, gauge integrals and exceptional c-sets."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from .curve_geometry import Branch, CIntervalReport, CurveFamily, c_interval, meets
from .disc_sets import DiscCollection, envelope_index, stolz_constant
from .exceptions import DomainError, InvalidInput, InvalidInterval, LabError
from .gauges import Ambient, Gauge, GaugeKind
from .numerics import QuadratureResult, adaptive_simpson, parallel_map

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10
QUAD_MAX_EVALUATIONS = 1_000_000
SINGULAR_GAP = 1e-12
MC_CHUNK = 1000


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals; touching intervals are merged."""

    intervals: Tuple[Tuple[float, float], ...] = ()

    @classmethod
    def from_intervals(cls, pairs: Iterable[Tuple[float, float]]) -> "IntervalUnion":
        items = []
        for lo, hi in pairs:
            if not lo < hi:
                raise InvalidInterval(f"interval [{lo}, {hi}] is empty or reversed")
            items.append((float(lo), float(hi)))
        items.sort()
        merged: List[List[float]] = []
        for lo, hi in items:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    def insert(self, lo: float, hi: float) -> "IntervalUnion":
        return IntervalUnion.from_intervals(self.intervals + ((lo, hi),))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.from_intervals(self.intervals + other.intervals)

    @property
    def measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals)

    def clip(self, lo: float = -math.inf, hi: float = math.inf) -> "IntervalUnion":
        kept = []
        for a, b in self.intervals:
            a, b = max(a, lo), min(b, hi)
            if a < b:
                kept.append((a, b))
        return IntervalUnion(tuple(kept))

    def intersect_ray(self, r: float) -> "IntervalUnion":
        """E ∩ [r, ∞)."""
        return self.clip(lo=r)

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def covers(self, lo: float, hi: float) -> bool:
        """True when a single component contains [lo, hi]."""
        return any(a <= lo and hi <= b for a, b in self.intervals)

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def to_list(self) -> List[List[float]]:
        return [[lo, hi] for lo, hi in self.intervals]


def union_insert(iu: IntervalUnion, lo: float, hi: float) -> IntervalUnion:
    return iu.insert(lo, hi)


def measure(iu: IntervalUnion) -> float:
    return iu.measure


def intersect_ray(iu: IntervalUnion, r: float) -> IntervalUnion:
    return iu.intersect_ray(r)


class Projection(str, Enum):
    MODULUS = "modulus"
    REAL = "real"
    IMAG = "imag"


def projection(col: DiscCollection, along: Projection = Projection.MODULUS, indices=None) -> IntervalUnion:
    """Union of [s_n - r_n, s_n + r_n]; the modulus projection is clipped to [1,∞) or [0,1)."""
    chosen = range(len(col)) if indices is None else indices
    pairs = []
    for n in chosen:
        d = col.discs[n]
        if along is Projection.REAL:
            s = d.center.real
        elif along is Projection.IMAG:
            s = d.center.imag
        else:
            s = abs(d.center)
        lo, hi = s - d.radius, s + d.radius
        if along is Projection.MODULUS:
            if col.ambient is Ambient.PLANE:
                lo = max(lo, 1.0)
            else:
                lo, hi = max(lo, 0.0), min(hi, 1.0)
        if lo < hi:
            pairs.append((lo, hi))
    return IntervalUnion.from_intervals(pairs)


def _integrand(gauge: Gauge) -> Callable[[float], float]:
    if gauge.is_unit:
        return lambda x: 1.0 / gauge(1.0 - x)
    return lambda x: 1.0 / gauge(x)


def gauge_integral(E: IntervalUnion, gauge: Gauge) -> QuadratureResult:
    """∫_E dx/g(x) in the plane, ∫_E dx/g(1-x) in the unit disc.

    Unit-disc intervals reaching 1 are integrated up to 1 - 1e-12 and the
    result is marked as a lower bound.
    """
    f = _integrand(gauge)
    values, error, evaluations = [], 0.0, 0
    converged, lower_bound = True, False
    for lo, hi in E:
        if gauge.is_unit:
            if lo < 0:
                raise DomainError(f"interval [{lo}, {hi}] leaves [0, 1)")
            if hi > 1 - SINGULAR_GAP:
                logger.warning(f"Interval [{lo}, {hi}] touches the boundary singularity")
                hi = min(hi, 1.0) - SINGULAR_GAP
                lower_bound = True
                if hi <= lo:
                    continue
        elif not (gauge.in_domain(lo) and gauge(lo) > 0):
            raise DomainError(f"interval [{lo}, {hi}] leaves the domain of {gauge.kind.value}")
        part = adaptive_simpson(f, lo, hi, tol=QUAD_TOL, max_evaluations=QUAD_MAX_EVALUATIONS)
        values.append(part.value)
        error += part.error
        evaluations += part.evaluations
        converged = converged and part.converged
    return QuadratureResult(math.fsum(values), error, evaluations, converged, lower_bound)


def exceptional_bound(gauge: Gauge, col: DiscCollection, envelope_M: float = 1.0) -> Optional[float]:
    """Finite bound on the tail c-set measure, when the family has one."""
    if gauge.is_concave:
        return 4 * gauge.doubling_up ** (envelope_index(envelope_M) + 1) * col.epsilon
    if gauge.is_convex_decreasing:
        return 4 * col.epsilon / gauge.doubling_down
    if gauge.kind is GaugeKind.UNIT_STOLZ_POWER:
        return (4 + 2 * stolz_constant(col, gauge.params["gamma"])) * col.epsilon
    return None


@dataclass
class ExceptionalReport:
    union: IntervalUnion
    measure: float
    bound: Optional[float]
    within_bound: Optional[bool]
    partial: bool
    excluded: List[int] = field(default_factory=list)
    width_violations: List[int] = field(default_factory=list)
    reports: List[CIntervalReport] = field(default_factory=list)
    signs: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "measure": self.measure,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "partial": self.partial,
            "excluded": self.excluded,
            "width_violations": self.width_violations,
            "components": len(self.union),
        }


def _branches(gauge: Gauge, branch: Branch) -> List[Branch]:
    if gauge.is_unit:
        return [Branch.UPPER]
    return [Branch.UPPER, Branch.LOWER] if branch is Branch.BOTH else [branch]


def exceptional_c_measure(
    gauge: Gauge,
    phi_or_zeta,
    col: DiscCollection,
    branch: Branch = Branch.BOTH,
    envelope_M: float = 1.0,
) -> ExceptionalReport:
    """Union of the tail c-intervals, compared with the family's measure bound."""
    n_envelope = envelope_index(envelope_M)
    k_comp = stolz_constant(col, gauge.params["gamma"]) if gauge.kind is GaugeKind.UNIT_STOLZ_POWER else None
    reports, signs, excluded, violations, pairs = [], [], [], [], []
    for n in col.tail():
        for b in _branches(gauge, branch):
            try:
                rep = c_interval(gauge, phi_or_zeta, col.discs[n], b, n, n_envelope, k_comp)
            except LabError as e:
                logger.warning(f"Disc {n} excluded from the c-set: {e}")
                excluded.append(n)
                break
            reports.append(rep)
            signs.append(b.signs[0])
            if rep.satisfied is False:
                violations.append(n)
            if rep.c_lo < rep.c_hi:
                pairs.append((rep.c_lo, rep.c_hi))

    union = IntervalUnion.from_intervals(pairs)
    bound = exceptional_bound(gauge, col, envelope_M)
    value = union.measure
    report = ExceptionalReport(
        union=union,
        measure=value,
        bound=bound,
        within_bound=None if bound is None else value <= bound,
        partial=bool(excluded),
        excluded=sorted(set(excluded)),
        width_violations=sorted(set(violations)),
        reports=reports,
        signs=signs,
    )
    logger.info(f"Exceptional c-set measure {value:.6g} (bound {bound}) over {len(col.tail())} tail discs")
    return report


@dataclass
class HitReport:
    samples: int
    hits: int
    fraction: float
    c_range: Tuple[float, float]
    reference_ratio: float
    reference_slack: float
    within_reference: bool
    bound_ratio: Optional[float]
    bound_slack: Optional[float]
    within_bound: Optional[bool]
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__, c_range=list(self.c_range))


def binomial_slack(p: float, samples: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return 3 * math.sqrt(p * (1 - p) / samples)


def _count_chunk(task) -> int:
    gauge, phi_or_zeta, discs, lows, highs, signs, c_range, size, seed = task
    rng = np.random.default_rng(seed)
    cs = rng.uniform(c_range[0], c_range[1], size)
    hits = 0
    for c in cs:
        if c <= 0:
            continue
        for k in np.flatnonzero((lows <= c) & (c <= highs)):
            branch = Branch.UPPER if signs[k] > 0 else Branch.LOWER
            if gauge.is_unit:
                fam = CurveFamily(gauge, float(c), zeta=complex(phi_or_zeta), branch=branch)
            else:
                fam = CurveFamily(gauge, float(c), phi=float(phi_or_zeta), branch=branch)
            if meets(fam, discs[k]):
                hits += 1
                break
    return hits


def monte_carlo_hits(
    gauge: Gauge,
    phi_or_zeta,
    col: DiscCollection,
    c_range: Tuple[float, float],
    samples: int,
    rng_seed: int,
    workers: int = 1,
    branch: Branch = Branch.BOTH,
    envelope_M: float = 1.0,
) -> HitReport:
    """Fraction of uniformly drawn c whose curve meets at least one tail disc.

    Candidate discs for a given c are screened through their c-intervals
    (widened by a relative 1e-6); every counted hit is confirmed by ``meets``.
    Samples are split into fixed chunks with seeds spawned from ``rng_seed``,
    so the count does not depend on ``workers``.
    """
    if samples < 1:
        raise InvalidInput("samples must be at least 1")
    lo, hi = c_range
    if not lo < hi:
        raise InvalidInput(f"bad c range {c_range}")
    exceptional = exceptional_c_measure(gauge, phi_or_zeta, col, branch, envelope_M)
    reps = exceptional.reports
    margin = np.array([1e-6 * max(abs(r.c_hi), 1e-6) for r in reps])
    lows = np.array([r.c_lo for r in reps]) - margin if reps else np.zeros(0)
    highs = np.array([r.c_hi for r in reps]) + margin if reps else np.zeros(0)
    discs = [col.discs[r.disc_index] for r in reps]
    signs = np.array(exceptional.signs)

    n_chunks = math.ceil(samples / MC_CHUNK)
    seeds = np.random.SeedSequence(rng_seed).spawn(n_chunks)
    tasks = [
        (gauge, phi_or_zeta, discs, lows, highs, signs, (lo, hi),
         min(MC_CHUNK, samples - i * MC_CHUNK), seeds[i])
        for i in range(n_chunks)
    ]
    hits = sum(parallel_map(_count_chunk, tasks, workers))
    fraction = hits / samples

    reference = exceptional.union.clip(lo, hi).measure / (hi - lo)
    ref_slack = binomial_slack(reference, samples)
    bound_ratio = bound_slack = within_bound = None
    if exceptional.bound is not None:
        bound_ratio = min(exceptional.bound / (hi - lo), 1.0)
        bound_slack = binomial_slack(bound_ratio, samples)
        within_bound = fraction <= bound_ratio + bound_slack
    report = HitReport(
        samples=samples,
        hits=hits,
        fraction=fraction,
        c_range=(lo, hi),
        reference_ratio=reference,
        reference_slack=ref_slack,
        within_reference=fraction <= reference + ref_slack,
        bound_ratio=bound_ratio,
        bound_slack=bound_slack,
        within_bound=within_bound,
        seed=rng_seed,
    )
    logger.info(f"Monte Carlo: {hits}/{samples} sampled curves meet the tail")
    return report


@dataclass
class DensityReport:
    r_grid: List[float]
    tail_values: List[float]
    ratio_values: List[float]
    limsup_estimate: float

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def tail_integrals(E: IntervalUnion, gauge: Gauge, r_grid) -> np.ndarray:
    """∫_{E∩[r,∞)} (plane) or ∫_{E∩[r,1)} (unit disc) of the gauge weight, per grid point."""
    r_grid = np.asarray(r_grid, dtype=float)
    pieces = list(E)
    full = [float(gauge_integral(IntervalUnion((p,)), gauge)) for p in pieces]
    out = np.zeros(r_grid.size)
    for i, r in enumerate(r_grid):
        total = []
        for (lo, hi), value in zip(pieces, full):
            if lo >= r:
                total.append(value)
            elif hi > r:
                total.append(float(gauge_integral(IntervalUnion(((r, hi),)), gauge)))
        out[i] = math.fsum(total)
    return out


def last_decade(r_grid: np.ndarray, unit: bool) -> np.ndarray:
    if unit:
        mask = (1 - r_grid) <= 10 * (1 - r_grid[-1])
    else:
        mask = r_grid >= r_grid[-1] / 10
    if not mask.any():
        mask[-1] = True
    return mask


def k_density(E: IntervalUnion, gauge: Gauge, eps_profile, r_grid) -> DensityReport:
    """K-density ratios (plane) or k-density ratios with profile b(r) (unit disc)."""
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0:
        raise InvalidInput("k_density needs a non-empty grid")
    profile = np.asarray([eps_profile(x) for x in r], dtype=float)
    tails = tail_integrals(E, gauge, r)
    if gauge.is_unit:
        if np.any((profile <= 0) | (profile >= 1)):
            raise InvalidInput("b(r) must lie in (0, 1)")
        ratios = gauge(1 - r) / (1 - r) * tails / (1 - profile)
    else:
        if np.any(profile <= 0):
            raise InvalidInput("eps(r) must be positive")
        ratios = gauge(r) / r * tails / profile
    limsup = float(ratios[last_decade(r, gauge.is_unit)].max())
    return DensityReport(r.tolist(), tails.tolist(), ratios.tolist(), limsup)
