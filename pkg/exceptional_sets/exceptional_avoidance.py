"""Avoidance of an exceptional set of small density by a shrinking dilation.

If g(r) <= h(r) off E and E has small K-density (plane) or k-density (unit
disc), then g(r) <= h((1 + eps(r))·r), respectively g(r) <= h(s(r)) with
s(r) = 1 - b(r)(1 - r), for every r beyond some R.

g is read at grid points and h through its lower step interpolation, so the
check never passes on interpolation error. R is reported as a grid point: an
upper witness for the true threshold.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from .exceptions import HypothesisFail, InvalidInput, UnsupportedGauge
from .gauges import Gauge, GaugeKind
from .measure_lab import IntervalUnion, gauge_integral, last_decade, tail_integrals

logger = logging.getLogger(__name__)

STEP_RTOL = 1e-9


@dataclass(frozen=True)
class MonotoneSample:
    """A nondecreasing function sampled on a strictly increasing grid."""

    grid: tuple
    values: tuple

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size == 0:
            raise InvalidInput("grid and values must be non-empty and of equal length")
        if np.any(np.diff(grid) <= 0):
            raise InvalidInput("grid must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise InvalidInput("values must be nondecreasing")
        object.__setattr__(self, "grid", tuple(grid.tolist()))
        object.__setattr__(self, "values", tuple(values.tolist()))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], grid) -> "MonotoneSample":
        grid = np.asarray(grid, dtype=float)
        return cls(tuple(grid.tolist()), tuple(np.asarray(func(grid), dtype=float).tolist()))

    def lower(self, x) -> np.ndarray:
        """Value at the largest grid point <= x; -inf before the grid."""
        index = np.searchsorted(self.grid, np.asarray(x, dtype=float), side="right") - 1
        values = np.asarray(self.values)
        return np.where(index >= 0, values[np.clip(index, 0, None)], -np.inf)

    def upper(self, x) -> np.ndarray:
        """Value at the smallest grid point >= x; +inf past the grid."""
        index = np.searchsorted(self.grid, np.asarray(x, dtype=float), side="left")
        values = np.asarray(self.values)
        return np.where(index < len(values), values[np.clip(index, None, len(values) - 1)], np.inf)


@dataclass
class AvoidanceReport:
    R: float
    R_index: int
    violations: List[float]
    density_trajectory: List[float]
    limsup_estimate: float
    nonempty_ok: bool
    interval_step_ok: bool
    checked: int
    flags: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and self.nonempty_ok and self.interval_step_ok

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__, passed=self.passed)


def _check_precondition(g: MonotoneSample, h: MonotoneSample, E: IntervalUnion, grid: np.ndarray) -> None:
    g_values = np.asarray(g.values)
    h_values = h.lower(grid)
    for r, gv, hv in zip(grid, g_values, h_values):
        if not E.contains(r) and gv > hv:
            raise InvalidInput(f"g(r) <= h(r) fails off the exceptional set at r={r}")


def _threshold_index(exceeds: np.ndarray) -> int:
    """First index after the last grid point where the threshold inequality fails."""
    bad = np.flatnonzero(exceeds)
    return int(bad[-1]) + 1 if bad.size else 0


def _finish(
    grid, R_index, g, targets, h, E, ratios, limsup, step_ok, flags
) -> AvoidanceReport:
    g_values = np.asarray(g.values)
    violations: List[float] = []
    nonempty = True
    if R_index >= grid.size:
        flags = flags + ["threshold lies beyond the grid"]
    for i in range(R_index, grid.size):
        if g_values[i] > float(h.lower(targets[i])):
            violations.append(float(grid[i]))
        if E.covers(grid[i], targets[i]):
            nonempty = False
    report = AvoidanceReport(
        R=float(grid[R_index]) if R_index < grid.size else float(np.inf),
        R_index=R_index,
        violations=violations,
        density_trajectory=ratios.tolist(),
        limsup_estimate=limsup,
        nonempty_ok=nonempty,
        interval_step_ok=step_ok,
        checked=grid.size - R_index,
        flags=flags,
    )
    logger.info(f"Avoidance check: R={report.R:.6g}, {len(violations)} violations over {report.checked} points")
    return report


def avoidance_check_plane(
    g: MonotoneSample,
    h: MonotoneSample,
    E: IntervalUnion,
    gauge: Gauge,
    eps_profile: Callable[[float], float],
    alpha: float,
) -> AvoidanceReport:
    grid = np.asarray(g.grid)
    admissible = gauge.kind in (GaugeKind.PLANE_CONSTANT, GaugeKind.PLANE_CONCAVE_IDENTITY) or (
        gauge.is_concave and bool(np.all((gauge(grid) >= 1) & (gauge(grid) <= grid)))
    )
    if not admissible:
        raise UnsupportedGauge(f"{gauge.kind.value} is not an admissible avoidance gauge")
    if alpha < 1:
        raise InvalidInput(f"alpha must be at least 1, got {alpha}")
    eps = np.array([eps_profile(r) for r in grid], dtype=float)
    if np.any(eps <= 0):
        raise InvalidInput("eps(r) must be positive")
    _check_precondition(g, h, E, grid)

    K = gauge(grid)
    tails = tail_integrals(E, gauge, grid)
    ratios = K / grid * tails / eps
    limsup = float(ratios[last_decade(grid, unit=False)].max())
    if limsup >= 1 / alpha:
        raise HypothesisFail(f"K-density estimate {limsup:.6g} is not below 1/alpha = {1 / alpha:.6g}")
    R_index = _threshold_index(alpha * ratios >= 1)

    targets = (1 + eps) * grid
    step_ok = True
    for i in range(R_index, grid.size):
        r, top = grid[i], targets[i]
        integral = float(gauge_integral(IntervalUnion(((r, top),)), gauge))
        middle = eps[i] * r / gauge(top)
        floor = eps[i] * r / (alpha * K[i])
        if integral < middle * (1 - STEP_RTOL) or middle < floor * (1 - STEP_RTOL):
            step_ok = False
            logger.warning(f"Interval step fails at r={r}")
            break
    return _finish(grid, R_index, g, targets, h, E, ratios, limsup, step_ok, ["R is an upper witness"])


def avoidance_check_unitdisc(
    g: MonotoneSample,
    h: MonotoneSample,
    E: IntervalUnion,
    gauge: Gauge,
    b_profile: Callable[[float], float],
) -> AvoidanceReport:
    if gauge.kind is not GaugeKind.UNIT_CONVEX_POWER:
        raise UnsupportedGauge("unit-disc avoidance needs the identity or a convex power gauge")
    grid = np.asarray(g.grid)
    if grid[0] <= 0 or grid[-1] >= 1:
        raise InvalidInput("unit-disc grid must lie in (0, 1)")
    b = np.array([b_profile(r) for r in grid], dtype=float)
    if np.any((b <= 0) | (b >= 1)):
        raise InvalidInput("b(r) must lie in (0, 1)")
    _check_precondition(g, h, E, grid)

    k = gauge(1 - grid)
    tails = tail_integrals(E, gauge, grid)
    ratios = k / (1 - grid) * tails / (1 - b)
    limsup = float(ratios[last_decade(grid, unit=True)].max())
    if limsup >= 1:
        raise HypothesisFail(f"k-density estimate {limsup:.6g} is not below 1")
    R_index = _threshold_index(ratios >= 1)

    targets = 1 - b * (1 - grid)
    step_ok = True
    for i in range(R_index, grid.size):
        r, top = grid[i], targets[i]
        integral = float(gauge_integral(IntervalUnion(((r, top),)), gauge))
        if integral < (top - r) / k[i] * (1 - STEP_RTOL):
            step_ok = False
            logger.warning(f"Interval step fails at r={r}")
            break
    return _finish(grid, R_index, g, targets, h, E, ratios, limsup, step_ok, ["R is an upper witness"])
