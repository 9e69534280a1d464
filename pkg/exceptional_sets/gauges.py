"""Catalog of gauge functions and their doubling diagnostics.

Every geometric module consumes gauges only through :class:`Gauge`. The
catalog is closed: each kind carries certified doubling constants, which an
arbitrary callable could not supply.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, InvalidInput, UnsupportedGauge

logger = logging.getLogger(__name__)

RTOL = 1e-12
DEFAULT_GRID_POINTS = 512

ArrayLike = Union[float, np.ndarray]


class Ambient(str, Enum):
    PLANE = "plane"
    UNIT_DISC = "unit_disc"


class GaugeKind(str, Enum):
    PLANE_CONCAVE_IDENTITY = "identity"
    PLANE_CONCAVE_POWER = "concave_power"
    PLANE_CONCAVE_LOG = "log"
    PLANE_CONSTANT = "constant"
    PLANE_CONVEX_POWER = "convex_power"
    PLANE_RAPID_POWER = "rapid_power"
    PLANE_RAPID_XLOG = "rapid_xlog"
    UNIT_CONCAVE_POWER = "unit_concave_power"
    UNIT_CONVEX_POWER = "unit_convex_power"
    UNIT_STOLZ_POWER = "unit_stolz_power"
    # x -> exp(-1/x): continuous and increasing, but without the doubling-type limit
    UNIT_EXP_COUNTEREXAMPLE = "unit_exp"


CONCAVE_KINDS = {
    GaugeKind.PLANE_CONCAVE_IDENTITY,
    GaugeKind.PLANE_CONCAVE_POWER,
    GaugeKind.PLANE_CONCAVE_LOG,
    GaugeKind.PLANE_CONSTANT,
}
RAPID_KINDS = {GaugeKind.PLANE_RAPID_POWER, GaugeKind.PLANE_RAPID_XLOG}
UNIT_KINDS = {
    GaugeKind.UNIT_CONCAVE_POWER,
    GaugeKind.UNIT_CONVEX_POWER,
    GaugeKind.UNIT_STOLZ_POWER,
    GaugeKind.UNIT_EXP_COUNTEREXAMPLE,
}


@dataclass(frozen=True)
class Gauge:
    """A named gauge with its domain and certified constants."""

    kind: GaugeKind
    params: Dict[str, float] = field(default_factory=dict)
    x0: float = 0.0
    R_threshold: float = 1.0
    doubling_up: Optional[float] = None
    doubling_down: Optional[float] = None
    tau: Optional[float] = None

    @property
    def ambient(self) -> Ambient:
        return Ambient.UNIT_DISC if self.kind in UNIT_KINDS else Ambient.PLANE

    @property
    def is_concave(self) -> bool:
        return self.kind in CONCAVE_KINDS

    @property
    def is_convex_decreasing(self) -> bool:
        return self.kind is GaugeKind.PLANE_CONVEX_POWER

    @property
    def is_rapid(self) -> bool:
        return self.kind in RAPID_KINDS

    @property
    def is_unit(self) -> bool:
        return self.kind in UNIT_KINDS

    @property
    def curve_start(self) -> float:
        """Smallest abscissa of the plane curve family y = ±c·g(x)."""
        if self.is_concave:
            return self.x0
        return max(self.x0, self.R_threshold)

    def _formula(self, x: np.ndarray) -> np.ndarray:
        kind, p = self.kind, self.params
        if kind is GaugeKind.PLANE_CONCAVE_IDENTITY:
            return x.copy()
        if kind in (
            GaugeKind.PLANE_CONCAVE_POWER,
            GaugeKind.UNIT_CONCAVE_POWER,
            GaugeKind.UNIT_CONVEX_POWER,
        ):
            return x ** p["a"]
        if kind is GaugeKind.PLANE_CONCAVE_LOG:
            return np.log(x)
        if kind is GaugeKind.PLANE_CONSTANT:
            return np.full_like(x, p.get("value", 1.0))
        if kind is GaugeKind.PLANE_CONVEX_POWER:
            return x ** (-p["p"])
        if kind is GaugeKind.PLANE_RAPID_POWER:
            return x ** p["p"]
        if kind is GaugeKind.PLANE_RAPID_XLOG:
            return x * np.log1p(x)
        if kind is GaugeKind.UNIT_STOLZ_POWER:
            return x ** p["gamma"]
        if kind is GaugeKind.UNIT_EXP_COUNTEREXAMPLE:
            with np.errstate(divide="ignore", over="ignore", under="ignore"):
                return np.exp(-1.0 / x)
        raise UnsupportedGauge(f"Unknown gauge kind {kind}")

    def in_domain(self, x: ArrayLike) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if self.is_unit:
            return (arr > 0) & (arr <= 1)
        if self.kind is GaugeKind.PLANE_CONVEX_POWER:
            return arr > self.x0
        return arr >= self.x0

    def eval(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        if not np.all(self.in_domain(arr)):
            raise DomainError(f"{self.kind.value} evaluated outside its domain: {x!r}")
        out = self._formula(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out

    __call__ = eval

    def tau_for(self, gamma: float) -> float:
        """Doubling-type limit of g(u)/g(u·gamma) as u -> 0+."""
        if self.kind in (GaugeKind.UNIT_CONCAVE_POWER, GaugeKind.UNIT_CONVEX_POWER):
            return gamma ** (-self.params["a"])
        if self.kind is GaugeKind.UNIT_STOLZ_POWER:
            return gamma ** (-self.params["gamma"])
        raise UnsupportedGauge(f"{self.kind.value} has no doubling-type limit")

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "kind": self.kind.value,
            "params": dict(self.params),
            "x0": self.x0,
            "R": self.R_threshold,
        }
        if self.doubling_up is not None:
            payload["alpha"] = self.doubling_up
        if self.doubling_down is not None:
            payload["beta"] = self.doubling_down
        if self.tau is not None:
            payload["tau"] = self.tau
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "Gauge":
        return from_spec({"kind": payload["kind"], "params": payload.get("params", {})})


# Catalog constructors


def identity() -> Gauge:
    return Gauge(GaugeKind.PLANE_CONCAVE_IDENTITY, {}, 0.0, 1.0, doubling_up=2.0)


def concave_power(a: float) -> Gauge:
    if not 0 < a < 1:
        raise InvalidInput(f"concave power needs a in (0,1), got {a}")
    return Gauge(GaugeKind.PLANE_CONCAVE_POWER, {"a": a}, 0.0, 1.0, doubling_up=2.0**a)


def concave_log(alpha: float = 1.1) -> Gauge:
    """log x; doubling with constant alpha holds from x = 2^(1/(alpha-1)) on."""
    if not 1 < alpha <= 2:
        raise InvalidInput(f"log gauge needs alpha in (1,2], got {alpha}")
    R = 2.0 ** (1.0 / (alpha - 1.0))
    return Gauge(GaugeKind.PLANE_CONCAVE_LOG, {"alpha": alpha}, 1.0, R, doubling_up=alpha)


def constant(value: float = 1.0) -> Gauge:
    if value <= 0:
        raise InvalidInput("constant gauge must be positive")
    return Gauge(GaugeKind.PLANE_CONSTANT, {"value": value}, 0.0, 1.0, doubling_up=1.0)


def convex_power(p: float) -> Gauge:
    if p <= 0:
        raise InvalidInput(f"convex power needs p > 0, got {p}")
    return Gauge(GaugeKind.PLANE_CONVEX_POWER, {"p": p}, 0.0, 1.0, doubling_down=2.0**-p)


def rapid_power(p: float) -> Gauge:
    if p <= 1:
        raise InvalidInput(f"rapid power needs p > 1, got {p}")
    return Gauge(GaugeKind.PLANE_RAPID_POWER, {"p": p}, 0.0, 1.0, doubling_up=1.0)


def rapid_xlog() -> Gauge:
    R = brentq(lambda x: x * math.log1p(x) - 1.0, 0.5, 2.0, xtol=1e-14)
    return Gauge(GaugeKind.PLANE_RAPID_XLOG, {}, 0.0, max(R, 1.0), doubling_up=1.0)


def unit_concave_power(a: float) -> Gauge:
    if not 0 < a < 1:
        raise InvalidInput(f"unit concave power needs a in (0,1), got {a}")
    return Gauge(GaugeKind.UNIT_CONCAVE_POWER, {"a": a}, 0.0, 1.0, tau=1.0)


def unit_convex_power(a: float) -> Gauge:
    if a < 1:
        raise InvalidInput(f"unit convex power needs a >= 1, got {a}")
    return Gauge(GaugeKind.UNIT_CONVEX_POWER, {"a": a}, 0.0, 1.0, tau=1.0)


def unit_stolz_power(gamma: float = 1.0) -> Gauge:
    if gamma < 1:
        raise InvalidInput(f"Stolz power needs gamma >= 1, got {gamma}")
    return Gauge(GaugeKind.UNIT_STOLZ_POWER, {"gamma": gamma}, 0.0, 1.0, tau=1.0)


def unit_exp_counterexample() -> Gauge:
    return Gauge(GaugeKind.UNIT_EXP_COUNTEREXAMPLE, {}, 0.0, 1.0)


_FACTORIES: Dict[GaugeKind, Callable[..., Gauge]] = {
    GaugeKind.PLANE_CONCAVE_IDENTITY: identity,
    GaugeKind.PLANE_CONCAVE_POWER: concave_power,
    GaugeKind.PLANE_CONCAVE_LOG: concave_log,
    GaugeKind.PLANE_CONSTANT: constant,
    GaugeKind.PLANE_CONVEX_POWER: convex_power,
    GaugeKind.PLANE_RAPID_POWER: rapid_power,
    GaugeKind.PLANE_RAPID_XLOG: rapid_xlog,
    GaugeKind.UNIT_CONCAVE_POWER: unit_concave_power,
    GaugeKind.UNIT_CONVEX_POWER: unit_convex_power,
    GaugeKind.UNIT_STOLZ_POWER: unit_stolz_power,
    GaugeKind.UNIT_EXP_COUNTEREXAMPLE: unit_exp_counterexample,
}


def from_spec(spec: Union[str, Dict[str, Any], Gauge]) -> Gauge:
    """Build a gauge from ``"concave_power:a=0.5"`` or ``{"kind": ..., "params": ...}``."""
    if isinstance(spec, Gauge):
        return spec
    if isinstance(spec, str):
        name, _, rest = spec.partition(":")
        params: Dict[str, float] = {}
        for item in filter(None, rest.split(",")):
            key, _, value = item.partition("=")
            try:
                params[key.strip()] = float(value)
            except ValueError as e:
                raise InvalidInput(f"Bad gauge parameter {item!r}") from e
    else:
        name, params = spec["kind"], dict(spec.get("params", {}))
    try:
        kind = GaugeKind(name.strip())
    except ValueError as e:
        raise UnsupportedGauge(f"Unknown gauge kind {name!r}") from e
    try:
        return _FACTORIES[kind](**params)
    except TypeError as e:
        raise InvalidInput(f"Bad parameters for {kind.value}: {params}") from e


def default_grid(g: Gauge, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """512 log-spaced points: four decades from the threshold, or 1-x over 1e-1..1e-12."""
    if g.is_unit:
        return 1.0 - np.logspace(-1, -12, points)
    start = math.log10(max(g.R_threshold, 1.0, g.x0 + 1.0))
    return np.logspace(start, start + 4, points)


def canonical_delta_profiles(ambient: Ambient) -> Dict[str, Callable[[np.ndarray], np.ndarray]]:
    """Vanishing profiles used for the (finite, hence partial) doubling-type check."""
    if ambient is Ambient.PLANE:
        return {
            "1/x": lambda x: 1.0 / x,
            "1/sqrt(x)": lambda x: 1.0 / np.sqrt(x),
            "1/log(x)": lambda x: 1.0 / np.log(np.maximum(x, math.e)),
        }
    return {
        "1-x": lambda x: 1.0 - x,
        "sqrt(1-x)": lambda x: np.sqrt(1.0 - x),
        "1/log(1/(1-x))": lambda x: 1.0 / np.log(1.0 / (1.0 - x)),
    }


@dataclass
class DoublingReport:
    grid: List[float]
    ratios: List[float]
    point_passed: List[bool]
    passed: bool
    empirical_constant: float
    alpha_candidate: float
    analytic_threshold: float
    permitted: bool
    growth_cap_ok: Optional[bool]
    flags: List[str] = field(default_factory=list)


def verify_doubling(g: Gauge, grid, alpha_candidate: float) -> DoublingReport:
    """Check g(2x) <= alpha·g(x) (concave) or g(2x) >= beta·g(x) (convex) on a grid."""
    xs = np.asarray(grid, dtype=float)
    if xs.size == 0:
        raise InvalidInput("verify_doubling needs a non-empty grid")
    if not (g.is_concave or g.is_convex_decreasing):
        raise UnsupportedGauge(f"{g.kind.value} has no doubling constant")

    ratios = g(2 * xs) / g(xs)
    flags: List[str] = []
    if g.is_concave:
        point_passed = ratios <= alpha_candidate * (1 + RTOL)
        permitted = 1 < alpha_candidate <= 2
        if alpha_candidate == 1:
            flags.append("non-permitted extremal value alpha=1 works for constant functions only")
    else:
        point_passed = ratios >= alpha_candidate * (1 - RTOL)
        permitted = 0 < alpha_candidate < 1

    if g.kind is GaugeKind.PLANE_CONCAVE_LOG and alpha_candidate > 1:
        threshold = 2.0 ** (1.0 / (alpha_candidate - 1.0))
    else:
        threshold = g.R_threshold
    beyond = xs >= threshold * (1 - RTOL)
    if not beyond.any():
        flags.append(f"no grid point beyond the threshold {threshold:g}")
    tail = ratios[beyond] if beyond.any() else ratios
    empirical = float(tail.max() if g.is_concave else tail.min())

    growth_cap_ok = None
    if g.is_concave and beyond.any() and alpha_candidate >= 1:
        exponent = math.log(alpha_candidate) / math.log(2.0)
        cap = alpha_candidate * g(threshold) * (xs[beyond] / threshold) ** exponent
        growth_cap_ok = bool(np.all(g(xs[beyond]) <= cap * (1 + RTOL)))

    report = DoublingReport(
        grid=xs.tolist(),
        ratios=ratios.tolist(),
        point_passed=point_passed.tolist(),
        passed=bool(np.all(point_passed[beyond])),
        empirical_constant=empirical,
        alpha_candidate=alpha_candidate,
        analytic_threshold=threshold,
        permitted=permitted,
        growth_cap_ok=growth_cap_ok,
        flags=flags,
    )
    logger.debug(f"Doubling check {g.kind.value}: constant {empirical:.6g}, passed={report.passed}")
    return report


@dataclass
class LimitReport:
    grid: List[float]
    trajectories: Dict[str, List[float]]
    limits: Dict[str, float]
    converged: bool
    trend: str = "mixed"
    flags: List[str] = field(default_factory=list)


def _trend(values: np.ndarray) -> str:
    steps = np.diff(values)
    if np.all(steps <= 0):
        return "decreasing"
    if np.all(steps >= 0):
        return "increasing"
    return "mixed"


def _converges(values: np.ndarray) -> bool:
    if values.size < 4:
        return False
    tail = values[-max(4, values.size // 4):]
    if not np.all(np.isfinite(tail)):
        return False
    steps = np.abs(np.diff(tail))
    scale = max(1.0, abs(float(tail[-1])))
    return bool(steps.max() <= 1e-2 * scale and steps[-1] <= steps[0] + 1e-15)


def verify_doubling_type(g: Gauge, delta_profile, gamma: float, x_grid) -> LimitReport:
    """Empirical limits of g(1-x)/g((1-x)(gamma ± delta)) or L(x)/L(x(gamma ± delta))."""
    if gamma <= 0:
        raise InvalidInput("gamma must be positive")
    if not (g.is_unit or g.is_rapid):
        raise UnsupportedGauge(f"{g.kind.value} has no doubling-type property")

    xs = np.asarray(x_grid, dtype=float)
    delta = np.asarray(delta_profile(xs), dtype=float)
    base = 1.0 - xs if g.is_unit else xs
    with np.errstate(all="ignore"):
        top = g._formula(base)
        minus = top / g._formula(base * (gamma - delta))
        plus = top / g._formula(base * (gamma + delta))

    converged = _converges(minus) and _converges(plus)
    flags = [] if converged else ["non-convergent"]
    return LimitReport(
        grid=xs.tolist(),
        trajectories={"minus": minus.tolist(), "plus": plus.tolist()},
        limits={"minus": float(minus[-1]), "plus": float(plus[-1])},
        converged=converged,
        flags=flags,
    )


def verify_doubling_type_profiles(g: Gauge, gamma: float, x_grid) -> Dict[str, LimitReport]:
    reports = {}
    for name, profile in canonical_delta_profiles(g.ambient).items():
        report = verify_doubling_type(g, profile, gamma, x_grid)
        report.flags.append("partial: finitely many delta profiles checked")
        reports[name] = report
    return reports


def limit_diagnostics(g: Gauge, grid) -> LimitReport:
    """Trajectory of x/g(x) (plane) or (1-x)/g(1-x) (unit disc)."""
    xs = np.asarray(grid, dtype=float)
    base = 1.0 - xs if g.is_unit else xs
    values = base / g(base)
    return LimitReport(
        grid=xs.tolist(),
        trajectories={"ratio": values.tolist()},
        limits={"ratio": float(values[-1])},
        converged=_converges(values),
        trend=_trend(values),
    )


@dataclass
class ShapeReport:
    increasing: bool
    decreasing: bool
    concave: bool
    convex: bool


def shape_diagnostics(g: Gauge, grid) -> ShapeReport:
    """Monotonicity and convexity from first/second difference quotients."""
    xs = np.asarray(grid, dtype=float)
    ys = g(xs)
    slopes = np.diff(ys) / np.diff(xs)
    tol = RTOL * max(1.0, float(np.max(np.abs(slopes))))
    curvature = np.diff(slopes)
    return ShapeReport(
        increasing=bool(np.all(slopes > -tol)),
        decreasing=bool(np.all(slopes < tol)),
        concave=bool(np.all(curvature <= tol)),
        convex=bool(np.all(curvature >= -tol)),
    )
