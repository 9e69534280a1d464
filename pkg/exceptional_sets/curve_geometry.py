"""Gauge curve families, curve-disc intersection and per-disc c-intervals.

Plane families are the rotated curves y = ±c·g(x); unit-disc families are the
boundaries |1 - conj(zeta)·z| = c·g(1 - |z|).

The c-interval of a disc is the range of z -> y/g(x) (plane, rotated frame) or
z -> |1 - conj(zeta)·z| / g(1 - |z|) (unit disc) over the closed disc. Neither
map has an interior critical point off the symmetry axis, so both extrema are
attained on the boundary circle, which is sampled and then refined.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .disc_sets import Disc, DiscCollection, decays, stolz_constant_disc
from .exceptions import (
    DomainError,
    InvalidInput,
    NoPoint,
    NotInAsymptoticRegime,
    NotStolz,
    PartialDomain,
    UnsupportedGauge,
)
from .gauges import Ambient, Gauge, GaugeKind
from .numerics import golden_section_min, multistart_min, parallel_map

logger = logging.getLogger(__name__)

WINDOW_SAMPLES = 256
CIRCLE_SAMPLES = 1024
MEETS_RTOL = 1e-9
STOLZ_APERTURE_MAX = 100.0
T_MIN = 1e-12


class Branch(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    BOTH = "both"

    @property
    def signs(self) -> Tuple[float, ...]:
        return {"upper": (1.0,), "lower": (-1.0,), "both": (1.0, -1.0)}[self.value]


class Contact(str, Enum):
    HIT = "hit"
    MISS = "miss"
    BAND = "band"


@dataclass(frozen=True)
class CurveFamily:
    gauge: Gauge
    c: float
    phi: float = 0.0
    zeta: complex = 1 + 0j
    branch: Branch = Branch.UPPER

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidInput(f"c must be positive, got {self.c}")
        if self.ambient is Ambient.UNIT_DISC and abs(abs(self.zeta) - 1) > 1e-12:
            raise InvalidInput(f"zeta must have modulus 1, got {self.zeta}")

    @property
    def ambient(self) -> Ambient:
        return self.gauge.ambient

    @property
    def frame(self) -> complex:
        """Multiplier taking ambient coordinates to the family's normalized frame."""
        if self.ambient is Ambient.UNIT_DISC:
            return self.zeta.conjugate()
        return complex(math.cos(-self.phi), math.sin(-self.phi))


def _to_frame(z: complex, multiplier: complex) -> complex:
    return z if multiplier == 1 else z * multiplier


def _unit_offset(gauge: Gauge, c: float, t: np.ndarray) -> np.ndarray:
    """Angular offset psi(t) >= 0 of the unit-disc curve at radius t; NaN where none."""
    t = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        cos_psi = (1 + t**2 - (c * gauge._formula(1 - t)) ** 2) / (2 * t)
        return np.where(np.abs(cos_psi) <= 1, np.arccos(np.clip(cos_psi, -1, 1)), np.nan)


def boundary_point(fam: CurveFamily, t: float) -> complex:
    if fam.branch is Branch.BOTH:
        raise InvalidInput("boundary_point needs a single branch")
    sign = fam.branch.signs[0]
    if fam.ambient is Ambient.PLANE:
        if t < fam.gauge.curve_start:
            raise DomainError(f"t={t} precedes the curve start {fam.gauge.curve_start}")
        point = complex(t, sign * fam.c * fam.gauge(t))
        return point * complex(math.cos(fam.phi), math.sin(fam.phi))
    if not 0 < t < 1:
        raise DomainError(f"t={t} is not a radius inside the unit disc")
    psi = float(_unit_offset(fam.gauge, fam.c, np.array([t]))[0])
    if math.isnan(psi):
        raise NoPoint(f"no curve point at radius {t}")
    return fam.zeta * t * complex(math.cos(psi), sign * math.sin(psi))


def _distance_objective(fam: CurveFamily, w: complex, sign: float):
    """Squared distance from w (normalized frame) to the curve, vector and scalar forms."""
    g, c = fam.gauge, fam.c
    if fam.ambient is Ambient.PLANE:

        def f_vec(x: np.ndarray) -> np.ndarray:
            return (x - w.real) ** 2 + (sign * c * g._formula(x) - w.imag) ** 2

    else:

        def f_vec(t: np.ndarray) -> np.ndarray:
            psi = _unit_offset(g, c, t)
            d2 = np.abs(t * np.exp(1j * sign * psi) - w) ** 2
            return np.where(np.isnan(d2), np.inf, d2)

    def f(x: float) -> float:
        return float(f_vec(np.array([x]))[0])

    return f_vec, f


def nearest_distance(fam: CurveFamily, d: Disc) -> float:
    """Distance from the disc center to the curve within the confined window."""
    w = _to_frame(d.center, fam.frame)
    pad = 2 * d.radius
    if fam.ambient is Ambient.PLANE:
        lo = max(w.real - d.radius - pad, fam.gauge.curve_start)
        hi = w.real + d.radius + pad
    else:
        lo = max(abs(w) - d.radius - pad, T_MIN)
        hi = min(abs(w) + d.radius + pad, 1 - 1e-15)
    if hi < lo:
        return math.inf
    best = math.inf
    for sign in fam.branch.signs:
        f_vec, f = _distance_objective(fam, w, sign)
        _, value = multistart_min(f_vec, f, lo, hi, samples=WINDOW_SAMPLES)
        best = min(best, value)
    return math.sqrt(best) if math.isfinite(best) else math.inf


def classify(fam: CurveFamily, d: Disc, rtol: float = MEETS_RTOL) -> Contact:
    if fam.ambient is Ambient.UNIT_DISC and abs(d.center) + d.radius >= 1:
        raise InvalidInput(f"disc {d} is not inside the unit disc")
    dist = nearest_distance(fam, d)
    if dist < d.radius * (1 - rtol):
        return Contact.HIT
    if dist > d.radius * (1 + rtol):
        return Contact.MISS
    logger.debug(f"Curve c={fam.c} passes within the tolerance band of disc {d}")
    return Contact.BAND


def meets(fam: CurveFamily, d: Disc) -> bool:
    """Tolerance-band contacts count as hits."""
    return classify(fam, d) is not Contact.MISS


def _meets_item(item) -> List[int]:
    fam, discs, offset = item
    return [offset + i for i, d in enumerate(discs) if meets(fam, d)]


def intersecting_indices(
    fam: CurveFamily, col: DiscCollection, indices: Optional[List[int]] = None, workers: int = 1
) -> List[int]:
    """Indices of discs met by the curve, in collection order."""
    chosen = list(range(len(col))) if indices is None else list(indices)
    chunk = 64
    items = [
        (fam, [col.discs[i] for i in chosen[s:s + chunk]], s)
        for s in range(0, len(chosen), chunk)
    ]
    hits = [h for part in parallel_map(_meets_item, items, workers) for h in part]
    return [chosen[h] for h in hits]


# c-intervals and per-disc width bounds


@dataclass
class CIntervalReport:
    disc_index: int
    c_lo: float
    c_hi: float
    width: float
    width_bound: Optional[float]
    satisfied: Optional[bool]
    empty: bool = False
    flags: List[str] = field(default_factory=list)

    def row(self) -> list:
        return [self.disc_index, self.c_lo, self.c_hi, self.width, self.width_bound, self.satisfied]


def _circle_extremes(F: Callable[[np.ndarray], np.ndarray]) -> Tuple[float, float]:
    theta = np.linspace(0.0, 2 * math.pi, CIRCLE_SAMPLES, endpoint=False)
    values = F(theta)
    step = 2 * math.pi / CIRCLE_SAMPLES

    def scalar(sign: float):
        return lambda t: sign * float(F(np.array([t]))[0])

    i_min, i_max = int(np.argmin(values)), int(np.argmax(values))
    low = golden_section_min(scalar(1.0), theta[i_min] - step, theta[i_min] + step)
    high = golden_section_min(scalar(-1.0), theta[i_max] - step, theta[i_max] + step)
    return min(low.minimum, float(values[i_min])), max(-high.minimum, float(values[i_max]))


def linear_c_interval(center: complex, r: float) -> Tuple[float, float]:
    """Closed form for g(x) = x: slopes of the two tangent lines through the origin."""
    x, y = center.real, center.imag
    root = r * math.sqrt(x * x + y * y - r * r)
    return (x * y - root) / (x * x - r * r), (x * y + root) / (x * x - r * r)


def c_interval(
    gauge: Gauge,
    phi_or_zeta,
    d: Disc,
    branch: Branch = Branch.UPPER,
    disc_index: int = 0,
    n_envelope: int = 1,
    k_comp: Optional[float] = None,
) -> CIntervalReport:
    if branch is Branch.BOTH:
        raise InvalidInput("c_interval is computed per branch")
    if gauge.is_unit:
        multiplier = complex(phi_or_zeta).conjugate()
    else:
        phi = float(phi_or_zeta)
        multiplier = complex(math.cos(-phi), math.sin(-phi))
    w = _to_frame(d.center, multiplier)
    local = Disc(w, d.radius)

    if gauge.is_unit:
        if abs(w) + d.radius >= 1:
            raise PartialDomain(f"disc {disc_index} is not inside the unit disc")

        def F(theta: np.ndarray) -> np.ndarray:
            p = w + d.radius * np.exp(1j * theta)
            return np.abs(1 - p) / gauge._formula(1 - np.abs(p))

    else:
        if w.real - d.radius <= gauge.curve_start:
            raise PartialDomain(f"disc {disc_index} reaches the edge of the curve domain")
        sign = branch.signs[0]

        def F(theta: np.ndarray) -> np.ndarray:
            p = w + d.radius * np.exp(1j * theta)
            return sign * p.imag / gauge._formula(p.real)

    c_lo, c_hi = _circle_extremes(F)
    empty = False
    if c_hi <= 0:
        empty, c_lo, c_hi = True, 0.0, 0.0
    c_lo = max(c_lo, 0.0)

    bound = _width_bound(gauge, local, n_envelope, k_comp)
    width = c_hi - c_lo
    report = CIntervalReport(
        disc_index=disc_index,
        c_lo=c_lo,
        c_hi=c_hi,
        width=width,
        width_bound=bound,
        satisfied=None if bound is None else bool(width <= bound),
        empty=empty,
    )
    if report.satisfied is False:
        logger.warning(f"Disc {disc_index}: width {width:.6g} exceeds bound {bound:.6g}")
    return report


def _width_bound(gauge: Gauge, local: Disc, n_envelope: int, k_comp: Optional[float]) -> Optional[float]:
    try:
        if gauge.is_concave:
            return bound_cc(gauge, local, n_envelope)
        if gauge.is_convex_decreasing:
            return bound_cc2(gauge, local)
        if gauge.kind is GaugeKind.UNIT_STOLZ_POWER:
            k = k_comp if k_comp is not None else stolz_constant_disc(local, gauge.params["gamma"])
            return bound_stolz(gauge.params["gamma"], local, k)
    except (NotInAsymptoticRegime, NotStolz) as e:
        logger.debug(f"No width bound: {e}")
    return None


def _check_regime(gauge: Gauge, d: Disc) -> Tuple[float, float]:
    x, r = d.center.real, d.radius
    if not (x - r >= x / 2 and x / 2 >= gauge.R_threshold):
        raise NotInAsymptoticRegime(f"disc at x={x}, r={r} is outside the asymptotic regime")
    return x, r


def bound_cc(gauge: Gauge, d: Disc, N_envelope: int) -> float:
    """4·alpha^N·r / g(x) for a disc given in the family's normalized frame."""
    if not gauge.is_concave:
        raise UnsupportedGauge("bound_cc needs a plane concave gauge")
    x, r = _check_regime(gauge, d)
    return 4 * gauge.doubling_up**N_envelope * r / gauge(x)


def bound_cc2(gauge: Gauge, d: Disc) -> float:
    """4·r / (beta·g(|z|))."""
    if not gauge.is_convex_decreasing:
        raise UnsupportedGauge("bound_cc2 needs a decreasing convex gauge")
    _, r = _check_regime(gauge, d)
    return 4 * r / (gauge.doubling_down * gauge(abs(d.center)))


def bound_stolz(gamma: float, d: Disc, Kcomp: float) -> float:
    """(4 + 2K)·r / (1 - |z|)^gamma for a disc in a Stolz angle at 1."""
    modulus = abs(d.center)
    if modulus >= 1 or abs(1 - d.center) / (1 - modulus) >= STOLZ_APERTURE_MAX:
        raise NotStolz(f"center {d.center} lies outside every admissible Stolz angle")
    return (4 + 2 * Kcomp) * d.radius / (1 - modulus) ** gamma


@dataclass
class TrendReport:
    widths: List[float]
    envelope: List[float]
    passed: bool
    technical_ok: bool
    failures: List[int] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)


def width_trend_rapid(gauge: Gauge, col: DiscCollection, phi: float = 0.0) -> TrendReport:
    """Tail widths must shrink: surrogate for a c-set without interior points."""
    if not gauge.is_rapid:
        raise UnsupportedGauge("width_trend_rapid needs a rapid plane gauge")
    flags = ["surrogate: widths tending to zero stand in for 'no interior points'"]
    tail = col.tail()
    if not tail:
        return TrendReport([], [], True, True, flags=flags)

    multiplier = complex(math.cos(-phi), math.sin(-phi))
    local = [_to_frame(col.discs[n].center, multiplier) for n in tail]
    ratios = np.array([col.discs[n].radius / abs(w.real) for n, w in zip(tail, local)])
    technical_ok = decays(ratios)
    failures: List[int] = []
    if not technical_ok:
        failures = [n for n, q in zip(tail, ratios) if q >= 0.1 * ratios[0]][1:]

    widths = []
    for n in tail:
        try:
            widths.append(c_interval(gauge, phi, col.discs[n], disc_index=n).width)
        except PartialDomain:
            failures.append(n)
            widths.append(math.nan)
    w = np.nan_to_num(np.array(widths), nan=math.inf)
    envelope = np.maximum.accumulate(w[::-1])[::-1]
    shrinking = envelope.size < 2 or envelope[0] == 0 or bool(envelope[-1] < 0.1 * envelope[0])
    return TrendReport(
        widths=widths,
        envelope=envelope.tolist(),
        passed=shrinking and technical_ok and not failures,
        technical_ok=technical_ok,
        failures=sorted(set(failures)),
        flags=flags,
    )
