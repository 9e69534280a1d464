"""Cartan exceptional discs and pointwise checks of logarithmic derivative bounds.

Test functions are rational, f(z) = prod (z - a)^(±m), so every quantity on
the left-hand sides is evaluated exactly and the Nevanlinna characteristic is
replaced by its closed form for rational functions.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.stats import qmc

from .disc_sets import Disc, DiscCollection, build_collection
from .exceptions import InvalidInput, SingularPoint, UnsupportedGauge
from .gauges import Ambient, Gauge, GaugeKind

logger = logging.getLogger(__name__)

COVER_RTOL = 1e-9
SINGULAR_TOL = 1e-14
STABILITY_TOL = 0.10
MAX_ANNULI = 200
PROBES_PER_DISC = 8
PROBE_GAP = 1e-3
COVERAGE_CHUNK = 4096


def log_plus(x: float) -> float:
    return math.log(x) if x > 1 else 0.0


class PointKind(str, Enum):
    ZERO = "zero"
    POLE = "pole"


@dataclass(frozen=True)
class ZeroPole:
    location: complex
    multiplicity: int
    kind: PointKind

    @property
    def signed(self) -> int:
        return self.multiplicity if self.kind is PointKind.ZERO else -self.multiplicity


@dataclass(frozen=True)
class ZeroPoleData:
    """Zeros and poles of a rational function, ordered by increasing modulus."""

    points: Tuple[ZeroPole, ...] = ()

    def __post_init__(self):
        for p in self.points:
            if p.multiplicity < 1:
                raise InvalidInput(f"multiplicity must be at least 1: {p}")
            if not (math.isfinite(p.location.real) and math.isfinite(p.location.imag)):
                raise InvalidInput(f"non-finite location: {p}")
        ordered = sorted(self.points, key=lambda p: (abs(p.location), p.location.real, p.location.imag))
        object.__setattr__(self, "points", tuple(ordered))

    @classmethod
    def from_lists(cls, zeros: Iterable[complex] = (), poles: Iterable[complex] = ()) -> "ZeroPoleData":
        """Repeated locations are merged into one point with multiplicity."""
        points = []
        for kind, values in ((PointKind.ZERO, zeros), (PointKind.POLE, poles)):
            counts: Dict[complex, int] = {}
            for a in values:
                counts[complex(a)] = counts.get(complex(a), 0) + 1
            points.extend(ZeroPole(a, m, kind) for a, m in counts.items())
        locations = [p.location for p in points]
        if len(set(locations)) < len(locations):
            raise InvalidInput("a point cannot be both a zero and a pole")
        return cls(tuple(points))

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def locations(self) -> np.ndarray:
        return np.array([p.location for p in self.points], dtype=complex)

    @cached_property
    def multiplicities(self) -> np.ndarray:
        return np.array([p.multiplicity for p in self.points], dtype=int)

    @cached_property
    def signed_multiplicities(self) -> np.ndarray:
        return np.array([p.signed for p in self.points], dtype=float)

    @cached_property
    def moduli(self) -> np.ndarray:
        return np.abs(self.locations)

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.multiplicities)

    def total(self, kind: PointKind) -> int:
        return sum(p.multiplicity for p in self.points if p.kind is kind)

    def of_kind(self, kind: PointKind) -> List[complex]:
        """Locations repeated by multiplicity."""
        return [p.location for p in self.points if p.kind is kind for _ in range(p.multiplicity)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            kind.value + "s": [[p.location.real, p.location.imag, p.multiplicity] for p in self.points if p.kind is kind]
            for kind in PointKind
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ZeroPoleData":
        points = [
            ZeroPole(complex(re, im), int(m), kind)
            for kind in PointKind
            for re, im, m in payload.get(kind.value + "s", [])
        ]
        return cls(tuple(points))


def _check_regular(f: ZeroPoleData, z: complex) -> None:
    if len(f):
        gap = np.abs(z - f.locations)
        hit = np.flatnonzero(gap <= SINGULAR_TOL * np.maximum(1.0, f.moduli))
        if hit.size:
            raise SingularPoint(f"z={z} coincides with {f.points[hit[0]]}")


def _logderiv_derivatives(f: ZeroPoleData, z: complex, order: int) -> List[complex]:
    """L^(s)(z) for s < order, where L = f'/f."""
    if not len(f):
        return [0j] * order
    w = 1.0 / (z - f.locations)
    m = f.signed_multiplicities
    return [complex(np.sum(m * (-1) ** s * math.factorial(s) * w ** (s + 1))) for s in range(order)]


def derivative_ratios(f: ZeroPoleData, z: complex, k: int) -> List[complex]:
    """h_n = f^(n)/f for n <= k, by h_n = sum_i C(n-1, i) L^(i) h_(n-1-i)."""
    L = _logderiv_derivatives(f, z, k)
    h = [1 + 0j]
    for n in range(1, k + 1):
        h.append(sum(math.comb(n - 1, i) * L[i] * h[n - 1 - i] for i in range(n)))
    return h


@lru_cache(maxsize=64)
def _numerators(f: ZeroPoleData, k: int) -> Tuple[Polynomial, Tuple[Polynomial, ...]]:
    """Q and N_0..N_k with f^(n) = N_n / Q^(n+1)."""
    P = Polynomial.fromroots(f.of_kind(PointKind.ZERO)) if f.total(PointKind.ZERO) else Polynomial([1])
    Q = Polynomial.fromroots(f.of_kind(PointKind.POLE)) if f.total(PointKind.POLE) else Polynomial([1])
    dQ = Q.deriv()
    N = [P]
    for n in range(k):
        N.append(N[-1].deriv() * Q - (n + 1) * N[-1] * dQ)
    return Q, tuple(N)


def log_derivative(f: ZeroPoleData, k: int, j: int, z: complex, method: str = "auto") -> complex:
    """f^(k)/f^(j) at z.

    ``method`` is ``recursive`` (partial fractions), ``direct`` (polynomial
    differentiation of numerator and denominator) or ``auto``, which takes the
    recursive path for j = 0 and the direct one otherwise.
    """
    if not k > j >= 0:
        raise InvalidInput(f"need k > j >= 0, got k={k}, j={j}")
    z = complex(z)
    _check_regular(f, z)
    if method == "auto":
        method = "recursive" if j == 0 else "direct"
    if method == "recursive":
        h = derivative_ratios(f, z, k)
        num, den = h[k], h[j]
    elif method == "direct":
        Q, N = _numerators(f, k)
        num, den = N[k](z), N[j](z) * Q(z) ** (k - j)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    if abs(den) <= SINGULAR_TOL * max(1.0, abs(num)):
        raise SingularPoint(f"z={z} is a zero of f^({j})")
    return complex(num / den)


@lru_cache(maxsize=64)
def derivative_zero_poles(f: ZeroPoleData, j: int) -> ZeroPoleData:
    """Zeros and poles of f^(j); poles keep their location with multiplicity m + j."""
    if j < 0:
        raise InvalidInput("j must be non-negative")
    if j == 0:
        return f
    poles = [p for p in f.points if p.kind is PointKind.POLE]
    if poles:
        logger.warning(f"Counting zeros of f^({j}) with poles present is experimental")
    _, N = _numerators(f, j)
    numerator = N[j]
    if not np.any(numerator.coef != 0):
        raise InvalidInput(f"f^({j}) vanishes identically")
    roots = list(numerator.roots()) if numerator.degree() > 0 else []
    # N_j carries a factor (z - b)^(j(m-1)) at every pole b of order m
    for p in poles:
        for _ in range(j * (p.multiplicity - 1)):
            nearest = int(np.argmin([abs(r - p.location) for r in roots]))
            roots.pop(nearest)
    points = [ZeroPole(complex(r), 1, PointKind.ZERO) for r in roots]
    points += [ZeroPole(p.location, p.multiplicity + j, PointKind.POLE) for p in poles]
    return ZeroPoleData(tuple(points))


def count_within(data: ZeroPoleData, t: float) -> int:
    if not len(data):
        return 0
    index = int(np.searchsorted(data.moduli, t, side="right"))
    return int(data.cumulative[index - 1]) if index else 0


def counting_function(f: ZeroPoleData, j: int, t: float) -> int:
    """n_j(t): zeros and poles of f^(j) in |z| <= t, with multiplicity."""
    if t < 0:
        raise InvalidInput("t must be non-negative")
    return count_within(derivative_zero_poles(f, j), t)


def characteristic_proxy(f: ZeroPoleData, r: float) -> float:
    """max(deg numerator, deg denominator)·log r."""
    if r < 1:
        raise InvalidInput(f"characteristic proxy needs r >= 1, got {r}")
    return max(f.total(PointKind.ZERO), f.total(PointKind.POLE)) * math.log(r)


def characteristic_proxy_disc(f: ZeroPoleData, r: float) -> float:
    """Larger of the zero and pole counting integrals sum m·log(r/|a|) over 0 < |a| < r."""
    if not 0 <= r < 1:
        raise InvalidInput(f"unit-disc characteristic proxy needs 0 <= r < 1, got {r}")
    totals = []
    for kind in PointKind:
        totals.append(
            math.fsum(p.multiplicity * math.log(r / abs(p.location))
                      for p in f.points if p.kind is kind and 0 < abs(p.location) < r)
        )
    return max(totals)


# Cartan construction


def max_coverage(points, radius: float) -> Tuple[int, Optional[complex]]:
    """Largest number of points one closed disc of the given radius can cover.

    An optimal disc can be moved until two points sit on its boundary, or be
    centred on a point, so those centres are enumerated exhaustively.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        return 0, None
    reach = radius * (1 + COVER_RTOL)
    candidates = [pts]
    if pts.size > 1:
        i, k = np.triu_indices(pts.size, 1)
        p, q = pts[i], pts[k]
        gap = np.abs(q - p)
        keep = (gap > 0) & (gap <= 2 * radius)
        p, q, gap = p[keep], q[keep], gap[keep]
        mid = 0.5 * (p + q)
        h = np.sqrt(np.maximum(radius**2 - (0.5 * gap) ** 2, 0.0))
        normal = 1j * (q - p) / gap
        candidates += [mid + h * normal, mid - h * normal]
    centers = np.concatenate(candidates)

    best_count, best_center = 0, complex(pts[0])
    for start in range(0, centers.size, COVERAGE_CHUNK):
        block = centers[start:start + COVERAGE_CHUNK]
        counts = (np.abs(block[:, None] - pts[None, :]) <= reach).sum(axis=1)
        i = int(np.argmax(counts))
        if counts[i] > best_count:
            best_count, best_center = int(counts[i]), complex(block[i])
    return best_count, best_center


def cartan_discs(points, d: float) -> List[Disc]:
    """Discs with radii summing to 2d outside which the m-th nearest point is farther than m·d/mu."""
    if not d > 0:
        raise InvalidInput(f"d must be positive, got {d}")
    remaining = np.asarray(points, dtype=complex).ravel()
    mu = remaining.size
    discs: List[Disc] = []
    while remaining.size:
        lam = remaining.size
        while True:
            covered, center = max_coverage(remaining, lam * d / mu)
            if covered >= lam:
                break
            lam = covered
        order = np.argsort(np.abs(remaining - center), kind="stable")
        remaining = remaining[np.sort(order[lam:])]
        discs.append(Disc(center, 2 * lam * d / mu))
        logger.debug(f"Cartan disc at {center} covering {lam} of {mu} points")
    return discs


@dataclass
class Annulus:
    nu: int
    inner: float
    outer: float
    mu: int
    d: float
    used_d: float
    discs: List[Disc]
    side_conditions: bool
    bound_term: float
    closed_form_term: float
    realized_term: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nu": self.nu,
            "inner": self.inner,
            "outer": self.outer,
            "mu": self.mu,
            "d": self.d,
            "used_d": self.used_d,
            "discs": [disc.to_dict() for disc in self.discs],
            "side_conditions": self.side_conditions,
            "bound_term": self.bound_term,
            "closed_form_term": self.closed_form_term,
            "realized_term": self.realized_term,
        }


@dataclass
class CartanConstruction:
    alpha: float
    gauge: Gauge
    ambient: Ambient
    j: int
    b: Optional[float]
    nu0: int
    log_condition_nu: Optional[int]
    l_exponent: int
    annuli: List[Annulus]
    flags: List[str] = field(default_factory=list)

    @property
    def active(self) -> List[Annulus]:
        return [a for a in self.annuli if a.nu >= self.nu0]

    @property
    def discs(self) -> List[Disc]:
        return [d for a in self.active for d in a.discs]

    @property
    def excluded_radius(self) -> float:
        """Samples must lie beyond |z| = alpha^nu0 (plane) or 1 - b^nu0 (unit disc)."""
        if self.ambient is Ambient.UNIT_DISC:
            return 1 - self.b**self.nu0
        return self.alpha**self.nu0

    @property
    def sample_limit(self) -> float:
        last = self.annuli[-1].nu if self.annuli else self.nu0
        if self.ambient is Ambient.UNIT_DISC:
            return 1 - self.b ** (last + 1)
        return self.alpha ** (last + 1)

    def admissible_mask(self, zs) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex).ravel()
        moduli = np.abs(zs)
        ok = (moduli > self.excluded_radius) & (moduli < self.sample_limit)
        discs = self.discs
        if discs and zs.size:
            centers = np.array([d.center for d in discs])
            radii = np.array([d.radius for d in discs])
            ok &= ~(np.abs(zs[:, None] - centers[None, :]) <= radii[None, :]).any(axis=1)
        return ok

    def contains(self, z: complex) -> bool:
        """True when z lies in the exceptional set or outside the constructed range."""
        return not bool(self.admissible_mask([z])[0])

    @property
    def realized_tail(self) -> float:
        return math.fsum(a.realized_term for a in self.active)

    @property
    def bound_tail(self) -> float:
        return math.fsum(a.bound_term for a in self.active)

    @property
    def closed_form_tail(self) -> float:
        return math.fsum(a.closed_form_term for a in self.active)

    @property
    def tail_sum_ok(self) -> bool:
        return self.realized_tail <= self.bound_tail * (1 + 1e-12)

    @property
    def closed_form_ok(self) -> bool:
        """Partial sums of the bound, taken from the radii Cartan laid down, stay under the closed form."""
        partial_b = np.cumsum([a.bound_term for a in self.active])
        partial_c = np.cumsum([a.closed_form_term for a in self.active])
        return bool(np.all(partial_b <= partial_c * (1 + 1e-9)))

    @property
    def side_conditions_ok(self) -> bool:
        return all(a.side_conditions for a in self.active)

    @property
    def geometry_ok(self) -> bool:
        """Origin outside every disc (plane); every disc inside the unit disc (unit disc)."""
        if self.ambient is Ambient.UNIT_DISC:
            return all(abs(d.center) + d.radius < 1 for d in self.discs)
        return all(abs(d.center) > d.radius for d in self.discs)

    def to_collection(self, epsilon: float = 1e-3) -> DiscCollection:
        return build_collection(self.ambient, self.gauge, self.discs, epsilon)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ambient": self.ambient.value,
            "gauge": self.gauge.to_dict(),
            "alpha": self.alpha,
            "b": self.b,
            "j": self.j,
            "nu0": self.nu0,
            "log_condition_nu": self.log_condition_nu,
            "l_exponent": self.l_exponent,
            "realized_tail": self.realized_tail,
            "bound_tail": self.bound_tail,
            "closed_form_tail": self.closed_form_tail,
            "tail_sum_ok": self.tail_sum_ok,
            "closed_form_ok": self.closed_form_ok,
            "side_conditions_ok": self.side_conditions_ok,
            "geometry_ok": self.geometry_ok,
            "flags": self.flags,
            "annuli": [a.to_dict() for a in self.annuli],
        }


def _meets_annulus(disc: Disc, inner: float, outer: float) -> bool:
    m = abs(disc.center)
    return m - disc.radius < outer and m + disc.radius >= inner


def build_exceptional_set(
    f: ZeroPoleData,
    j: int = 0,
    alpha: float = 2.0,
    gauge: Optional[Gauge] = None,
    b: Optional[float] = None,
) -> CartanConstruction:
    """Per-annulus Cartan discs for the zeros and poles of f^(j).

    Plane annuli are alpha^nu <= |z| < alpha^(nu+1) with
    d_nu = K(alpha^nu)/(log alpha^nu)^alpha; unit-disc annuli are
    1 - b^nu <= |z| < 1 - b^(nu+1) with d_nu = k(b^nu)/(nu^alpha·(-log b)^alpha).
    Annuli are built until they lie clear of every zero and pole.
    """
    if gauge is None:
        raise InvalidInput("a gauge is required")
    if not alpha > 1:
        raise InvalidInput(f"alpha must exceed 1, got {alpha}")
    unit = gauge.is_unit
    if unit:
        if gauge.kind is not GaugeKind.UNIT_CONVEX_POWER:
            raise UnsupportedGauge("unit-disc construction needs the identity or a convex power gauge")
        if b is None or not 0 < b < 1:
            raise InvalidInput(f"b must lie in (0, 1), got {b}")
        if len(f) and f.moduli.max() >= 1:
            raise InvalidInput("zeros and poles must lie inside the unit disc")
    elif not gauge.is_concave:
        raise UnsupportedGauge("plane construction needs a constant or concave gauge")

    data = derivative_zero_poles(f, j)
    located = np.repeat(data.locations, data.multiplicities) if len(data) else np.zeros(0, complex)
    moduli = np.abs(located)
    farthest = float(moduli.max()) if moduli.size else 0.0
    l_exponent = max(1, math.ceil(math.log2(alpha)))
    log_threshold = 1.0 if unit else max(1.0, 1 / (alpha - 1))
    flags: List[str] = []
    if j > 0 and data.total(PointKind.POLE):
        flags.append("experimental: j > 0 with poles")

    annuli: List[Annulus] = []
    log_condition_nu: Optional[int] = None
    for nu in range(1, MAX_ANNULI + 1):
        if unit:
            inner, outer, reach = 1 - b**nu, 1 - b ** (nu + 1), 1 - b ** (nu + 2)
            d = gauge(b**nu) / (nu**alpha * (-math.log(b)) ** alpha)
            side = 4 * d < b ** (nu + 1) and b ** (nu + 1) < 1 - b**nu
            closed_term = 2 * (2 / b) ** gauge.params["a"] / (nu**alpha * (-math.log(b)) ** alpha)
        else:
            inner, outer, reach = alpha**nu, alpha ** (nu + 1), alpha ** (nu + 2)
            d = gauge(inner) / (nu * math.log(alpha)) ** alpha
            side = inner > 4 * d and inner >= gauge.R_threshold
            closed_term = 2 * alpha / (nu**alpha * math.log(alpha) ** alpha)

        points = located[moduli <= reach]
        found = cartan_discs(points, d) if points.size else []
        # half the radii actually laid down; the nominal d when there is nothing to cover
        used_d = math.fsum(disc.radius for disc in found) / 2 if found else d
        if unit:
            bound_term = 2 * used_d / gauge(b ** (nu + 1) / 2)
        else:
            bound_term = 2 * alpha * used_d / gauge(inner)
        retained = [disc for disc in found if _meets_annulus(disc, inner, outer)]
        sizes = [1 - abs(disc.center) if unit else abs(disc.center) for disc in retained]
        realized = math.fsum(
            disc.radius / gauge(s) for disc, s in zip(retained, sizes) if gauge.in_domain(s)
        )
        annuli.append(
            Annulus(nu, inner, outer, int(points.size), d, used_d, retained, side, bound_term, closed_term, realized)
        )
        if log_condition_nu is None and points.size and math.log(points.size) >= log_threshold:
            log_condition_nu = nu
        logger.debug(f"Annulus {nu}: mu={points.size}, d={d:.6g}, {len(retained)} discs retained")
        if side and inner > farthest + 6 * d:
            break
    else:
        flags.append(f"stopped after {MAX_ANNULI} annuli")

    nu0 = annuli[-1].nu
    for annulus in reversed(annuli):
        if not annulus.side_conditions:
            break
        nu0 = annulus.nu
    # mu_nu only grows with nu, so the log condition holds on the whole tail once met
    if log_condition_nu is not None:
        nu0 = min(max(nu0, log_condition_nu), annuli[-1].nu)
    construction = CartanConstruction(
        alpha=alpha,
        gauge=gauge,
        ambient=gauge.ambient,
        j=j,
        b=b,
        nu0=nu0,
        log_condition_nu=log_condition_nu,
        l_exponent=l_exponent,
        annuli=annuli,
        flags=flags,
    )
    logger.info(
        f"Cartan construction: nu0={nu0}, {len(annuli)} annuli, {len(construction.discs)} discs, "
        f"tail {construction.realized_tail:.6g} <= {construction.bound_tail:.6g}"
    )
    return construction


def admissible_samples(
    construction: CartanConstruction, count: int, seed: int, shift: complex = 0j
) -> np.ndarray:
    """Probe points just outside every construction disc, then a scrambled Halton fill.

    The sequence does not depend on ``count``, so a smaller sample set is
    always a prefix of a larger one.
    """
    if count < 1:
        raise InvalidInput("count must be at least 1")

    def admissible(zs: np.ndarray) -> np.ndarray:
        ok = construction.admissible_mask(zs)
        if shift:
            ok &= construction.admissible_mask(zs + shift)
        return ok

    angles = np.exp(2j * math.pi * np.arange(PROBES_PER_DISC) / PROBES_PER_DISC)
    probes = np.array(
        [d.center + d.radius * (1 + PROBE_GAP) * w for d in construction.discs for w in angles],
        dtype=complex,
    )
    chosen = [probes[admissible(probes)]] if probes.size else []
    have = sum(c.size for c in chosen)

    lo, hi = construction.excluded_radius, construction.sample_limit
    engine = qmc.Halton(d=2, scramble=True, seed=seed)
    attempts = 0
    while have < count:
        u = engine.random(max(2 * (count - have), 64))
        if construction.ambient is Ambient.UNIT_DISC:
            radius = 1 - (1 - lo) * ((1 - hi) / (1 - lo)) ** u[:, 0]
        else:
            radius = lo * (hi / lo) ** u[:, 0]
        zs = radius * np.exp(2j * math.pi * u[:, 1])
        zs = zs[admissible(zs)]
        chosen.append(zs)
        have += zs.size
        attempts += 1
        if attempts > 100:
            raise InvalidInput("admissible region too thin to sample")
    return np.concatenate(chosen)[:count]


# Bound checks


@dataclass
class BoundReport:
    samples: List[complex]
    lhs: List[float]
    rhs: List[float]
    ratios: List[float]
    inner_lhs: List[float]
    inner_rhs: List[float]
    inner_final_form: List[bool]
    empirical_C: float
    half_C: float
    stability: float
    stable: bool
    violations: List[int] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and self.stable

    def to_dict(self) -> Dict[str, Any]:
        rows = [
            {"z": [z.real, z.imag], "lhs": l, "rhs": r, "ratio": q, "inner_lhs": il, "inner_rhs": ir}
            for z, l, r, q, il, ir in zip(self.samples, self.lhs, self.rhs, self.ratios, self.inner_lhs, self.inner_rhs)
        ]
        return {
            "summary": {
                "empirical_C": self.empirical_C,
                "half_C": self.half_C,
                "stability": self.stability,
                "stable": self.stable,
                "violations": self.violations,
                "passed": self.passed,
                "flags": self.flags,
            },
            "samples": rows,
        }


def _require_admissible(construction: CartanConstruction, zs: np.ndarray, shift: complex = 0j) -> None:
    ok = construction.admissible_mask(zs)
    if shift:
        ok &= construction.admissible_mask(zs + shift)
    bad = np.flatnonzero(~ok)
    if bad.size:
        raise InvalidInput(f"sample {int(bad[0])} lies in the exceptional set: {zs[bad[0]]}")


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0 else math.inf


def inverse_distance_sum(data: ZeroPoleData, z: complex, limit: float) -> float:
    """sum m/|z - a| over points with |a| <= limit."""
    if not len(data):
        return 0.0
    mask = data.moduli <= limit
    return float(np.sum(data.multiplicities[mask] / np.abs(z - data.locations[mask])))


def inner_bound(n: int, alpha: float, l_exponent: int, scale: float) -> Tuple[float, bool]:
    """alpha^(l+1)·n·log n·scale once log n >= max(1, 1/(alpha-1)), else alpha^l·n·(1+log+ n)·scale."""
    if n == 0:
        return 0.0, False
    if math.log(n) >= max(1.0, 1 / (alpha - 1)):
        return alpha ** (l_exponent + 1) * n * math.log(n) * scale, True
    return alpha**l_exponent * n * (1 + log_plus(n)) * scale, False


def inner_chain(
    f: ZeroPoleData, j: int, alpha: float, gauge: Gauge, z: complex, l_exponent: Optional[int] = None
) -> Tuple[float, float, bool]:
    """Both sides of sum_{|a|<=alpha r} 1/|z-a| <= alpha^(l+1)·n_j(alpha^2 r)·log n_j(alpha^2 r)·log^alpha r / K(r)."""
    data = derivative_zero_poles(f, j)
    r = abs(z)
    l = l_exponent if l_exponent is not None else max(1, math.ceil(math.log2(alpha)))
    lhs = inverse_distance_sum(data, z, alpha * r)
    rhs, final = inner_bound(count_within(data, alpha**2 * r), alpha, l, math.log(r) ** alpha / gauge(r))
    return lhs, rhs, final


def _summarize(samples, lhs, rhs, inner_l, inner_r, final, flags) -> BoundReport:
    ratios = [_ratio(a, b) for a, b in zip(lhs, rhs)]
    violations = [i for i, (a, b) in enumerate(zip(inner_l, inner_r)) if a > b * (1 + 1e-12)]
    empirical = max(ratios, default=0.0)
    half = max(ratios[: max(1, len(ratios) // 2)], default=0.0)
    stability = abs(empirical - half) / empirical if empirical > 0 else 0.0
    if violations:
        logger.warning(f"Inner chain violated at {len(violations)} samples, first {violations[0]}")
    report = BoundReport(
        samples=[complex(z) for z in samples],
        lhs=lhs,
        rhs=rhs,
        ratios=ratios,
        inner_lhs=inner_l,
        inner_rhs=inner_r,
        inner_final_form=final,
        empirical_C=empirical,
        half_C=half,
        stability=stability,
        stable=stability < STABILITY_TOL,
        violations=violations,
        flags=flags,
    )
    logger.info(f"Empirical C {empirical:.6g} over {len(ratios)} samples (stability {stability:.3g})")
    return report


def check_logderiv_bound(
    f: ZeroPoleData, k: int, j: int, alpha: float, gauge: Gauge, z_samples, construction: CartanConstruction
) -> BoundReport:
    zs = np.asarray(z_samples, dtype=complex).ravel()
    _require_admissible(construction, zs)
    data = derivative_zero_poles(f, j)
    l = construction.l_exponent
    lhs, rhs, inner_l, inner_r, final = [], [], [], [], []
    for z in zs:
        r = abs(z)
        lhs.append(abs(log_derivative(f, k, j, z)) ** (1 / (k - j)))
        n = count_within(data, alpha * r)
        scale = math.log(r) ** alpha / gauge(r)
        rhs.append(characteristic_proxy(f, alpha * r) / r + n * log_plus(n) * scale)
        inner_l.append(inverse_distance_sum(data, z, alpha * r))
        bound, is_final = inner_bound(count_within(data, alpha**2 * r), alpha, l, scale)
        inner_r.append(bound)
        final.append(is_final)
    return _summarize(zs, lhs, rhs, inner_l, inner_r, final, list(construction.flags))


def log_modulus_ratio(f: ZeroPoleData, z: complex, shift: complex) -> float:
    """log|f(z+c)/f(z)|."""
    if not len(f) or shift == 0:
        return 0.0
    _check_regular(f, z)
    _check_regular(f, z + shift)
    return float(
        np.sum(f.signed_multiplicities * (np.log(np.abs(z + shift - f.locations)) - np.log(np.abs(z - f.locations))))
    )


def check_logdiff_bound(
    f: ZeroPoleData, c_shift: complex, alpha: float, gauge: Gauge, z_samples, construction: CartanConstruction
) -> BoundReport:
    zs = np.asarray(z_samples, dtype=complex).ravel()
    c_shift = complex(c_shift)
    _require_admissible(construction, zs, c_shift)
    l = construction.l_exponent
    lhs, rhs, inner_l, inner_r, final = [], [], [], [], []
    for z in zs:
        r = abs(z)
        lhs.append(abs(log_modulus_ratio(f, z, c_shift)))
        n = count_within(f, alpha * r)
        scale = math.log(r) ** alpha / gauge(r)
        rhs.append(characteristic_proxy(f, alpha * r) / r + n * log_plus(n) * scale)
        # both endpoints of the shift must satisfy the inner chain
        worst_l, worst_r, is_final = 0.0, math.inf, False
        for w in (z, z + c_shift):
            s = abs(w)
            w_l = inverse_distance_sum(f, w, alpha * s)
            w_r, w_final = inner_bound(count_within(f, alpha**2 * s), alpha, l, math.log(s) ** alpha / gauge(s))
            if w_r - w_l < worst_r - worst_l:
                worst_l, worst_r, is_final = w_l, w_r, w_final
        inner_l.append(worst_l)
        inner_r.append(worst_r)
        final.append(is_final)
    return _summarize(zs, lhs, rhs, inner_l, inner_r, final, list(construction.flags))


def check_logderiv_bound_unitdisc(
    f: ZeroPoleData,
    k: int,
    j: int,
    alpha: float,
    b: float,
    gauge: Gauge,
    z_samples,
    construction: CartanConstruction,
) -> BoundReport:
    """Unit-disc bound with s(r) = 1 - b(1-r) and W(r) = n·log+ n·log^alpha(1/(1-r))/k(1-r), n = n_j(s(r)).

    The inner chain compares sum_{|a|<=s(r)} 1/|z-a| with
    n·(1 + log+ n)·(-log(1-r))^alpha / k(1-r), n = n_j(1 - b^2(1-r)).
    """
    if not 0 < b < 1:
        raise InvalidInput(f"b must lie in (0, 1), got {b}")
    zs = np.asarray(z_samples, dtype=complex).ravel()
    _require_admissible(construction, zs)
    data = derivative_zero_poles(f, j)
    lhs, rhs, inner_l, inner_r, final = [], [], [], [], []
    for z in zs:
        r = abs(z)
        s = 1 - b * (1 - r)
        lhs.append(abs(log_derivative(f, k, j, z)) ** (1 / (k - j)))
        n_s = count_within(data, s)
        w = n_s * log_plus(n_s) * (-math.log(1 - r)) ** alpha / gauge(1 - r)
        rhs.append((characteristic_proxy_disc(f, s) - math.log(1 - r)) / (1 - r) ** 2 + w)
        inner_l.append(inverse_distance_sum(data, z, s))
        n = count_within(data, 1 - b**2 * (1 - r))
        inner_r.append(n * (1 + log_plus(n)) * (-math.log(1 - r)) ** alpha / gauge(1 - r))
        final.append(False)
    return _summarize(zs, lhs, rhs, inner_l, inner_r, final, list(construction.flags))
