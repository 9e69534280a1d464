"""Finite truncations of gauge-weighted disc collections and their generators."""

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import gauges
from .exceptions import InvalidInput
from .gauges import Ambient, Gauge

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.center.real) and math.isfinite(self.center.imag)):
            raise InvalidInput(f"Disc center must be finite: {self.center}")
        if not self.radius > 0:
            raise InvalidInput(f"Disc radius must be positive: {self.radius}")

    def to_dict(self) -> Dict[str, float]:
        return {"re": self.center.real, "im": self.center.imag, "r": self.radius}


@dataclass(frozen=True)
class DiscCollection:
    """Discs ordered by increasing modulus, with tail budget epsilon beyond tail_index."""

    ambient: Ambient
    gauge: Gauge
    discs: tuple
    epsilon: float
    tail_index: int

    def __post_init__(self):
        ordered = tuple(sorted(self.discs, key=lambda d: abs(d.center)))
        object.__setattr__(self, "discs", ordered)
        if self.epsilon <= 0:
            raise InvalidInput("epsilon must be positive")
        if not 0 <= self.tail_index <= len(ordered):
            raise InvalidInput(f"tail_index {self.tail_index} out of range")

    def __len__(self) -> int:
        return len(self.discs)

    @cached_property
    def centers(self) -> np.ndarray:
        return np.array([d.center for d in self.discs], dtype=complex)

    @cached_property
    def radii(self) -> np.ndarray:
        return np.array([d.radius for d in self.discs], dtype=float)

    @cached_property
    def sizes(self) -> np.ndarray:
        """|z_n| in the plane, 1-|z_n| in the unit disc."""
        moduli = np.abs(self.centers)
        return 1.0 - moduli if self.ambient is Ambient.UNIT_DISC else moduli

    def tail(self) -> List[int]:
        return list(range(self.tail_index, len(self.discs)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ambient": self.ambient.value,
            "gauge": self.gauge.to_dict(),
            "epsilon": self.epsilon,
            "tail_index": self.tail_index,
            "discs": [d.to_dict() for d in self.discs],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "DiscCollection":
        discs = tuple(Disc(complex(d["re"], d["im"]), d["r"]) for d in payload["discs"])
        return cls(
            Ambient(payload["ambient"]),
            Gauge.from_dict(payload["gauge"]),
            discs,
            payload["epsilon"],
            payload["tail_index"],
        )

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "re", "im", "r", "ratio"])
        for n, (d, ratio) in enumerate(zip(self.discs, weighted_ratios(self))):
            writer.writerow([n, repr(d.center.real), repr(d.center.imag), repr(d.radius), repr(ratio)])
        return buffer.getvalue()


def weighted_ratios(col: DiscCollection) -> List[float]:
    """r_n / gauge(size_n); NaN where size_n leaves the gauge domain."""
    if not col.discs:
        return []
    sizes = col.sizes
    ok = col.gauge.in_domain(sizes)
    out = np.full(len(col), np.nan)
    if ok.any():
        out[ok] = col.radii[ok] / col.gauge(sizes[ok])
    return out.tolist()


def declare_tail(ratios: Sequence[float], epsilon: float) -> int:
    """Smallest N with sum_{n>=N} ratios < epsilon."""
    suffix = 0.0
    index = len(ratios)
    for n in range(len(ratios) - 1, -1, -1):
        if suffix + ratios[n] >= epsilon:
            break
        suffix += ratios[n]
        index = n
    return index


def build_collection(
    ambient: Ambient,
    gauge: Gauge,
    discs: Iterable[Disc],
    epsilon: float = DEFAULT_EPSILON,
    tail_index: Optional[int] = None,
) -> DiscCollection:
    """Collection with the tail index derived from epsilon unless given."""
    col = DiscCollection(ambient, gauge, tuple(discs), epsilon, 0)
    if tail_index is None:
        ratios = [0.0 if math.isnan(r) else r for r in weighted_ratios(col)]
        tail_index = declare_tail(ratios, epsilon)
    return DiscCollection(ambient, gauge, col.discs, epsilon, tail_index)


@dataclass
class ValidationReport:
    valid: bool
    tail_sum: float
    epsilon: float
    tail_index: int
    ratios: List[float]
    ratios_tend_to_zero: bool
    offending: Dict[str, List[int]] = field(default_factory=dict)
    technical_trend: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "tail_sum": self.tail_sum,
            "epsilon": self.epsilon,
            "tail_index": self.tail_index,
            "ratios_tend_to_zero": self.ratios_tend_to_zero,
            "technical_trend": self.technical_trend,
            "offending": self.offending,
        }


def decays(values: np.ndarray) -> bool:
    """Suffix-max envelope of the sequence ends below a tenth of where it starts."""
    if values.size < 2:
        return True
    envelope = np.maximum.accumulate(values[::-1])[::-1]
    if envelope[0] == 0:
        return True
    return bool(envelope[-1] < 0.1 * envelope[0])


def validate(col: DiscCollection) -> ValidationReport:
    ratios = np.asarray(weighted_ratios(col), dtype=float)
    offending: Dict[str, List[int]] = {}

    if len(col):
        moduli = np.abs(col.centers)
        if col.ambient is Ambient.PLANE:
            bad = np.flatnonzero(moduli <= col.radii)
            if bad.size:
                offending["contains_origin"] = bad.tolist()
        else:
            bad = np.flatnonzero(moduli + col.radii >= 1.0)
            if bad.size:
                offending["leaves_unit_disc"] = bad.tolist()
        bad = np.flatnonzero(np.isnan(ratios))
        if bad.size:
            offending["outside_gauge_domain"] = bad.tolist()

    tail_ratios = ratios[col.tail_index:]
    tail_sum = math.fsum(np.nan_to_num(tail_ratios, nan=math.inf).tolist())
    if not tail_sum < col.epsilon:
        offending["tail_sum"] = list(range(col.tail_index, len(col)))

    technical = None
    if col.gauge.is_rapid and len(col):
        technical = decays(col.radii[col.tail_index:] / np.abs(col.centers.real[col.tail_index:]))

    report = ValidationReport(
        valid=not offending,
        tail_sum=tail_sum,
        epsilon=col.epsilon,
        tail_index=col.tail_index,
        ratios=ratios.tolist(),
        ratios_tend_to_zero=decays(np.nan_to_num(ratios, nan=math.inf)),
        offending=offending,
        technical_trend=technical,
    )
    if not report.valid:
        logger.warning(f"Collection invalid: {sorted(offending)}")
    return report


def diameter_sum(col: DiscCollection) -> float:
    return math.fsum(2 * d.radius for d in col.discs)


# Generators


def gen_example1(n_max: int, k_max: int, epsilon: float = DEFAULT_EPSILON) -> DiscCollection:
    """Rays arg z = 1/n each carry discs at |z| = k·e^n with radii 2^(-n-k)."""
    if n_max < 1 or k_max < 1:
        raise InvalidInput("n_max and k_max must be at least 1")
    discs = [
        Disc(k * math.exp(n) * complex(math.cos(1 / n), math.sin(1 / n)), 2.0 ** (-n - k))
        for n in range(1, n_max + 1)
        for k in range(1, k_max + 1)
    ]
    return build_collection(Ambient.PLANE, gauges.constant(), discs, epsilon)


def gen_example2(n_max: int, k_max: int, epsilon: float = DEFAULT_EPSILON) -> DiscCollection:
    """Horizontal lines y = 1/n each carry discs at |z| = k·e^n with radii 2^(-n-k)."""
    if n_max < 1 or k_max < 1:
        raise InvalidInput("n_max and k_max must be at least 1")
    discs = []
    for n in range(1, n_max + 1):
        y = 1.0 / n
        for k in range(1, k_max + 1):
            x = math.sqrt((k * math.exp(n)) ** 2 - y * y)
            discs.append(Disc(complex(x, y), 2.0 ** (-n - k)))
    return build_collection(Ambient.PLANE, gauges.constant(), discs, epsilon)


def cantor_centers(level: int) -> np.ndarray:
    """Centers of the 2^level closed intervals of the Cantor construction."""
    lefts = np.zeros(1)
    for k in range(1, level + 1):
        lefts = np.concatenate([lefts, lefts + 2 * 3.0**-k])
    return lefts + 0.5 * 3.0**-level


def gen_cantor_rset(
    levels: int, imaginary_parts: Optional[int] = None, epsilon: float = DEFAULT_EPSILON
) -> DiscCollection:
    """Level k: 2^k discs of radius 3^-k over the Cantor interval centers.

    Imaginary parts are 1 unless a seed is given, in which case they are drawn
    uniformly from [1, 2].
    """
    if levels < 1:
        raise InvalidInput("levels must be at least 1")
    rng = np.random.default_rng(imaginary_parts) if imaginary_parts is not None else None
    discs = []
    for k in range(1, levels + 1):
        xs = cantor_centers(k)
        ys = rng.uniform(1.0, 2.0, xs.size) if rng is not None else np.ones(xs.size)
        discs.extend(Disc(complex(x, y), 3.0**-k) for x, y in zip(xs, ys))
    return build_collection(Ambient.PLANE, gauges.constant(), discs, epsilon)


def cantor_nesting_ok(levels: int) -> bool:
    """Each level-(k+1) cover interval lies inside its parent level-k cover interval."""
    for k in range(1, levels):
        parent = cantor_centers(k)
        child = cantor_centers(k + 1)
        owner = parent[np.arange(child.size) % parent.size]
        if np.any(np.abs(child - owner) + 3.0 ** -(k + 1) >= 3.0**-k):
            return False
    return True


def horocycle_gap(n: np.ndarray) -> np.ndarray:
    """1 - |z_n| for z_n = (1 + e^{i/n})/2, i.e. 2·sin²(1/(4n)) without cancellation."""
    return 2.0 * np.sin(0.25 / np.asarray(n, dtype=float)) ** 2


def horocycle_radii(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return 1.0 / (n**2 * np.log1p(n) ** 2)


def gen_horocycle_lset(n_max: int, epsilon: float = DEFAULT_EPSILON) -> DiscCollection:
    """Discs centered on the horocycle through 1; the first indices, whose discs
    would leave the unit disc, are skipped."""
    if n_max < 1:
        raise InvalidInput("n_max must be at least 1")
    n = np.arange(1, n_max + 1)
    inside = horocycle_radii(n) < horocycle_gap(n)
    outside = np.flatnonzero(~inside)
    start = int(outside[-1]) + 2 if outside.size else 1
    keep = np.arange(start, n_max + 1)
    if keep.size == 0:
        logger.warning(f"No horocycle disc with n <= {n_max} lies inside the unit disc")
    centers = (1 + np.exp(1j / keep)) / 2
    radii = horocycle_radii(keep)
    discs = [Disc(complex(c), float(r)) for c, r in zip(centers, radii)]
    return build_collection(Ambient.UNIT_DISC, gauges.unit_concave_power(0.5), discs, epsilon)


def envelope_index(M: float) -> int:
    """N(M): 1 when M <= 1, else the smallest N with 1 + M <= 2^N."""
    if M <= 1:
        return 1
    return max(1, math.ceil(math.log2(1 + M)))


def gen_random(
    ambient: Ambient,
    gauge: Gauge,
    count: int,
    epsilon: float,
    envelope_M: float,
    rng_seed: int,
    x_max: float = 1e6,
    c_range: tuple = (0.05, 20.0),
) -> DiscCollection:
    """Seeded test instance with tail (from count//2) summing to 0.9·epsilon or less.

    Plane centers sit on random gauge curves y = ±c·g(x), c log-uniform in
    ``c_range``, clipped to the envelope |y| <= M·x, with e·2 <= x <= x_max.
    Unit-disc centers lie in the Stolz angle S(1, M).
    """
    if count < 1 or epsilon <= 0 or envelope_M <= 0:
        raise InvalidInput("count >= 1, epsilon > 0 and envelope_M > 0 are required")
    if ambient is not gauge.ambient:
        raise InvalidInput(f"{gauge.kind.value} does not live in the {ambient.value} ambient")
    rng = np.random.default_rng(rng_seed)

    if ambient is Ambient.PLANE:
        x_min = max(2 * math.e, 2 * gauge.curve_start)
        if x_max <= x_min:
            raise InvalidInput(f"x_max must exceed {x_min}")
        xs = np.exp(rng.uniform(math.log(x_min), math.log(x_max), count))
        cs = np.exp(rng.uniform(math.log(c_range[0]), math.log(c_range[1]), count))
        signs = rng.choice([-1.0, 1.0], count)
        ys = np.clip(signs * cs * gauge(xs), -envelope_M * xs, envelope_M * xs)
        centers = xs + 1j * ys
        sizes = np.abs(centers)
        cap = xs / 4
    else:
        if envelope_M < 1:
            raise InvalidInput("Stolz aperture envelope_M must be at least 1")
        u = np.exp(rng.uniform(math.log(1e-6), math.log(0.1), count))
        t = 1.0 - u
        rho = u * rng.uniform(1.0, envelope_M, count)
        cos_psi = np.clip((1 + t**2 - rho**2) / (2 * t), -1.0, 1.0)
        psi = np.arccos(cos_psi) * rng.choice([-1.0, 1.0], count)
        centers = t * np.exp(1j * psi)
        sizes = u
        cap = u / 4

    order = np.argsort(np.abs(centers), kind="stable")
    centers, sizes, cap = centers[order], sizes[order], cap[order]
    tail_index = count // 2
    weights = rng.uniform(0.5, 1.0, count)
    budget = 0.9 * epsilon * weights / weights[tail_index:].sum()
    radii = np.minimum(budget * gauge(sizes), cap)
    discs = [Disc(complex(c), float(r)) for c, r in zip(centers, radii)]
    logger.info(f"Generated {count} random discs ({ambient.value}, {gauge.kind.value}, seed {rng_seed})")
    return DiscCollection(ambient, gauge, tuple(discs), epsilon, tail_index)


def gen_rapid_instance(n_max: int, rng_seed: int, epsilon: float = 1.0) -> DiscCollection:
    """z_n = (n, s_n·n), s_n in [1/2, 1], r_n = 1 for n = 3..n_max, gauge x²."""
    if n_max < 3:
        raise InvalidInput("n_max must be at least 3")
    rng = np.random.default_rng(rng_seed)
    n = np.arange(3, n_max + 1, dtype=float)
    slopes = rng.uniform(0.5, 1.0, n.size)
    discs = [Disc(complex(x, s * x), 1.0) for x, s in zip(n, slopes)]
    return build_collection(Ambient.PLANE, gauges.rapid_power(2.0), discs, epsilon)


def comparability_constant(col: DiscCollection) -> float:
    """sup |1 - z_n| / (1 - |z_n|) over the collection."""
    if not len(col):
        return 1.0
    return float(np.max(np.abs(1 - col.centers) / (1 - np.abs(col.centers))))


def stolz_constant_disc(d: Disc, gamma: float) -> float:
    """Smallest K with |1-z|·((u-r)^-γ - (u+r)^-γ) <= K·r/(u-r)^γ, u = 1-|z|."""
    u = 1.0 - abs(d.center)
    if u - d.radius <= 0:
        raise InvalidInput(f"disc {d} is not inside the unit disc")
    return abs(1 - d.center) * (1 - ((u - d.radius) / (u + d.radius)) ** gamma) / d.radius


def stolz_constant(col: DiscCollection, gamma: float) -> float:
    """Certified constant of the Stolz width chain over the whole collection."""
    return max((stolz_constant_disc(d, gamma) for d in col.discs), default=0.0)
