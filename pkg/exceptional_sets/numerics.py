"""Scalar numerical kernels: golden-section minimization and adaptive Simpson."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .exceptions import NumericFailure

logger = logging.getLogger(__name__)

PHI_RATIO = 2 / (1 + math.sqrt(5))


@dataclass(frozen=True)
class GoldenResult:
    argmin: float
    minimum: float
    iterations: int
    converged: bool


def golden_section_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iterations: int = 200,
) -> GoldenResult:
    """Minimize a unimodal-on-[lo, hi] function; endpoints are kept as candidates."""
    f_lo, f_hi = f(lo), f(hi)
    a, b = lo, hi
    x1 = b - PHI_RATIO * (b - a)
    x2 = a + PHI_RATIO * (b - a)
    f1, f2 = f(x1), f(x2)
    iteration = 0
    while iteration < max_iterations and (b - a) > tol:
        if f2 > f1:
            b, x2, f2 = x2, x1, f1
            x1 = b - PHI_RATIO * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + PHI_RATIO * (b - a)
            f2 = f(x2)
        iteration += 1

    x_best, f_best = (x1, f1) if f1 <= f2 else (x2, f2)
    if f_lo < f_best:
        x_best, f_best = lo, f_lo
    if f_hi < f_best:
        x_best, f_best = hi, f_hi
    converged = (b - a) <= tol and not (math.isnan(f1) or math.isnan(f2))
    return GoldenResult(x_best, f_best, iteration, converged)


def multistart_min(
    f_vec: Callable[[np.ndarray], np.ndarray],
    f: Callable[[float], float],
    lo: float,
    hi: float,
    samples: int = 256,
    tol: float = 1e-12,
) -> Tuple[float, float]:
    """Dense sampling followed by golden refinement of every local minimum.

    ``f_vec`` evaluates the same function on an array; non-finite values are
    treated as +inf.
    """
    xs = np.linspace(lo, hi, samples)
    with np.errstate(all="ignore"):
        ys = np.asarray(f_vec(xs), dtype=float)
    ys = np.where(np.isfinite(ys), ys, np.inf)
    if not np.isfinite(ys).any():
        return float("nan"), float("inf")

    best_i = int(np.argmin(ys))
    best_x, best_y = float(xs[best_i]), float(ys[best_i])
    interior = np.flatnonzero((ys[1:-1] <= ys[:-2]) & (ys[1:-1] <= ys[2:])) + 1
    candidates: List[int] = sorted(set(interior.tolist()) | {best_i})
    for i in candidates:
        if not np.isfinite(ys[i]):
            continue
        a = float(xs[max(i - 1, 0)])
        b = float(xs[min(i + 1, samples - 1)])
        res = golden_section_min(f, a, b, tol=tol)
        if res.minimum < best_y:
            best_x, best_y = res.argmin, res.minimum
    return best_x, best_y


def parallel_map(func: Callable, items: List, workers: int = 1) -> List:
    """Order-preserving map; a process pool when workers > 1."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    evaluations: int
    converged: bool
    lower_bound: bool = False

    def __float__(self) -> float:
        return self.value


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_evaluations: int = 1_000_000,
) -> QuadratureResult:
    """Adaptive Simpson with point reuse and the (16·S2 − S1)/15 correction."""
    if b <= a:
        return QuadratureResult(0.0, 0.0, 0, True)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    evaluations = 3
    whole = (b - a) * (fa + 4 * fm + fb) / 6.0
    stack = [(a, b, fa, fm, fb, whole, tol)]
    pieces: List[float] = []
    error = 0.0
    converged = True

    while stack:
        lo, hi, f_lo, f_mid, f_hi, s, eps = stack.pop()
        mid = 0.5 * (lo + hi)
        f_left = f(0.5 * (lo + mid))
        f_right = f(0.5 * (mid + hi))
        evaluations += 2
        left = (mid - lo) * (f_lo + 4 * f_left + f_mid) / 6.0
        right = (hi - mid) * (f_mid + 4 * f_right + f_hi) / 6.0
        delta = left + right - s
        too_narrow = (hi - lo) <= 1e-15 * max(1.0, abs(lo), abs(hi))
        if abs(delta) <= 15 * eps or too_narrow or evaluations >= max_evaluations:
            if abs(delta) > 15 * eps:
                converged = False
            pieces.append(left + right + delta / 15.0)
            error += abs(delta) / 15.0
            continue
        stack.append((mid, hi, f_mid, f_right, f_hi, right, eps / 2))
        stack.append((lo, mid, f_lo, f_left, f_mid, left, eps / 2))

    if not all(math.isfinite(p) for p in pieces):
        raise NumericFailure(f"Adaptive Simpson on [{a}, {b}] met a non-finite integrand value")
    if not converged:
        logger.warning(
            f"Adaptive Simpson on [{a}, {b}] stopped after {evaluations} evaluations"
        )
    return QuadratureResult(math.fsum(pieces), error, evaluations, converged)
