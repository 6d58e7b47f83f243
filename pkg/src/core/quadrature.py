# src/core/quadrature.py
"""
Quadrature Building Blocks
Composite Gauss-Legendre panel rules, an order-preserving parallel map and the
grid-refinement driver shared by the spectrum integrals.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from src.core.scaled import ScaledArray
from src.utils.error_handler import DomainError, NonConvergenceError
from src.utils.logger import get_logger

T = TypeVar("T")
R = TypeVar("R")

logger = get_logger("Quadrature")


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]"""
    if order < 1:
        raise DomainError(f"Gauss-Legendre order must be >= 1, got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(edges: Sequence[float], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre of the given order on every panel [edges[i], edges[i+1]]"""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise DomainError("composite_rule needs at least two panel edges")
    nodes, weights = gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo) + half * nodes).ravel()
    w = (half * weights).ravel()
    return x, w


def uniform_rule(lo: float, hi: float, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    return composite_rule(np.linspace(lo, hi, max(1, int(panels)) + 1), order)


def panels_for(points_per_unit: float, width: float, order: int) -> int:
    """Number of panels of `order` nodes giving about points_per_unit nodes per unit width"""
    return max(1, int(math.ceil(points_per_unit * width / order)))


def log_rule(lo: float, hi: float, points_per_decade: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rule for integrals over x in [lo, hi] with panels uniform in log10 x.

    Returns nodes x and weights w with sum(w f(x)) ~ integral f(x) dx.
    """
    if not (0 < lo < hi):
        raise DomainError(f"log_rule needs 0 < lo < hi, got ({lo}, {hi})")
    a, b = math.log10(lo), math.log10(hi)
    t, wt = uniform_rule(a, b, panels_for(points_per_decade, b - a, order), order)
    x = np.power(10.0, t)
    return x, wt * x * math.log(10.0)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """map() whose results keep input order regardless of worker scheduling"""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


def ordered_sum(values: Sequence[ScaledArray]) -> ScaledArray:
    """Aligned sum of scalar ScaledArrays in list order"""
    if not values:
        return ScaledArray(0.0)
    mantissas = np.array([complex(v.mantissa.ravel()[0]) for v in values])
    exponents = np.array([int(v.exponent.ravel()[0]) for v in values], dtype=np.int64)
    if not np.any(mantissas.imag):
        mantissas = mantissas.real
    return ScaledArray(mantissas, exponents).sum()


def relative_differences(new: ScaledArray, old: ScaledArray) -> np.ndarray:
    """Elementwise |new - old| / |new| computed without leaving the scaled representation"""
    diff = (new - old).abs()
    diff_log = np.atleast_1d(diff.log10_abs())
    new_log = np.atleast_1d(new.abs().log10_abs())
    diff_zero = np.atleast_1d(diff.mantissa == 0)
    new_zero = np.atleast_1d(new.mantissa == 0)
    with np.errstate(over="ignore", invalid="ignore"):
        rel = np.power(10.0, diff_log - new_log)
    return np.where(diff_zero, 0.0, np.where(new_zero, math.inf, rel))


def relative_difference(new: ScaledArray, old: ScaledArray) -> float:
    return float(np.max(relative_differences(new, old)))


@dataclass
class RefinementResult:
    """Value at the finest level with the change from the previous level"""
    value: ScaledArray
    error: float  # max relative change between the last two levels
    levels: int
    history: List[ScaledArray] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)

    @property
    def element_errors(self) -> np.ndarray:
        if len(self.history) < 2:
            return np.full(np.atleast_1d(self.value.mantissa).shape, math.inf)
        return relative_differences(self.history[-1], self.history[-2])

    @property
    def refinement_ratios(self) -> List[float]:
        """Successive error ratios; at most 0.5 for a geometrically converging grid"""
        return [b / a if a > 0 else 0.0 for a, b in zip(self.errors, self.errors[1:])]


def refine(evaluate: Callable[[int], ScaledArray], rel_tol: float, max_levels: int,
           min_levels: int = 2, label: str = "integral") -> RefinementResult:
    """
    Evaluate at levels 0, 1, ... until successive values agree to rel_tol.

    Raises:
        NonConvergenceError: carrying the finest value when max_levels is exhausted
    """
    history: List[ScaledArray] = []
    errors: List[float] = []
    error = math.inf
    for level in range(max_levels):
        history.append(evaluate(level))
        if level == 0:
            continue
        error = relative_difference(history[-1], history[-2])
        errors.append(error)
        logger.debug(f"{label}: level {level} relative change {error:.3e}")
        if level + 1 >= min_levels and error <= rel_tol:
            return RefinementResult(history[-1], error, level + 1, history, errors)
    raise NonConvergenceError(
        f"{label} did not converge: relative change {error:.3e} > rel_tol {rel_tol:.1e} "
        f"after {max_levels} levels",
        partial_result=RefinementResult(history[-1], error, max_levels, history, errors),
        refinement_ratio=error,
    )
