"""
Probability coordinate charts.

A chart is a continuous strictly monotone map G from an open interval I
into (0, 1) together with its inverse. Charts come from distributions
(G = cdf), from data (a piecewise-linear mid-rank interpolant with
rational tails), from an arbitrary forward map inverted numerically, or
from transforming another chart.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from src.distributions import ArrayLike, Distribution, as_sample, parse_distribution
from src.errors import (
    DerivativeUnavailable,
    DomainViolation,
    InsufficientData,
    InvalidParameter,
    NonInvertible,
    OutOfRange,
)
from src.settings import (
    BISECTION_MAX_ITER,
    BISECTION_WIDTH,
    BRACKET_MAX_DOUBLINGS,
    INVERSION_ATOL,
    INVERSION_RTOL,
)

# Set up logging
logger = logging.getLogger(__name__)

ArrayMap = Callable[[np.ndarray], np.ndarray]

# Default probability grid used when checking chart invariants
DEFAULT_LEVEL_GRID = np.linspace(0.001, 0.999, 999)


class ChartKind(Enum):
    ANALYTIC = 'analytic'
    EMPIRICAL = 'empirical'
    COMPOSED = 'composed'


def _evaluate(fn: ArrayMap, x: ArrayLike) -> Union[float, np.ndarray]:
    xs = np.asarray(x, dtype=float)
    result = np.asarray(fn(xs), dtype=float)
    if np.ndim(x) == 0:
        return float(result)
    return result


@dataclass(frozen=True, eq=False)
class Chart:
    """
    A probability coordinate chart.

    Charts are immutable; their maps are pure functions of their input.
    ``codomain`` is (0, 1) for proper charts and the image interval for
    transformed charts (which may leave the unit interval). ``orientation``
    is +1 for increasing and -1 for decreasing maps.
    """

    name: str
    domain: Tuple[float, float]
    forward_map: ArrayMap
    inverse_map: ArrayMap
    derivative_map: Optional[ArrayMap] = None
    kind: ChartKind = ChartKind.ANALYTIC
    codomain: Tuple[float, float] = (0.0, 1.0)
    orientation: int = 1
    distribution: Optional[Distribution] = None

    def forward(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """G(x)"""
        return _evaluate(self.forward_map, x)

    def inverse(self, u: ArrayLike) -> Union[float, np.ndarray]:
        """G^{-1}(u)"""
        return _evaluate(self.inverse_map, u)

    def derivative(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """
        G'(x)

        Raises:
            DerivativeUnavailable: when the chart was built without a derivative
        """
        if not self.has_derivative:
            raise DerivativeUnavailable(f"chart {self.name} has no derivative")
        return _evaluate(self.derivative_map, x)

    @property
    def has_derivative(self) -> bool:
        return self.derivative_map is not None

    @property
    def is_unit_range(self) -> bool:
        """True when the chart maps onto (0, 1), in either orientation"""
        return self.codomain == (0.0, 1.0)

    def contains(self, x: ArrayLike, allow_limits: bool = False) -> np.ndarray:
        """
        Elementwise domain membership

        Args:
            x: Points to test
            allow_limits: Also accept the interval endpoints, where G takes its limit values
        """
        xs = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if allow_limits:
            return (xs >= lo) & (xs <= hi)
        return (xs > lo) & (xs < hi)

    def require_in_domain(self, x: ArrayLike, allow_limits: bool = False,
                          component: Optional[int] = None) -> np.ndarray:
        """Return x as an array, raising DomainViolation if any point lies outside I"""
        xs = np.asarray(x, dtype=float)
        inside = self.contains(xs, allow_limits=allow_limits)
        if not np.all(inside):
            offending = xs[~inside] if xs.ndim else xs
            first = float(np.ravel(offending)[0])
            raise DomainViolation(
                f"value {first:g} lies outside the domain ({self.domain[0]:g}, {self.domain[1]:g}) of chart {self.name}",
                component=component,
            )
        return xs

    def validate(self, grid: Optional[np.ndarray] = None) -> None:
        """
        Check the chart invariants on a grid of domain points.

        Without a grid, points are taken as the inverse images of a probability
        grid so they stay well inside the domain.

        Raises:
            NonInvertible: if monotonicity, range or round-trip checks fail
        """
        if grid is None:
            lo, hi = self.codomain
            grid = np.asarray(self.inverse(lo + (hi - lo) * DEFAULT_LEVEL_GRID), dtype=float)
            grid = np.sort(grid)
        xs = np.unique(np.asarray(grid, dtype=float))
        us = np.asarray(self.forward(xs), dtype=float)

        if np.any(np.diff(us) * self.orientation <= 0):
            raise NonInvertible(f"chart {self.name} is not strictly monotone on the test grid")

        lo, hi = self.codomain
        if np.any(us <= lo) or np.any(us >= hi):
            raise NonInvertible(f"chart {self.name} leaves its open range on the test grid")

        back = np.asarray(self.inverse(us), dtype=float)
        tolerance = INVERSION_ATOL + INVERSION_RTOL * np.abs(xs)
        if np.any(np.abs(back - xs) > tolerance):
            worst = float(np.max(np.abs(back - xs)))
            raise NonInvertible(f"chart {self.name} fails the inversion round-trip (max error {worst:.3g})")


def chart_from_distribution(d: Distribution) -> Chart:
    """
    The chart generated by a continuous law: G = cdf, G^{-1} = quantile, G' = pdf

    Args:
        d: A distribution with a continuous strictly increasing cdf on its support

    Returns:
        Analytic chart on the interior of the support
    """
    return Chart(
        name=d.name,
        domain=d.support,
        forward_map=d.cdf,
        inverse_map=d.quantile,
        derivative_map=d.pdf,
        kind=ChartKind.ANALYTIC,
        distribution=d,
    )


@dataclass(frozen=True, eq=False)
class EmpiricalChart:
    """
    Piecewise-linear chart through mid-rank plotting positions.

    Between the extreme knots G interpolates linearly; beyond them it
    tapers rationally toward 0 and 1 without reaching them:

        G(x) = l_1 / (1 + t (x_1 - x))             for x < x_1
        G(x) = 1 - (1 - l_k) / (1 + t (x - x_k))   for x > x_k

    where t is ``tail_slope``, so the one-sided slopes at the extreme knots are
    t * l_1 and t * (1 - l_k).
    """

    knots: np.ndarray
    levels: np.ndarray
    tail_slope: float

    def forward(self, x: np.ndarray) -> np.ndarray:
        x1, xk = self.knots[0], self.knots[-1]
        l1, lk = self.levels[0], self.levels[-1]
        t = self.tail_slope
        result = np.interp(x, self.knots, self.levels)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            below = l1 / (1.0 + t * (x1 - x))
            above = 1.0 - (1.0 - lk) / (1.0 + t * (x - xk))
        result = np.where(x < x1, below, result)
        result = np.where(x > xk, above, result)
        # limits at the infinite ends of the domain
        result = np.where(np.isneginf(x), 0.0, result)
        result = np.where(np.isposinf(x), 1.0, result)
        return result

    def inverse(self, u: np.ndarray) -> np.ndarray:
        if not np.all((u > 0.0) & (u < 1.0)):
            raise OutOfRange("empirical chart inverse needs levels strictly inside (0, 1)")
        x1, xk = self.knots[0], self.knots[-1]
        l1, lk = self.levels[0], self.levels[-1]
        t = self.tail_slope
        result = np.interp(u, self.levels, self.knots)
        with np.errstate(divide='ignore', invalid='ignore'):
            below = x1 - (l1 / u - 1.0) / t
            above = xk + ((1.0 - lk) / (1.0 - u) - 1.0) / t
        result = np.where(u < l1, below, result)
        result = np.where(u > lk, above, result)
        return result

    def derivative(self, x: np.ndarray) -> np.ndarray:
        """Piecewise-constant slopes; at knots the average of the one-sided slopes"""
        knots, levels, t = self.knots, self.levels, self.tail_slope
        x1, xk = knots[0], knots[-1]
        l1, lk = levels[0], levels[-1]

        # slopes of every piece: left tail, interior segments, right tail (at the knot)
        interior = np.diff(levels) / np.diff(knots)
        left_edge = t * l1
        right_edge = t * (1.0 - lk)
        pieces = np.concatenate(([left_edge], interior, [right_edge]))

        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            below = t * l1 / (1.0 + t * (x1 - x)) ** 2
            above = t * (1.0 - lk) / (1.0 + t * (x - xk)) ** 2

        # index of the segment containing x; knots themselves get the average
        seg = np.searchsorted(knots, x, side='right')
        result = pieces[np.clip(seg, 0, len(pieces) - 1)]
        at_knot = np.isin(x, knots)
        knot_index = np.searchsorted(knots, x, side='left')
        k_idx = np.clip(knot_index, 0, len(knots) - 1)
        averaged = 0.5 * (pieces[k_idx] + pieces[k_idx + 1])
        result = np.where(at_knot, averaged, result)
        result = np.where(x < x1, below, result)
        result = np.where(x > xk, above, result)
        result = np.where(np.isfinite(x), result, 0.0)
        return result


def empirical_levels(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distinct sorted values and their mid-rank plotting positions

    level_i = (cum_count_i - multiplicity_i / 2) / n, which is strictly
    increasing and strictly inside (0, 1) even with ties.
    """
    knots, counts = np.unique(values, return_counts=True)
    cumulative = np.cumsum(counts)
    levels = (cumulative - 0.5 * counts) / values.size
    return knots, levels


def chart_from_sample(s: ArrayLike, tail_slope: Optional[float] = None) -> Chart:
    """
    Empirical chart from data

    Args:
        s: Observations (ties allowed)
        tail_slope: Positive rate of the rational tails; defaults to
            1 / (max - min) so the taper scales with the data

    Returns:
        Chart of kind EMPIRICAL on the whole real line

    Raises:
        InsufficientData: with fewer than two distinct values
    """
    values = as_sample(s)
    knots, levels = empirical_levels(values)
    if knots.size < 2:
        raise InsufficientData(f"an empirical chart needs at least 2 distinct values, got {knots.size}")

    if tail_slope is None:
        tail_slope = 1.0 / float(knots[-1] - knots[0])
    if not (tail_slope > 0 and math.isfinite(tail_slope)):
        raise InvalidParameter(f"tail_slope must be a positive finite number, got {tail_slope}")

    empirical = EmpiricalChart(knots=knots, levels=levels, tail_slope=float(tail_slope))
    logger.debug(f"Empirical chart: {knots.size} knots from {values.size} observations, tail slope {tail_slope:g}")
    return Chart(
        name='empirical',
        domain=(-math.inf, math.inf),
        forward_map=empirical.forward,
        inverse_map=empirical.inverse,
        derivative_map=empirical.derivative,
        kind=ChartKind.EMPIRICAL,
    )


def affine_transform(c: Chart, a: float, b: float) -> Chart:
    """
    The chart a * G + b

    The result may leave (0, 1); it is flagged COMPOSED and only meant for
    invariance checks. a < 0 reverses orientation (a=-1, b=1 gives 1 - G).

    Raises:
        InvalidParameter: if a == 0
    """
    if a == 0 or not math.isfinite(a) or not math.isfinite(b):
        raise InvalidParameter(f"affine transform needs finite a != 0 and finite b, got a={a}, b={b}")

    lo, hi = c.codomain
    ends = sorted((a * lo + b, a * hi + b))
    derivative_map = None
    if c.has_derivative:
        base_derivative = c.derivative_map

        def derivative_map(x):
            return a * base_derivative(x)

    return Chart(
        name=f"affine({c.name}; a={a:g}, b={b:g})",
        domain=c.domain,
        forward_map=lambda x: a * c.forward_map(x) + b,
        inverse_map=lambda u: c.inverse_map((u - b) / a),
        derivative_map=derivative_map,
        kind=ChartKind.COMPOSED,
        codomain=(ends[0], ends[1]),
        orientation=c.orientation * (1 if a > 0 else -1),
        distribution=c.distribution,
    )


def compose_monotone(c: Chart, t: ArrayMap, t_inverse: ArrayMap,
                     t_derivative: Optional[ArrayMap] = None, name: str = 't') -> Chart:
    """
    The chart T o G for a strictly monotone T on (0, 1)

    Args:
        c: Base chart
        t: Vectorised monotone map on (0, 1)
        t_inverse: Its inverse on the image of (0, 1)
        t_derivative: Optional derivative of t, enabling the chain rule
        name: Label used in the composed chart's name

    Raises:
        NonInvertible: if t_inverse fails the round-trip on a probability grid
    """
    levels = DEFAULT_LEVEL_GRID
    lo, hi = c.codomain
    grid = lo + (hi - lo) * levels
    with np.errstate(all='ignore'):
        images = np.asarray(t(grid), dtype=float)
        back = np.asarray(t_inverse(images), dtype=float)
    if not np.all(np.isfinite(back)) or np.max(np.abs(back - grid)) > 1e-10:
        raise NonInvertible(f"supplied inverse of {name} fails the round-trip check")

    steps = np.diff(images)
    if np.all(steps > 0):
        t_orientation = 1
    elif np.all(steps < 0):
        t_orientation = -1
    else:
        raise NonInvertible(f"{name} is not strictly monotone on the unit interval")

    with np.errstate(all='ignore'):
        ends = np.asarray(t(np.array([lo, hi])), dtype=float)
    low_end, high_end = sorted(float(e) for e in ends)

    derivative_map = None
    if t_derivative is not None and c.has_derivative:
        base_forward, base_derivative = c.forward_map, c.derivative_map

        def derivative_map(x):
            return t_derivative(base_forward(x)) * base_derivative(x)

    return Chart(
        name=f"{name}({c.name})",
        domain=c.domain,
        forward_map=lambda x: t(c.forward_map(x)),
        inverse_map=lambda u: c.inverse_map(t_inverse(u)),
        derivative_map=derivative_map,
        kind=ChartKind.COMPOSED,
        codomain=(low_end, high_end),
        orientation=c.orientation * t_orientation,
        distribution=c.distribution,
    )


def invert_monotone(forward: ArrayMap, targets: np.ndarray, domain: Tuple[float, float],
                    width: float = BISECTION_WIDTH) -> np.ndarray:
    """
    Solve forward(x) = target for an increasing forward map, elementwise.

    Brackets start at [-1, 1] (clipped to the domain) and expand by doubling
    until they contain the target; then bisection runs until every bracket
    is narrower than width * max(1, |x|).
    """
    u = np.asarray(targets, dtype=float)
    lo_dom, hi_dom = domain
    open_low, open_high = math.isinf(lo_dom), math.isinf(hi_dom)
    if open_low and open_high:
        start_a, start_b = -1.0, 1.0
    elif open_low:
        start_a, start_b = hi_dom - max(1.0, abs(hi_dom)), hi_dom
    elif open_high:
        start_a, start_b = lo_dom, lo_dom + max(1.0, abs(lo_dom))
    else:
        start_a, start_b = lo_dom, hi_dom
    a = np.full(u.shape, start_a)
    b = np.full(u.shape, start_b)

    # exponential expansion toward infinite endpoints
    for _ in range(BRACKET_MAX_DOUBLINGS):
        grow_low = (forward(a) > u) if open_low else np.zeros(u.shape, dtype=bool)
        grow_high = (forward(b) < u) if open_high else np.zeros(u.shape, dtype=bool)
        if not (np.any(grow_low) or np.any(grow_high)):
            break
        a = np.where(grow_low, a - 2.0 * np.maximum(1.0, np.abs(a)), a)
        b = np.where(grow_high, b + 2.0 * np.maximum(1.0, np.abs(b)), b)
    else:
        raise NonInvertible("could not bracket the target levels")

    for iteration in range(BISECTION_MAX_ITER):
        mid = 0.5 * (a + b)
        if np.all((b - a) <= width * np.maximum(1.0, np.abs(mid))):
            logger.debug(f"Bisection converged after {iteration} iterations")
            break
        below = forward(mid) < u
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def chart_from_function(forward: ArrayMap, domain: Tuple[float, float],
                        derivative: Optional[ArrayMap] = None, name: str = 'custom') -> Chart:
    """
    A chart known only through its increasing forward map.

    The inverse is computed numerically with invert_monotone.
    """
    lo, hi = domain
    if not lo < hi:
        raise InvalidParameter(f"chart domain must be a non-empty interval, got {domain}")

    def inverse_map(u):
        us = np.asarray(u, dtype=float)
        if not np.all((us > 0.0) & (us < 1.0)):
            raise OutOfRange(f"chart {name} inverse needs levels strictly inside (0, 1)")
        return invert_monotone(forward, np.atleast_1d(us), domain).reshape(us.shape)

    return Chart(
        name=name,
        domain=(float(lo), float(hi)),
        forward_map=forward,
        inverse_map=inverse_map,
        derivative_map=derivative,
        kind=ChartKind.ANALYTIC,
    )


def induced_distance(c: Chart, x: float, y: float) -> float:
    """
    d_G(x, y) = |G(x) - G(y)|

    Domain endpoints are accepted and evaluated as limits, so the distance
    to +inf under a Gaussian chart is 1 - G(x).

    Raises:
        DomainViolation: if x or y lies outside the closure of I
    """
    points = c.require_in_domain(np.array([x, y], dtype=float), allow_limits=True)
    u = np.asarray(c.forward(points), dtype=float)
    return float(abs(u[0] - u[1]))


def split_chart_specs(text: str) -> Sequence[str]:
    """Split ``normal:0,1,cauchy:0,1`` into one spec per chart"""
    return [part.strip() for part in re.split(r',(?=\s*[A-Za-z])', text) if part.strip()]


def parse_chart(spec: str, data: Optional[ArrayLike] = None,
                distribution: Optional[Distribution] = None) -> Chart:
    """
    Build a chart from its CLI description

    Args:
        spec: ``family:params``, ``empirical`` or ``intrinsic``
        data: Observations for the empirical (self-generated) chart
        distribution: Law whose own chart ``intrinsic`` refers to

    Raises:
        InvalidParameter: for malformed specs or an empirical chart without data
    """
    key = spec.strip().lower()
    if key == 'intrinsic':
        if distribution is not None:
            return chart_from_distribution(distribution)
        key = 'empirical'
    if key == 'empirical':
        if data is None:
            raise InvalidParameter("the empirical chart is built from input data; supply --input")
        return chart_from_sample(data)
    return chart_from_distribution(parse_distribution(spec))
