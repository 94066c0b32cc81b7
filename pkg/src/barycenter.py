"""
Probability barycenters E_G(X) = G^{-1}(E[G(X)]).

Averaging happens in probability coordinates and the result is pulled
back through the chart. For samples the coordinate mean uses compensated
summation; for distributions it is integrated in the probability variable,
E[G(X)] = int_0^1 G(Q(p)) dp, so the integrand stays bounded even when X
has no moments.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate

from src.charts import Chart
from src.distributions import ArrayLike, Distribution, as_sample
from src.errors import BoundaryValue, DomainViolation, QuadratureFailure
from src.settings import (
    BOUNDARY_FLAG_TOL,
    BOUNDARY_TOL,
    QUAD_EPSABS,
    QUAD_EPSREL,
    QUAD_LIMIT,
    QUAD_MAX_ERROR,
)

# Set up logging
logger = logging.getLogger(__name__)

# Either observations or a law
Source = Union[ArrayLike, Distribution]

BOUNDARY_WARNING = 'BOUNDARY_PROXIMITY'


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy settings for integrals over the probability variable"""

    epsabs: float = QUAD_EPSABS
    epsrel: float = QUAD_EPSREL
    limit: int = QUAD_LIMIT
    max_error: float = QUAD_MAX_ERROR


@dataclass(frozen=True)
class GridSpec:
    """Evenly spaced search grid [start, stop] with the given step"""

    start: float
    stop: float
    step: float

    def points(self) -> np.ndarray:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class BarycenterReport:
    """Coordinate mean, its pullback and the boundary diagnostics"""

    coordinate_mean: float
    barycenter: float
    n: int
    boundary_flag: bool
    chart: str
    warning: Optional[str] = field(default=None, compare=False)

    def to_dict(self) -> Dict[str, object]:
        return {
            'coordinate_mean': self.coordinate_mean,
            'barycenter': self.barycenter,
            'n': self.n,
            'boundary_flag': self.boundary_flag,
            'chart': self.chart,
        }


def compensated_mean(values: np.ndarray) -> float:
    """Arithmetic mean with exactly rounded (fsum) accumulation, independent of ordering"""
    return math.fsum(np.ravel(values).tolist()) / values.size


def coordinate_values(s: ArrayLike, c: Chart, component: Optional[int] = None) -> np.ndarray:
    """
    Push observations into probability coordinates

    Raises:
        DomainViolation: if an observation lies outside the chart domain
    """
    data = as_sample(s)
    c.require_in_domain(data, component=component)
    return np.asarray(c.forward(data), dtype=float)


def check_support(d: Distribution, c: Chart) -> None:
    """
    Require the support of d to lie inside the chart domain

    Raises:
        DomainViolation: if the support of d is not inside the chart domain
    """
    lo, hi = d.support
    if lo < c.domain[0] or hi > c.domain[1]:
        raise DomainViolation(
            f"support ({lo:g}, {hi:g}) of {d.name} is not contained in the domain of chart {c.name}"
        )


def integrate_levels(integrand: Callable[[float], float], quad: Optional[QuadratureSpec] = None,
                     label: str = 'integral') -> Tuple[float, int]:
    """
    Adaptive quadrature of a bounded integrand over p in (0, 1)

    Returns:
        (value, number of integrand evaluations)

    Raises:
        QuadratureFailure: if the error estimate exceeds quad.max_error
    """
    quad = quad or QuadratureSpec()
    result = integrate.quad(integrand, 0.0, 1.0, epsabs=quad.epsabs, epsrel=quad.epsrel,
                            limit=quad.limit, full_output=1)
    value, abserr, info = result[0], result[1], result[2]
    if len(result) > 3:
        logger.debug(f"Quadrature note for {label}: {result[3]}")
    if not math.isfinite(value) or abserr > quad.max_error:
        raise QuadratureFailure(f"{label}: error estimate {abserr:.3g} exceeds {quad.max_error:.3g}")
    logger.debug(f"{label} = {value:.17g} (error {abserr:.2g}, {info['neval']} evaluations)")
    return float(value), int(info['neval'])


def expect_coordinate(source: Source, c: Chart,
                      func: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      quad: Optional[QuadratureSpec] = None) -> Tuple[float, int]:
    """
    E[func(G(X))] for a sample (empirical mean) or a distribution (quadrature)

    Args:
        source: Observations or a Distribution
        c: Chart
        func: Vectorised function of the coordinate; identity by default
        quad: Quadrature settings for distributions

    Returns:
        (expectation, sample size or number of quadrature evaluations)
    """
    if isinstance(source, Distribution):
        check_support(source, c)
        d = source

        def integrand(p: float) -> float:
            u = c.forward_map(np.asarray(d.quantile(p)))
            return float(func(u) if func is not None else u)

        return integrate_levels(integrand, quad, label=f"E[G(X)] for {d.name} under {c.name}")

    u = coordinate_values(source, c)
    values = func(u) if func is not None else u
    return compensated_mean(np.asarray(values, dtype=float)), int(u.size)


def pull_back(c: Chart, coordinate_mean: float, component: Optional[int] = None) -> Tuple[float, bool]:
    """
    Apply G^{-1} to a coordinate mean, guarding the edges of the chart's range

    Returns:
        (barycenter, boundary_flag)

    Raises:
        BoundaryValue: if the mean is within BOUNDARY_TOL of an edge (relative to the range width)
    """
    lo, hi = c.codomain
    position = (coordinate_mean - lo) / (hi - lo)
    if not (BOUNDARY_TOL < position < 1.0 - BOUNDARY_TOL):
        raise BoundaryValue(
            f"coordinate mean {coordinate_mean:.17g} is at the edge of the range of chart {c.name}",
            component=component,
        )
    flag = position < BOUNDARY_FLAG_TOL or position > 1.0 - BOUNDARY_FLAG_TOL
    if flag:
        where = f" (column {component})" if component is not None else ''
        logger.warning(f"{BOUNDARY_WARNING}: coordinate mean {coordinate_mean:.3g}{where} is near the edge of chart {c.name}")
    return float(c.inverse(coordinate_mean)), flag


def _report(c: Chart, coordinate_mean: float, n: int) -> BarycenterReport:
    value, flag = pull_back(c, coordinate_mean)
    return BarycenterReport(
        coordinate_mean=coordinate_mean,
        barycenter=value,
        n=n,
        boundary_flag=flag,
        chart=c.name,
        warning=BOUNDARY_WARNING if flag else None,
    )


def barycenter_of_sample(s: ArrayLike, c: Chart) -> BarycenterReport:
    """
    Empirical probability barycenter G^{-1}(mean of G(x_i))

    Args:
        s: Observations inside the chart domain
        c: Chart

    Returns:
        BarycenterReport with n = sample size
    """
    coordinate_mean, n = expect_coordinate(as_sample(s), c)
    return _report(c, coordinate_mean, n)


def barycenter_of_distribution(d: Distribution, c: Chart,
                               quad: Optional[QuadratureSpec] = None) -> BarycenterReport:
    """
    Probability barycenter of a law, E[G(X)] integrated in the p-variable

    Returns:
        BarycenterReport with n = number of quadrature evaluations
    """
    coordinate_mean, neval = expect_coordinate(d, c, quad=quad)
    return _report(c, coordinate_mean, neval)


def barycenter(source: Source, c: Chart, quad: Optional[QuadratureSpec] = None) -> BarycenterReport:
    """Dispatch to the sample or distribution form"""
    if isinstance(source, Distribution):
        return barycenter_of_distribution(source, c, quad)
    return barycenter_of_sample(source, c)


def kolmogorov_equivalent(s1: Source, s2: Source, c: Chart, tol: float = 1e-12) -> bool:
    """
    True when both inputs share the same coordinate mean under c (within tol),
    hence the same barycenter whenever it is defined
    """
    m1, _ = expect_coordinate(s1, c)
    m2, _ = expect_coordinate(s2, c)
    return abs(m1 - m2) <= tol


def argmin_characterization_check(s: ArrayLike, c: Chart, grid: GridSpec) -> float:
    """
    Minimise the mean squared induced distance over a grid

    The barycenter is the unique minimiser of m -> mean d_G(x_i, m)^2, so the
    returned grid point lies within one step of barycenter_of_sample(s, c).
    Grid points outside the chart domain are skipped.
    """
    u = coordinate_values(s, c)
    points = grid.points()
    points = points[c.contains(points)]

    best_value, best_point = math.inf, float('nan')
    chunk = 4096
    for start in range(0, points.size, chunk):
        candidates = points[start:start + chunk]
        v = np.asarray(c.forward(candidates), dtype=float)
        objective = np.mean((u[:, None] - v[None, :]) ** 2, axis=0)
        index = int(np.argmin(objective))
        if objective[index] < best_value:
            best_value, best_point = float(objective[index]), float(candidates[index])
    return best_point


def compare_charts(source: Source, charts: Mapping[str, Chart],
                   quad: Optional[QuadratureSpec] = None) -> pd.DataFrame:
    """
    Barycenters of one input under several benchmark charts

    Each chart defines its own location functional; the table shows how
    far they disagree.

    Returns:
        DataFrame with columns chart, coordinate_mean, barycenter, boundary_flag
    """
    rows = []
    for label, chart in charts.items():
        report = barycenter(source, chart, quad)
        rows.append({
            'chart': label,
            'coordinate_mean': report.coordinate_mean,
            'barycenter': report.barycenter,
            'boundary_flag': report.boundary_flag,
        })
    return pd.DataFrame(rows, columns=['chart', 'coordinate_mean', 'barycenter', 'boundary_flag'])
