"""
Multivariate probability coordinates on the unit cube.

Charts act componentwise, U_i = G_i(X_i); the barycenter averages in
(0, 1)^d and pulls back coordinate by coordinate. Pseudo-observations
(average ranks / (n + 1)) realise the intrinsic, copula-scale coordinates
from data, and corner masses describe joint boundary concentration.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.barycenter import compensated_mean, pull_back
from src.charts import Chart, chart_from_sample
from src.errors import InsufficientData, InvalidParameter, OutOfRange

# Set up logging
logger = logging.getLogger(__name__)

LOW = 'lo'
HIGH = 'hi'

# Rows of d-dimensional observations, shape (n, d)
VectorSample = np.ndarray


def as_vector_sample(rows, minimum_rows: int = 1) -> VectorSample:
    """
    Validate rows as an (n, d) array of finite floats

    Raises:
        InvalidParameter: for ragged, non-finite or non-matrix input
        InsufficientData: with fewer than minimum_rows rows
    """
    try:
        data = np.asarray(rows, dtype=float)
    except ValueError as e:
        raise InvalidParameter(f"rows must all have the same dimension: {e}")
    if data.ndim != 2 or data.shape[1] < 1:
        raise InvalidParameter(f"a vector sample must be a matrix of shape (n, d), got shape {data.shape}")
    if data.shape[0] < minimum_rows:
        raise InsufficientData(f"need at least {minimum_rows} rows, got {data.shape[0]}")
    if not np.all(np.isfinite(data)):
        raise InvalidParameter("vector sample contains NaN or infinite values")
    return data


@dataclass(frozen=True)
class ChartBundle:
    """One chart per component"""

    charts: Tuple[Chart, ...]

    def __post_init__(self):
        object.__setattr__(self, 'charts', tuple(self.charts))
        if not self.charts:
            raise InvalidParameter("a chart bundle needs at least one chart")

    @property
    def dimension(self) -> int:
        return len(self.charts)

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.charts]


@dataclass(frozen=True)
class CubeReport:
    """Componentwise coordinate means, their pullbacks and optional corner masses"""

    coordinate_mean: List[float]
    barycenter: List[float]
    n: int
    charts: List[str]
    boundary_flags: List[bool] = field(default_factory=list)
    corner_masses: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            'coordinate_mean': list(self.coordinate_mean),
            'barycenter': list(self.barycenter),
            'n': self.n,
            'corner_masses': dict(self.corner_masses),
            'charts': list(self.charts),
        }


def pushforward(vs, b: ChartBundle) -> np.ndarray:
    """
    Apply each chart to its column

    Raises:
        InvalidParameter: if the bundle dimension does not match the rows
        DomainViolation: naming the offending column
    """
    data = as_vector_sample(vs)
    if data.shape[1] != b.dimension:
        raise InvalidParameter(f"rows have dimension {data.shape[1]} but the bundle has {b.dimension} charts")

    coords = np.empty_like(data)
    for i, chart in enumerate(b.charts):
        column = chart.require_in_domain(data[:, i], component=i)
        coords[:, i] = chart.forward(column)
    return coords


def pseudo_observations(vs) -> np.ndarray:
    """
    Empirical copula coordinates: average rank / (n + 1) per column

    Raises:
        InsufficientData: with fewer than 2 rows
    """
    data = as_vector_sample(vs, minimum_rows=2)
    ranks = stats.rankdata(data, method='average', axis=0)
    return ranks / (data.shape[0] + 1.0)


def intrinsic_bundle(vs) -> ChartBundle:
    """Empirical charts built from each column's own data"""
    data = as_vector_sample(vs, minimum_rows=2)
    return ChartBundle(tuple(chart_from_sample(data[:, i]) for i in range(data.shape[1])))


def multivariate_barycenter(vs, b: ChartBundle, eps: Optional[float] = None) -> CubeReport:
    """
    Componentwise probability barycenter

    Args:
        vs: Rows of observations
        b: One chart per column
        eps: If given, corner masses of the coordinates are attached

    Raises:
        BoundaryValue: naming the column whose coordinate mean hits the range edge
    """
    coords = pushforward(vs, b)
    means, values, flags = [], [], []
    for i, chart in enumerate(b.charts):
        mean = compensated_mean(coords[:, i])
        value, flag = pull_back(chart, mean, component=i)
        means.append(mean)
        values.append(value)
        flags.append(flag)

    corners = corner_masses(coords, eps) if eps is not None else {}
    return CubeReport(
        coordinate_mean=means,
        barycenter=values,
        n=int(coords.shape[0]),
        charts=b.names,
        boundary_flags=flags,
        corner_masses=corners,
    )


def _check_band(eps: float) -> None:
    if not 0.0 < eps < 0.5:
        raise OutOfRange(f"epsilon must lie in (0, 1/2), got {eps}")


def corner_mass(coords, eps: float, corner: Sequence[str]) -> float:
    """
    Fraction of rows inside the band of a cube corner

    Args:
        coords: (n, d) coordinates in (0, 1)^d
        eps: Band width in (0, 1/2)
        corner: d labels, 'lo' (u < eps) or 'hi' (u > 1 - eps)
    """
    _check_band(eps)
    u = as_vector_sample(coords)
    if len(corner) != u.shape[1]:
        raise InvalidParameter(f"corner has {len(corner)} labels for {u.shape[1]} columns")

    inside = np.ones(u.shape[0], dtype=bool)
    for i, label in enumerate(corner):
        if label == LOW:
            inside &= u[:, i] < eps
        elif label == HIGH:
            inside &= u[:, i] > 1.0 - eps
        else:
            raise InvalidParameter(f"corner labels must be '{LOW}' or '{HIGH}', got {label!r}")
    return float(np.count_nonzero(inside)) / u.shape[0]


def corner_masses(coords, eps: float) -> Dict[str, float]:
    """Corner mass for all 2^d corners, keyed like 'hi,lo'"""
    _check_band(eps)
    u = as_vector_sample(coords)
    return {
        ','.join(corner): corner_mass(u, eps, corner)
        for corner in itertools.product((LOW, HIGH), repeat=u.shape[1])
    }


def coordinate_moments(vs, b: ChartBundle, r: int) -> List[float]:
    """Componentwise initial Kolmogorov moments E[U_i^r]"""
    if int(r) != r or r < 1:
        raise InvalidParameter(f"moment order must be an integer >= 1, got {r}")
    coords = pushforward(vs, b)
    return [compensated_mean(coords[:, i] ** r) for i in range(coords.shape[1])]


def coordinate_covariance(coords) -> np.ndarray:
    """
    Covariance matrix of the coordinates (n - 1 denominator)

    On pseudo-observations, 12 times an off-diagonal entry is Spearman's rho
    up to the (n + 1) scaling.
    """
    u = as_vector_sample(coords, minimum_rows=2)
    return np.atleast_2d(np.cov(u, rowvar=False, ddof=1))
