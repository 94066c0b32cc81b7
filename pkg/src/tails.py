"""
Heavy tails as boundary concentration of U = G(X) in (0, 1).

All diagnostics live on the coordinate scale and are never pulled back.
The concentration index E[U^r] + E[(1 - U)^r] is a project-defined
statistic: it is symmetric in the two boundary points and grows with
the amount of mass near them.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from src.barycenter import QuadratureSpec, Source, check_support, coordinate_values, expect_coordinate
from src.charts import Chart
from src.distributions import Distribution
from src.errors import InvalidParameter, OutOfRange

# Set up logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryReport:
    """Mass of U within epsilon of each boundary point plus high-order moments"""

    epsilon: float
    lower_mass: float
    upper_mass: float
    chart: str
    n: int
    high_order_moments: Dict[int, float] = field(default_factory=dict)
    concentration_index: Dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            'epsilon': self.epsilon,
            'lower_mass': self.lower_mass,
            'upper_mass': self.upper_mass,
            'high_order_moments': {str(r): v for r, v in self.high_order_moments.items()},
            'concentration_index': {str(r): v for r, v in self.concentration_index.items()},
            'chart': self.chart,
            'n': self.n,
        }


def _require_unit_chart(c: Chart) -> None:
    if not c.is_unit_range:
        raise InvalidParameter(f"boundary diagnostics need a chart onto (0, 1); {c.name} maps onto {c.codomain}")


def _check_epsilon(eps: float) -> None:
    if not 0.0 < eps < 0.5:
        raise OutOfRange(f"epsilon must lie in (0, 1/2), got {eps}")


def _check_order(r: int) -> None:
    if int(r) != r or r < 1:
        raise InvalidParameter(f"order must be an integer >= 1, got {r}")


def _boundary_probabilities(d: Distribution, c: Chart, eps: float):
    """P(U < eps) and P(U > 1 - eps) through the law's cdf at G^{-1}(eps), G^{-1}(1 - eps)"""
    low_point = float(c.inverse(eps))
    high_point = float(c.inverse(1.0 - eps))
    if c.orientation > 0:
        lower = float(d.cdf(low_point))
        upper = 1.0 - float(d.cdf(high_point))
    else:
        # decreasing chart: small U means large X
        lower = 1.0 - float(d.cdf(low_point))
        upper = float(d.cdf(high_point))
    return lower, upper


def boundary_mass(source: Source, c: Chart, eps: float, orders: Sequence[int] = (),
                  quad: Optional[QuadratureSpec] = None) -> BoundaryReport:
    """
    Probability that U = G(X) lies within eps of 0 and of 1

    Samples give empirical frequencies; distributions give exact values
    via the cdf at the band edges. Requested orders add E[U^r] and the
    concentration index.

    Raises:
        OutOfRange: unless 0 < eps < 1/2
        DomainViolation: if the law or a sample point lies outside the chart domain
    """
    _check_epsilon(eps)
    _require_unit_chart(c)

    if isinstance(source, Distribution):
        check_support(source, c)
        lower, upper = _boundary_probabilities(source, c, eps)
        n = 0
    else:
        u = coordinate_values(source, c)
        lower = float(np.count_nonzero(u < eps)) / u.size
        upper = float(np.count_nonzero(u > 1.0 - eps)) / u.size
        n = int(u.size)

    moments: Dict[int, float] = {}
    indices: Dict[int, float] = {}
    for r in orders:
        _check_order(r)
        moments[int(r)] = expect_coordinate(source, c, lambda v, r=r: v ** r, quad)[0]
        indices[int(r)] = boundary_concentration_index(source, c, r, quad)

    logger.debug(f"Boundary mass under {c.name} at eps={eps:g}: lower {lower:.6g}, upper {upper:.6g}")
    return BoundaryReport(
        epsilon=float(eps),
        lower_mass=lower,
        upper_mass=upper,
        chart=c.name,
        n=n,
        high_order_moments=moments,
        concentration_index=indices,
    )


def boundary_concentration_index(source: Source, c: Chart, r: int,
                                 quad: Optional[QuadratureSpec] = None) -> float:
    """
    E[U^r] + E[(1 - U)^r], a value in (0, 2]

    Larger values at a fixed order mean more mass near the boundary; it
    equals 2 / (r + 1) under the law's own chart and 2^(1 - r) for a
    point mass at the chart median.
    """
    _check_order(r)
    _require_unit_chart(c)
    value, _ = expect_coordinate(source, c, lambda u: u ** r + (1.0 - u) ** r, quad)
    return value
