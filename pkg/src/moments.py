"""
Kolmogorov moments: powers of the probability coordinate U = G(X).

Initial moments E[U^r], centred moments E[(U - EU)^r], absolute centred
moments and the pseudo-generating function phi(t) = E[exp(t U)]. Every
one of them exists for every input because U is bounded.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from src.barycenter import QuadratureSpec, Source, expect_coordinate
from src.charts import Chart
from src.errors import InvalidParameter
from src.settings import DEFINED_TOL

# Set up logging
logger = logging.getLogger(__name__)

INITIAL = 'initial'
CENTRED = 'centred'
ABSOLUTE = 'absolute'


@dataclass(frozen=True)
class MomentReport:
    """
    A raw coordinate moment and, when it lies strictly inside the chart's
    range, its pullback through G^{-1}
    """

    order: int
    kind: str
    raw_coordinate_moment: float
    pulled_back: Optional[float]
    centred: bool
    defined: bool
    chart: str

    def to_dict(self) -> Dict[str, object]:
        return {
            'order': self.order,
            'kind': self.kind,
            'raw_coordinate_moment': self.raw_coordinate_moment,
            'pulled_back': self.pulled_back,
            'centred': self.centred,
            'defined': self.defined,
            'chart': self.chart,
        }


def _check_order(r: int) -> None:
    if int(r) != r or r < 1:
        raise InvalidParameter(f"moment order must be an integer >= 1, got {r}")


def _pull_back_if_defined(c: Chart, raw: float):
    """Return (pulled_back, defined); only raw values strictly inside the range are pulled back"""
    lo, hi = c.codomain
    position = (raw - lo) / (hi - lo)
    if DEFINED_TOL < position < 1.0 - DEFINED_TOL:
        return float(c.inverse(raw)), True
    return None, False


def _moment_report(c: Chart, r: int, kind: str, raw: float) -> MomentReport:
    pulled_back, defined = _pull_back_if_defined(c, raw)
    if not defined:
        logger.debug(f"{kind} moment of order {r} = {raw:.3g} lies outside the open range; not pulled back")
    return MomentReport(
        order=int(r),
        kind=kind,
        raw_coordinate_moment=raw,
        pulled_back=pulled_back,
        centred=kind != INITIAL,
        defined=defined,
        chart=c.name,
    )


def initial_moment(source: Source, c: Chart, r: int,
                   quad: Optional[QuadratureSpec] = None) -> MomentReport:
    """
    Initial Kolmogorov moment E[G(X)^r]

    Args:
        source: Observations or a Distribution
        c: Chart
        r: Order, at least 1
    """
    _check_order(r)
    raw, _ = expect_coordinate(source, c, lambda u: u ** r, quad)
    return _moment_report(c, r, INITIAL, raw)


def _centred(source: Source, c: Chart, r: int, absolute: bool,
             quad: Optional[QuadratureSpec]) -> float:
    mean, _ = expect_coordinate(source, c, quad=quad)
    if absolute:
        return expect_coordinate(source, c, lambda u: np.abs(u - mean) ** r, quad)[0]
    return expect_coordinate(source, c, lambda u: (u - mean) ** r, quad)[0]


def centred_moment(source: Source, c: Chart, r: int,
                   quad: Optional[QuadratureSpec] = None) -> MomentReport:
    """
    Centred Kolmogorov moment E[(G(X) - E G(X))^r]

    Zero and negative values (odd orders) are reported raw with defined=False.
    """
    _check_order(r)
    raw = _centred(source, c, r, absolute=False, quad=quad)
    return _moment_report(c, r, CENTRED, raw)


def kolmogorov_variance(source: Source, c: Chart,
                        quad: Optional[QuadratureSpec] = None) -> MomentReport:
    """Second centred Kolmogorov moment, pulled back when inside the range"""
    return centred_moment(source, c, 2, quad)


def absolute_centred_moment(source: Source, c: Chart, r: int,
                            quad: Optional[QuadratureSpec] = None) -> MomentReport:
    """E[|G(X) - E G(X)|^r]"""
    _check_order(r)
    raw = _centred(source, c, r, absolute=True, quad=quad)
    return _moment_report(c, r, ABSOLUTE, raw)


def pseudo_mgf(source: Source, c: Chart, t: float,
               quad: Optional[QuadratureSpec] = None) -> float:
    """phi(t) = E[exp(t G(X))], finite for every real t"""
    if t == 0:
        return 1.0
    value, _ = expect_coordinate(source, c, lambda u: np.exp(t * u), quad)
    return value


def pseudo_mgf_finite_difference(source: Source, c: Chart, k: int, h: float = 1e-5,
                                 quad: Optional[QuadratureSpec] = None) -> float:
    """
    k-th derivative of phi at 0 by the central binomial stencil

        phi^(k)(0) ~ h^-k * sum_j (-1)^j C(k, j) phi((k/2 - j) h)
    """
    if k < 1:
        raise InvalidParameter(f"derivative order must be >= 1, got {k}")
    total = math.fsum(
        (-1) ** j * math.comb(k, j) * pseudo_mgf(source, c, (0.5 * k - j) * h, quad)
        for j in range(k + 1)
    )
    return total / h ** k


def pseudo_mgf_derivative(source: Source, c: Chart, k: int, cross_check: bool = False,
                          h: float = 1e-5, quad: Optional[QuadratureSpec] = None) -> float:
    """
    k-th derivative of phi at 0, which equals the raw moment E[G(X)^k]

    The value comes from the moment identity, not from differentiation. With
    cross_check=True it is compared against pseudo_mgf_finite_difference and
    a disagreement is logged.
    """
    if k < 0 or int(k) != k:
        raise InvalidParameter(f"derivative order must be a non-negative integer, got {k}")
    if k == 0:
        return 1.0

    value = initial_moment(source, c, k, quad).raw_coordinate_moment
    if cross_check:
        approx = pseudo_mgf_finite_difference(source, c, k, h, quad)
        # truncation O(h^2) plus cancellation ~ eps / h^k
        tolerance = 10.0 * (h * h + 1e-16 / h ** k) + 1e-8
        if abs(approx - value) > tolerance:
            logger.warning(
                f"Finite-difference derivative {approx:.12g} of the pseudo-generating function "
                f"disagrees with the moment identity {value:.12g} (order {k}, h={h:g})"
            )
    return value
