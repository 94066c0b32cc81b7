"""
Asymptotics of empirical probability barycenters.

sqrt(n) (b_hat - b) -> N(0, Var(G(X)) / G'(b)^2) by the delta method.
This module computes plug-in standard errors, the exact target variance,
the intrinsic-chart constants, and runs seeded Monte Carlo experiments
for the law of large numbers and the central limit theorem.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from src.barycenter import (
    QuadratureSpec,
    barycenter_of_distribution,
    compensated_mean,
    coordinate_values,
    expect_coordinate,
    pull_back,
)
from src.charts import Chart, ChartKind
from src.distributions import ArrayLike, Distribution, as_sample
from src.env_utils import thread_count
from src.errors import DegenerateSample, DerivativeUnavailable, InsufficientData, InvalidParameter

# Set up logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AsymptoticReport:
    """Delta-method ingredients and the resulting standard error"""

    barycenter: float
    coordinate_variance: float
    chart_derivative_at_b: float
    asymptotic_variance: float
    stderr: float
    n: int
    kinked_derivative: bool
    chart: str

    def to_dict(self) -> Dict[str, object]:
        return {
            'barycenter': self.barycenter,
            'coordinate_variance': self.coordinate_variance,
            'chart_derivative_at_b': self.chart_derivative_at_b,
            'asymptotic_variance': self.asymptotic_variance,
            'stderr': self.stderr,
            'n': self.n,
            'kinked_derivative': self.kinked_derivative,
            'chart': self.chart,
        }


@dataclass(frozen=True)
class SimulationReport:
    """
    Outcome of a Monte Carlo experiment.

    For 'clt' runs there is one estimate per replicate. For 'lln' runs there
    is a single path and one estimate per entry of n_grid.
    """

    kind: str
    distribution: str
    chart: str
    seed: int
    n: int
    reps: int
    truth: float
    target_variance: float
    estimates: List[float]
    scaled_errors: List[float]
    n_grid: List[int] = field(default_factory=list)
    sample_means: List[float] = field(default_factory=list)
    empirical_variance: Optional[float] = None
    variance_defined: bool = False
    ks_statistic: Optional[float] = None
    ks_pvalue: Optional[float] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            'kind': self.kind,
            'distribution': self.distribution,
            'chart': self.chart,
            'seed': self.seed,
            'n': self.n,
            'reps': self.reps,
            'n_grid': list(self.n_grid),
            'truth': self.truth,
            'estimates': list(self.estimates),
            'scaled_errors': list(self.scaled_errors),
            'sample_means': list(self.sample_means),
            'empirical_variance': self.empirical_variance,
            'variance_defined': self.variance_defined,
            'target_variance': self.target_variance,
            'ks_statistic': self.ks_statistic,
            'ks_pvalue': self.ks_pvalue,
        }

    def envelope(self) -> List[float]:
        """3 sqrt(target / n) along n_grid"""
        return [3.0 * math.sqrt(self.target_variance / n) for n in self.n_grid]


def sample_variance(values: np.ndarray) -> float:
    """Unbiased (n - 1) variance with compensated sums"""
    mean = compensated_mean(values)
    return math.fsum(((values - mean) ** 2).tolist()) / (values.size - 1)


def _chart_slope(c: Chart, b: float) -> float:
    slope = abs(float(c.derivative(b)))
    if not (slope > 0 and math.isfinite(slope)):
        raise DerivativeUnavailable(f"chart {c.name} has derivative {slope:g} at the barycenter {b:.6g}")
    return slope


def delta_method_stderr(s: ArrayLike, c: Chart) -> AsymptoticReport:
    """
    Plug-in asymptotic standard error of the empirical barycenter

    Coordinate variance is the (n - 1) sample variance of G(x_i); the chart
    derivative is taken at the plug-in barycenter. For empirical charts the
    derivative is an average of one-sided slopes at knots and the report is
    flagged as kinked.

    Raises:
        InsufficientData: with fewer than 2 observations
        DegenerateSample: if all coordinates coincide
        DerivativeUnavailable: if the chart has no usable derivative
    """
    data = as_sample(s)
    if data.size < 2:
        raise InsufficientData(f"the delta method needs at least 2 observations, got {data.size}")

    u = coordinate_values(data, c)
    coordinate_variance = sample_variance(u)
    if coordinate_variance <= 0.0:
        raise DegenerateSample("all observations share the same probability coordinate")

    b, _ = pull_back(c, compensated_mean(u))
    slope = _chart_slope(c, b)
    kinked = c.kind is ChartKind.EMPIRICAL
    if kinked:
        logger.warning(f"Chart {c.name} is piecewise linear; using averaged one-sided slopes at {b:.6g}")

    asymptotic_variance = coordinate_variance / slope ** 2
    return AsymptoticReport(
        barycenter=b,
        coordinate_variance=coordinate_variance,
        chart_derivative_at_b=slope,
        asymptotic_variance=asymptotic_variance,
        stderr=math.sqrt(asymptotic_variance / data.size),
        n=int(data.size),
        kinked_derivative=kinked,
        chart=c.name,
    )


def _density_at_median(d: Distribution) -> float:
    m = d.median()
    f = float(d.pdf(m))
    if not f > 0:
        raise InvalidParameter(f"{d.name} has zero density at its median {m:g}")
    return f


def intrinsic_clt_variance(d: Distribution) -> float:
    """1 / (12 f(m)^2): asymptotic variance of the barycenter under the law's own chart"""
    return 1.0 / (12.0 * _density_at_median(d) ** 2)


def median_clt_variance(d: Distribution) -> float:
    """1 / (4 f(m)^2): asymptotic variance of the sample median"""
    return 1.0 / (4.0 * _density_at_median(d) ** 2)


def clt_target_variance(d: Distribution, c: Chart, quad: Optional[QuadratureSpec] = None) -> float:
    """Exact delta-method variance Var(G(X)) / G'(b)^2 from quadrature"""
    mean, _ = expect_coordinate(d, c, quad=quad)
    variance, _ = expect_coordinate(d, c, lambda u: (u - mean) ** 2, quad)
    b = barycenter_of_distribution(d, c, quad).barycenter
    return variance / _chart_slope(c, b) ** 2


def _replicate_barycenter(d: Distribution, c: Chart, n: int, seed: int, stream: int) -> float:
    draws = d.sample(n, seed, stream)
    value, _ = pull_back(c, compensated_mean(coordinate_values(draws, c)))
    return value


def run_lln_experiment(d: Distribution, c: Chart, n_grid: Sequence[int], seed: int,
                       quad: Optional[QuadratureSpec] = None) -> SimulationReport:
    """
    Follow one sample path and report the barycenter at each size in n_grid

    The classical running mean of the same draws is recorded alongside, so
    laws without a mean show the contrast.

    Args:
        d: Data-generating law
        c: Chart
        n_grid: Strictly increasing sample sizes
        seed: Master seed (the path uses stream 0)
    """
    grid = [int(n) for n in n_grid]
    if not grid or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter(f"n_grid must be strictly increasing positive counts, got {list(n_grid)}")

    truth = barycenter_of_distribution(d, c, quad).barycenter
    target = clt_target_variance(d, c, quad)
    logger.info(f"LLN experiment: {d.name} under {c.name}, n up to {grid[-1]}, seed {seed}")

    draws = d.sample(grid[-1], seed)
    u = coordinate_values(draws, c)

    estimates, scaled, means = [], [], []
    for n in grid:
        b_hat, _ = pull_back(c, compensated_mean(u[:n]))
        estimates.append(b_hat)
        scaled.append(math.sqrt(n) * (b_hat - truth))
        means.append(compensated_mean(draws[:n]))

    return SimulationReport(
        kind='lln',
        distribution=d.name,
        chart=c.name,
        seed=seed,
        n=grid[-1],
        reps=1,
        truth=truth,
        target_variance=target,
        estimates=estimates,
        scaled_errors=scaled,
        n_grid=grid,
        sample_means=means,
    )


def run_clt_experiment(d: Distribution, c: Chart, n: int, reps: int, seed: int,
                       quad: Optional[QuadratureSpec] = None,
                       max_workers: Optional[int] = None) -> SimulationReport:
    """
    Replicate the empirical barycenter and study sqrt(n) (b_hat - b)

    Replicate r draws from stream r of the master seed, and results are
    collected in replicate order, so the report is identical for any
    number of workers.

    Args:
        d: Data-generating law
        c: Chart
        n: Sample size per replicate
        reps: Number of replicates
        seed: Master seed
        max_workers: Thread cap; defaults to PROBGEO_THREADS

    Returns:
        SimulationReport with empirical and target variances and a KS
        normality check of the standardized scaled errors
    """
    if n < 1 or reps < 1:
        raise InvalidParameter(f"n and reps must be at least 1, got n={n}, reps={reps}")

    truth = barycenter_of_distribution(d, c, quad).barycenter
    target = clt_target_variance(d, c, quad)
    workers = max_workers if max_workers is not None else thread_count()
    logger.info(f"CLT experiment: {d.name} under {c.name}, n={n}, reps={reps}, seed {seed}, workers {workers or 'auto'}")

    streams = range(reps)
    if workers == 1:
        estimates = [_replicate_barycenter(d, c, n, seed, r) for r in streams]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            estimates = list(pool.map(lambda r: _replicate_barycenter(d, c, n, seed, r), streams))

    scaled = np.sqrt(n) * (np.asarray(estimates) - truth)

    empirical_variance = None
    ks_statistic = ks_pvalue = None
    if reps >= 2:
        empirical_variance = sample_variance(scaled)
        spread = math.sqrt(empirical_variance)
        if spread > 0:
            standardized = (scaled - compensated_mean(scaled)) / spread
            test = stats.kstest(standardized, 'norm')
            ks_statistic, ks_pvalue = float(test.statistic), float(test.pvalue)
    else:
        logger.warning("A single replicate has no empirical variance; report flagged")

    logger.info(f"CLT experiment finished: empirical variance {empirical_variance}, target {target:.6g}")
    return SimulationReport(
        kind='clt',
        distribution=d.name,
        chart=c.name,
        seed=seed,
        n=n,
        reps=reps,
        truth=truth,
        target_variance=target,
        estimates=[float(e) for e in estimates],
        scaled_errors=[float(e) for e in scaled],
        empirical_variance=empirical_variance,
        variance_defined=empirical_variance is not None,
        ks_statistic=ks_statistic,
        ks_pvalue=ks_pvalue,
    )
