"""
Parametric probability laws: cdf, pdf, quantile and seeded inverse-transform sampling.

Distributions double as chart generators (see src.charts) and as the
data-generating processes of the simulation harness.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import special

from src.errors import InsufficientData, InvalidParameter, OutOfRange
from src.random_streams import open_uniforms

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]
# An ordered finite sequence of real observations
Sample = np.ndarray


class Family(Enum):
    """Supported continuous families, valued by their CLI names"""

    UNIFORM = 'uniform'
    NORMAL = 'normal'
    LOGISTIC = 'logistic'
    CAUCHY = 'cauchy'
    STUDENT_T = 'studentt'
    PARETO = 'pareto'
    EXPONENTIAL = 'exponential'


# Parameter names per family, in CLI order
PARAMETER_NAMES = {
    Family.UNIFORM: ('a', 'b'),
    Family.NORMAL: ('mu', 'sigma'),
    Family.LOGISTIC: ('mu', 's'),
    Family.CAUCHY: ('x0', 'gamma'),
    Family.STUDENT_T: ('nu',),
    Family.PARETO: ('x_m', 'alpha'),
    Family.EXPONENTIAL: ('lam',),
}

FAMILY_ALIASES = {
    't': Family.STUDENT_T,
    'student': Family.STUDENT_T,
    'gaussian': Family.NORMAL,
    'exp': Family.EXPONENTIAL,
}


def _as_output(x: ArrayLike, result: np.ndarray) -> Union[float, np.ndarray]:
    """Return a float for scalar input and an array otherwise"""
    if np.ndim(x) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class Distribution:
    """
    An immutable parametric law.

    Values are plain data, so they are safe to share between threads;
    sampling takes an explicit seed and keeps no generator state.
    """

    family: Family
    params: Tuple[float, ...]

    def __post_init__(self):
        names = PARAMETER_NAMES[self.family]
        if len(self.params) != len(names):
            raise InvalidParameter(
                f"{self.family.value} expects {len(names)} parameters ({', '.join(names)}), got {len(self.params)}"
            )
        values = tuple(float(p) for p in self.params)
        if not all(math.isfinite(v) for v in values):
            raise InvalidParameter(f"{self.family.value} parameters must be finite, got {values}")
        object.__setattr__(self, 'params', values)

        family = self.family
        if family is Family.UNIFORM:
            a, b = values
            if not a < b:
                raise InvalidParameter(f"uniform requires a < b, got a={a}, b={b}")
        elif family is Family.STUDENT_T or family is Family.EXPONENTIAL:
            if values[0] <= 0:
                raise InvalidParameter(f"{family.value} requires {names[0]} > 0, got {values[0]}")
        elif family is Family.PARETO:
            if values[0] <= 0 or values[1] <= 0:
                raise InvalidParameter(f"pareto requires x_m > 0 and alpha > 0, got {values}")
        else:
            # location-scale families
            if values[1] <= 0:
                raise InvalidParameter(f"{family.value} requires {names[1]} > 0, got {values[1]}")

    # Convenience constructors
    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> 'Distribution':
        return cls(Family.UNIFORM, (a, b))

    @classmethod
    def normal(cls, mu: float = 0.0, sigma: float = 1.0) -> 'Distribution':
        return cls(Family.NORMAL, (mu, sigma))

    @classmethod
    def logistic(cls, mu: float = 0.0, s: float = 1.0) -> 'Distribution':
        return cls(Family.LOGISTIC, (mu, s))

    @classmethod
    def cauchy(cls, x0: float = 0.0, gamma: float = 1.0) -> 'Distribution':
        return cls(Family.CAUCHY, (x0, gamma))

    @classmethod
    def student_t(cls, nu: float) -> 'Distribution':
        return cls(Family.STUDENT_T, (nu,))

    @classmethod
    def pareto(cls, x_m: float, alpha: float) -> 'Distribution':
        return cls(Family.PARETO, (x_m, alpha))

    @classmethod
    def exponential(cls, lam: float = 1.0) -> 'Distribution':
        return cls(Family.EXPONENTIAL, (lam,))

    @property
    def name(self) -> str:
        """CLI-style description, e.g. ``normal:0,1``"""
        return f"{self.family.value}:{','.join(f'{p:g}' for p in self.params)}"

    @property
    def support(self) -> Tuple[float, float]:
        """Interior of the support as an open interval"""
        family = self.family
        if family is Family.UNIFORM:
            return self.params[0], self.params[1]
        if family is Family.PARETO:
            return self.params[0], math.inf
        if family is Family.EXPONENTIAL:
            return 0.0, math.inf
        return -math.inf, math.inf

    def cdf(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """
        P(X <= x)

        Args:
            x: Scalar or array of reals (infinities allowed)

        Returns:
            Probabilities in [0, 1], same shape as x
        """
        xs = np.asarray(x, dtype=float)
        family, p = self.family, self.params

        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            if family is Family.NORMAL:
                result = special.ndtr((xs - p[0]) / p[1])
            elif family is Family.LOGISTIC:
                result = special.expit((xs - p[0]) / p[1])
            elif family is Family.CAUCHY:
                # arctan2 form keeps precision in the lower tail
                result = np.arctan2(1.0, -(xs - p[0]) / p[1]) / np.pi
            elif family is Family.STUDENT_T:
                result = self._student_t_cdf(xs)
            elif family is Family.UNIFORM:
                result = np.clip((xs - p[0]) / (p[1] - p[0]), 0.0, 1.0)
            elif family is Family.PARETO:
                ratio = np.where(xs > p[0], p[0] / np.where(xs > p[0], xs, p[0]), 1.0)
                result = -np.expm1(p[1] * np.log(ratio))
            else:
                positive = np.where(xs > 0, xs, 0.0)
                result = -np.expm1(-p[0] * positive)

        return _as_output(x, np.asarray(result, dtype=float))

    def _student_t_cdf(self, t: np.ndarray) -> np.ndarray:
        """Student-t cdf through the regularized incomplete beta function"""
        nu = self.params[0]
        t2 = t * t
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            z = nu / (nu + t2)
            w = t2 / (nu + t2)
        z = np.where(np.isinf(t), 0.0, z)
        tail = 0.5 * special.betainc(0.5 * nu, 0.5, z)
        outer = np.where(t < 0, tail, 1.0 - tail)
        # near the centre z is close to 1 and loses digits; use the complementary argument
        inner = 0.5 + np.sign(t) * 0.5 * special.betainc(0.5, 0.5 * nu, np.where(t2 < nu, w, 0.0))
        return np.where(t2 < nu, inner, outer)

    def pdf(self, x: ArrayLike) -> Union[float, np.ndarray]:
        """Density, zero outside the support"""
        xs = np.asarray(x, dtype=float)
        family, p = self.family, self.params

        with np.errstate(divide='ignore', invalid='ignore', over='ignore', under='ignore'):
            if family is Family.NORMAL:
                z = (xs - p[0]) / p[1]
                result = np.exp(-0.5 * z * z) / (p[1] * math.sqrt(2.0 * math.pi))
            elif family is Family.LOGISTIC:
                z = (xs - p[0]) / p[1]
                result = special.expit(z) * special.expit(-z) / p[1]
            elif family is Family.CAUCHY:
                z = (xs - p[0]) / p[1]
                result = 1.0 / (math.pi * p[1] * (1.0 + z * z))
            elif family is Family.STUDENT_T:
                nu = p[0]
                log_norm = special.gammaln(0.5 * (nu + 1)) - special.gammaln(0.5 * nu) - 0.5 * math.log(nu * math.pi)
                result = np.exp(log_norm - 0.5 * (nu + 1) * np.log1p(xs * xs / nu))
            elif family is Family.UNIFORM:
                inside = (xs >= p[0]) & (xs <= p[1])
                result = np.where(inside, 1.0 / (p[1] - p[0]), 0.0)
            elif family is Family.PARETO:
                safe = np.where(xs >= p[0], xs, p[0])
                result = np.where(xs >= p[0], p[1] * p[0] ** p[1] / safe ** (p[1] + 1), 0.0)
            else:
                safe = np.where(xs >= 0, xs, 0.0)
                result = np.where(xs >= 0, p[0] * np.exp(-p[0] * safe), 0.0)

        result = np.where(np.isfinite(xs), result, 0.0)
        return _as_output(x, np.asarray(result, dtype=float))

    def quantile(self, q: ArrayLike) -> Union[float, np.ndarray]:
        """
        Inverse cdf on the open unit interval

        Args:
            q: Probability level(s), each strictly inside (0, 1)

        Returns:
            x with cdf(x) = q

        Raises:
            OutOfRange: if any level lies outside (0, 1)
        """
        qs = np.asarray(q, dtype=float)
        if not np.all((qs > 0.0) & (qs < 1.0)):
            raise OutOfRange(f"quantile levels must lie in (0, 1), got {q}")

        family, p = self.family, self.params
        if family is Family.NORMAL:
            result = p[0] + p[1] * special.ndtri(qs)
        elif family is Family.LOGISTIC:
            result = p[0] + p[1] * special.logit(qs)
        elif family is Family.CAUCHY:
            result = p[0] + p[1] * np.tan(np.pi * (qs - 0.5))
        elif family is Family.STUDENT_T:
            result = special.stdtrit(p[0], qs)
        elif family is Family.UNIFORM:
            result = p[0] + qs * (p[1] - p[0])
        elif family is Family.PARETO:
            result = p[0] * np.exp(-np.log1p(-qs) / p[1])
        else:
            result = -np.log1p(-qs) / p[0]

        return _as_output(q, np.asarray(result, dtype=float))

    def median(self) -> float:
        return float(self.quantile(0.5))

    def sample(self, n: int, seed: int, stream: int = 0) -> Sample:
        """
        Draw n i.i.d. observations by inverse-transform sampling

        Args:
            n: Sample size, at least 1
            seed: Master seed; equal (seed, stream, n) give bit-identical output
            stream: Sub-stream index, used for simulation replicates

        Returns:
            Array of n draws
        """
        uniforms = open_uniforms(seed, n, stream)
        return np.asarray(self.quantile(uniforms), dtype=float)


def sample(d: Distribution, n: int, seed: int) -> Sample:
    """Seeded i.i.d. sample from d (stream 0)"""
    return d.sample(n, seed)


def as_sample(values: ArrayLike, minimum: int = 1) -> Sample:
    """
    Validate observations as a one-dimensional array of finite floats

    Args:
        values: Observations in their original order
        minimum: Smallest acceptable number of observations

    Returns:
        Float array (a copy when conversion was needed)
    """
    data = np.asarray(values, dtype=float)
    if data.ndim == 0:
        data = data.reshape(1)
    if data.ndim != 1:
        raise InvalidParameter(f"a sample must be one-dimensional, got shape {data.shape}")
    if data.size < minimum:
        raise InsufficientData(f"need at least {minimum} observations, got {data.size}")
    if not np.all(np.isfinite(data)):
        raise InvalidParameter("sample contains NaN or infinite values")
    return data


def parse_distribution(spec: str) -> Distribution:
    """
    Parse a CLI distribution string such as ``normal:0,1`` or ``pareto:1,2.5``

    Raises:
        InvalidParameter: for unknown families, malformed numbers or violated constraints
    """
    text = spec.strip()
    family_name, _, param_text = text.partition(':')
    key = family_name.strip().lower()

    try:
        family = FAMILY_ALIASES.get(key) or Family(key)
    except ValueError:
        known = ', '.join(f.value for f in Family)
        raise InvalidParameter(f"unknown distribution family {family_name!r} (expected one of {known})")

    try:
        params = tuple(float(v) for v in param_text.split(',')) if param_text.strip() else ()
    except ValueError:
        raise InvalidParameter(f"could not parse parameters in {spec!r}")

    return Distribution(family, params)
