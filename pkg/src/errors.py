"""
Exception hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI should return for it.
"""

from typing import Optional


class ProbGeoError(Exception):
    """Base class for all probgeo errors"""

    exit_code = 1


class InvalidParameter(ProbGeoError, ValueError):
    """A distribution, chart or routine was given parameters outside their constraints"""


class OutOfRange(ProbGeoError, ValueError):
    """A probability level or band width lies outside its admissible interval"""


class DomainViolation(ProbGeoError, ValueError):
    """An observation lies outside the domain of a chart"""

    def __init__(self, message: str, component: Optional[int] = None):
        if component is not None:
            message = f"column {component}: {message}"
        super().__init__(message)
        self.component = component


class NonInvertible(ProbGeoError):
    """A map failed its inversion round-trip check"""


class InsufficientData(ProbGeoError, ValueError):
    """Too few (distinct) observations for the requested construction"""


class BoundaryValue(ProbGeoError):
    """A coordinate mean reached the edge of the chart's range, so the pullback is meaningless"""

    def __init__(self, message: str, component: Optional[int] = None):
        if component is not None:
            message = f"column {component}: {message}"
        super().__init__(message)
        self.component = component


class QuadratureFailure(ProbGeoError):
    """Adaptive quadrature could not reach the requested accuracy"""


class DerivativeUnavailable(ProbGeoError):
    """The chart has no usable derivative at the point of interest"""


class DegenerateSample(ProbGeoError):
    """The sample has zero coordinate variance"""


class IoError(ProbGeoError):
    """An input file could not be read"""


class ParseError(ProbGeoError):
    """An input value could not be parsed as a finite float"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyInput(ProbGeoError):
    """An input file held no data rows"""


class UsageError(ProbGeoError):
    """Invalid command-line usage"""

    exit_code = 2
