"""
Tests for the tails module.
"""
import math
import os
import sys
import unittest

import numpy as np
from scipy import special

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.charts import affine_transform, chart_from_distribution
from src.distributions import Distribution
from src.errors import DomainViolation, InvalidParameter, OutOfRange
from src.tails import boundary_concentration_index, boundary_mass


class TestBoundaryMass(unittest.TestCase):
    """Test cases for boundary concentration of probability coordinates."""

    def setUp(self):
        """Build the Gaussian benchmark chart."""
        self.gauss = chart_from_distribution(Distribution.normal())

    def test_cauchy_under_gaussian_chart(self):
        """Test the exact band masses of a Cauchy law viewed through the Gaussian chart."""
        report = boundary_mass(Distribution.cauchy(), self.gauss, 0.01)
        expected = 0.5 - math.atan(float(special.ndtri(0.99))) / math.pi
        self.assertAlmostEqual(report.upper_mass, expected, places=12)
        self.assertAlmostEqual(report.lower_mass, expected, places=12)
        self.assertGreater(report.upper_mass, 0.12)
        self.assertEqual(report.n, 0)

    def test_intrinsic_band_mass_is_epsilon(self):
        """Test that a law under its own chart puts mass epsilon in each band."""
        report = boundary_mass(Distribution.normal(), self.gauss, 0.05)
        self.assertAlmostEqual(report.lower_mass, 0.05, places=12)
        self.assertAlmostEqual(report.upper_mass, 0.05, places=12)

    def test_reversed_chart(self):
        """Test band masses under the decreasing chart 1 - G."""
        flipped = affine_transform(self.gauss, -1.0, 1.0)
        report = boundary_mass(Distribution.logistic(), flipped, 0.1)
        direct = boundary_mass(Distribution.logistic(), self.gauss, 0.1)
        self.assertAlmostEqual(report.lower_mass, direct.upper_mass, places=12)
        self.assertAlmostEqual(report.upper_mass, direct.lower_mass, places=12)

    def test_sample_frequencies(self):
        """Test empirical band frequencies."""
        values = np.array([-3.0, -2.0, 0.0, 0.1, 0.2, 3.0, 4.0, 0.3])
        report = boundary_mass(values, self.gauss, 0.01)
        self.assertEqual(report.lower_mass, 0.125)
        self.assertEqual(report.upper_mass, 0.25)
        self.assertEqual(report.n, 8)

    def test_high_order_moments(self):
        """Test that requested orders add moments and concentration indices."""
        d = Distribution.cauchy()
        report = boundary_mass(d, chart_from_distribution(d), 0.1, orders=(2, 4, 8))
        for r in (2, 4, 8):
            self.assertAlmostEqual(report.high_order_moments[r], 1.0 / (r + 1), delta=1e-9)
            self.assertAlmostEqual(report.concentration_index[r], 2.0 / (r + 1), delta=1e-9)
        data = report.to_dict()
        self.assertEqual(sorted(data['high_order_moments']), ['2', '4', '8'])
        self.assertEqual(
            list(data),
            ['epsilon', 'lower_mass', 'upper_mass', 'high_order_moments', 'concentration_index', 'chart', 'n'],
        )

    def test_epsilon_range(self):
        """Test that epsilon must lie strictly between 0 and 1/2."""
        for eps in (0.0, 0.5, -0.1, 0.7):
            with self.assertRaises(OutOfRange):
                boundary_mass(Distribution.normal(), self.gauss, eps)

    def test_support_outside_chart_domain(self):
        """Test that a law reaching below a Pareto chart's domain is rejected."""
        pareto_chart = chart_from_distribution(Distribution.pareto(1.0, 2.0))
        with self.assertRaises(DomainViolation):
            boundary_mass(Distribution.normal(), pareto_chart, 0.01)
        with self.assertRaises(DomainViolation):
            boundary_mass([0.5, 2.0], pareto_chart, 0.01)

    def test_chart_must_map_onto_unit_interval(self):
        """Test that a scaled chart is rejected."""
        scaled = affine_transform(self.gauss, 2.0, 0.0)
        with self.assertRaises(InvalidParameter):
            boundary_mass(Distribution.normal(), scaled, 0.1)


class TestConcentrationIndex(unittest.TestCase):
    """Test cases for E[U^r] + E[(1 - U)^r]."""

    def setUp(self):
        """Build the Gaussian benchmark chart."""
        self.gauss = chart_from_distribution(Distribution.normal())

    def test_point_mass_at_median(self):
        """Test the minimum 2^(1-r) for a sample concentrated at the chart median."""
        for r in (1, 2, 6):
            self.assertAlmostEqual(boundary_concentration_index([0.0, 0.0, 0.0], self.gauss, r), 2.0 ** (1 - r),
                                   places=15)

    def test_heavy_tails_concentrate_more(self):
        """Test that Cauchy coordinates sit closer to the boundary than normal ones."""
        cauchy = boundary_concentration_index(Distribution.cauchy(), self.gauss, 8)
        normal = boundary_concentration_index(Distribution.normal(), self.gauss, 8)
        self.assertAlmostEqual(normal, 2.0 / 9.0, delta=1e-9)
        self.assertGreater(cauchy, normal)

    def test_student_t_index_falls_with_degrees_of_freedom(self):
        """Test that lighter Student-t tails never raise the index, ending at the normal value 2/(r+1)."""
        laws = [Distribution.student_t(nu) for nu in (1.0, 2.0, 4.0, 8.0)] + [Distribution.normal()]
        indices = [boundary_concentration_index(d, self.gauss, 4) for d in laws]
        for heavier, lighter in zip(indices, indices[1:]):
            self.assertGreaterEqual(heavier, lighter)
        self.assertAlmostEqual(indices[-1], 0.4, delta=1e-9)

    def test_invalid_order(self):
        """Test that orders below 1 are rejected."""
        with self.assertRaises(InvalidParameter):
            boundary_concentration_index(Distribution.normal(), self.gauss, 0)


if __name__ == '__main__':
    unittest.main()
