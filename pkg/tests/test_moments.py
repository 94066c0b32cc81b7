"""
Tests for the moments module.
"""
import math
import os
import sys
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.charts import chart_from_distribution
from src.distributions import Distribution
from src.errors import InvalidParameter
from src.moments import (
    absolute_centred_moment,
    centred_moment,
    initial_moment,
    kolmogorov_variance,
    pseudo_mgf,
    pseudo_mgf_derivative,
    pseudo_mgf_finite_difference,
)
from tests.mock_data import SYMMETRIC_PAIR

INTRINSIC_LAWS = [Distribution.normal(), Distribution.cauchy(), Distribution.pareto(1.0, 2.0)]


class TestKolmogorovMoments(unittest.TestCase):
    """Test cases for moments of the probability coordinate."""

    def setUp(self):
        """Build the Gaussian benchmark chart."""
        self.gauss = chart_from_distribution(Distribution.normal())

    def test_intrinsic_moments(self):
        """Test E[F(X)^r] = 1/(r+1) for r = 1..8 under each law's own chart."""
        for d in INTRINSIC_LAWS:
            chart = chart_from_distribution(d)
            for r in range(1, 9):
                report = initial_moment(d, chart, r)
                self.assertAlmostEqual(report.raw_coordinate_moment, 1.0 / (r + 1), delta=1e-9,
                                       msg=f"{d.name} r={r}")
                self.assertTrue(report.defined)
                self.assertFalse(report.centred)

    def test_intrinsic_variance(self):
        """Test that the intrinsic Kolmogorov variance is 1/12 and its pullback."""
        d = Distribution.normal()
        report = kolmogorov_variance(d, self.gauss)
        self.assertAlmostEqual(report.raw_coordinate_moment, 1.0 / 12.0, delta=1e-9)
        self.assertAlmostEqual(report.pulled_back, float(special.ndtri(1.0 / 12.0)), places=8)
        self.assertEqual(report.order, 2)
        self.assertEqual(report.kind, 'centred')

    def test_empirical_variance_near_one_twelfth(self):
        """Test the sample coordinate variance against 1/12 at n = 1e5."""
        d = Distribution.normal()
        report = kolmogorov_variance(d.sample(100000, seed=2), self.gauss)
        # standard error of the variance of a uniform: sqrt((1/80 - 1/144) / n)
        bound = 3.0 * math.sqrt((1.0 / 80.0 - 1.0 / 144.0) / 100000)
        self.assertAlmostEqual(report.raw_coordinate_moment, 1.0 / 12.0, delta=bound)

    def test_odd_centred_moment_not_pulled_back(self):
        """Test that a vanishing third centred moment is reported raw only."""
        report = centred_moment(Distribution.normal(), self.gauss, 3)
        self.assertAlmostEqual(report.raw_coordinate_moment, 0.0, delta=1e-10)
        self.assertFalse(report.defined)
        self.assertIsNone(report.pulled_back)

    def test_absolute_centred_moment(self):
        """Test E|U - 1/2| = 1/4 under the intrinsic chart."""
        report = absolute_centred_moment(Distribution.cauchy(), chart_from_distribution(Distribution.cauchy()), 1)
        self.assertAlmostEqual(report.raw_coordinate_moment, 0.25, delta=1e-9)
        self.assertEqual(report.kind, 'absolute')

    def test_sample_moment(self):
        """Test a moment of a small sample."""
        report = initial_moment(SYMMETRIC_PAIR, self.gauss, 1)
        self.assertAlmostEqual(report.raw_coordinate_moment, 0.5, places=15)
        self.assertAlmostEqual(report.pulled_back, 0.0, places=12)

    def test_heavy_tails_have_every_moment(self):
        """Test that Cauchy data has finite Kolmogorov moments of every order."""
        d = Distribution.cauchy()
        for r in (1, 2, 5, 12):
            value = initial_moment(d, self.gauss, r).raw_coordinate_moment
            self.assertTrue(0.0 < value < 1.0)

    @given(st.lists(st.floats(min_value=-4, max_value=4), min_size=1, max_size=25))
    @settings(max_examples=100, deadline=None)
    def test_moment_orderings_for_samples(self, values):
        """Test that E[U^r] falls with r while E[U^r]^(1/r) rises (Lyapunov)."""
        self._check_orderings(values, tol=1e-12)

    def test_moment_orderings_for_a_law(self):
        """Test the same orderings for a Cauchy law under the Gaussian chart."""
        self._check_orderings(Distribution.cauchy(), tol=1e-9)

    def _check_orderings(self, source, tol):
        moments = [initial_moment(source, self.gauss, r).raw_coordinate_moment for r in range(1, 9)]
        for r, (low, high) in enumerate(zip(moments, moments[1:]), start=1):
            self.assertLessEqual(high, low + tol)
            self.assertLessEqual(low ** (1.0 / r), high ** (1.0 / (r + 1)) + tol)

    def test_report_keys(self):
        """Test the fixed report schema."""
        report = initial_moment(SYMMETRIC_PAIR, self.gauss, 2)
        self.assertEqual(
            list(report.to_dict()),
            ['order', 'kind', 'raw_coordinate_moment', 'pulled_back', 'centred', 'defined', 'chart'],
        )

    def test_invalid_order(self):
        """Test that orders below 1 are rejected."""
        with self.assertRaises(InvalidParameter):
            initial_moment(SYMMETRIC_PAIR, self.gauss, 0)
        with self.assertRaises(InvalidParameter):
            centred_moment(SYMMETRIC_PAIR, self.gauss, 1.5)


class TestPseudoGeneratingFunction(unittest.TestCase):
    """Test cases for phi(t) = E[exp(t U)]."""

    def setUp(self):
        """Use the standard normal under its own chart, so U is uniform."""
        self.d = Distribution.normal()
        self.chart = chart_from_distribution(self.d)

    def test_value(self):
        """Test phi(t) = (e^t - 1)/t for a uniform coordinate."""
        self.assertEqual(pseudo_mgf(self.d, self.chart, 0.0), 1.0)
        self.assertAlmostEqual(pseudo_mgf(self.d, self.chart, 1.0), math.e - 1.0, delta=1e-9)
        self.assertAlmostEqual(pseudo_mgf(self.d, self.chart, -2.0), (1.0 - math.exp(-2.0)) / 2.0, delta=1e-9)

    def test_derivatives_are_moments(self):
        """Test that phi^(k)(0) equals the k-th initial moment."""
        self.assertEqual(pseudo_mgf_derivative(self.d, self.chart, 0), 1.0)
        for k in range(1, 6):
            value = pseudo_mgf_derivative(self.d, self.chart, k)
            expected = initial_moment(self.d, self.chart, k).raw_coordinate_moment
            self.assertAlmostEqual(value, expected, delta=1e-10)

    def test_finite_difference(self):
        """Test the central-difference derivatives against 1/(k+1)."""
        self.assertAlmostEqual(pseudo_mgf_finite_difference(self.d, self.chart, 1), 0.5, delta=1e-6)
        self.assertAlmostEqual(pseudo_mgf_finite_difference(self.d, self.chart, 2, h=1e-3), 1.0 / 3.0, delta=1e-5)

    def test_cross_check_agrees(self):
        """Test that the finite-difference cross-check returns the moment value."""
        value = pseudo_mgf_derivative(self.d, self.chart, 1, cross_check=True)
        self.assertAlmostEqual(value, 0.5, delta=1e-9)

    def test_invalid_derivative_order(self):
        """Test that negative derivative orders are rejected."""
        with self.assertRaises(InvalidParameter):
            pseudo_mgf_derivative(self.d, self.chart, -1)
        with self.assertRaises(InvalidParameter):
            pseudo_mgf_finite_difference(self.d, self.chart, 0)


if __name__ == '__main__':
    unittest.main()
