"""
Tests for environment configuration helpers.
"""
import os
import sys
import unittest
from unittest.mock import patch

# Add the src directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.env_utils import env_int, env_str, thread_count


class TestEnvUtils(unittest.TestCase):
    """Test cases for env_utils module."""

    def test_env_str_blank_is_unset(self):
        """Test that blank values fall back to the default."""
        with patch.dict(os.environ, {'PROBGEO_TEST_VALUE': '   '}):
            self.assertEqual(env_str('PROBGEO_TEST_VALUE', 'fallback'), 'fallback')
        with patch.dict(os.environ, {'PROBGEO_TEST_VALUE': ' debug '}):
            self.assertEqual(env_str('PROBGEO_TEST_VALUE'), 'debug')

    def test_env_int_parsing(self):
        """Test integer parsing with bad input and minimums."""
        with patch.dict(os.environ, {'PROBGEO_TEST_VALUE': '12'}):
            self.assertEqual(env_int('PROBGEO_TEST_VALUE', 3), 12)
        with patch.dict(os.environ, {'PROBGEO_TEST_VALUE': 'twelve'}):
            with self.assertLogs('src.env_utils', level='WARNING'):
                self.assertEqual(env_int('PROBGEO_TEST_VALUE', 3), 3)
        with patch.dict(os.environ, {'PROBGEO_TEST_VALUE': '-4'}):
            with self.assertLogs('src.env_utils', level='WARNING'):
                self.assertEqual(env_int('PROBGEO_TEST_VALUE', 0, minimum=0), 0)

    def test_thread_count(self):
        """Test that the worker cap is read at call time."""
        with patch.dict(os.environ, {'PROBGEO_THREADS': '2'}):
            self.assertEqual(thread_count(), 2)
        with patch.dict(os.environ, {'PROBGEO_THREADS': '0'}):
            with self.assertLogs('src.env_utils', level='WARNING'):
                self.assertIsNone(thread_count())
        with patch.dict(os.environ, {}, clear=True):
            self.assertIsNone(thread_count())


if __name__ == '__main__':
    unittest.main()
