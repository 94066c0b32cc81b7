#!/usr/bin/env python3
"""
Utilities for reading configuration values from the environment.
"""

import os
import logging
from typing import Optional

# Configure logging
logger = logging.getLogger(__name__)

def env_str(name: str, default: Optional[str] = None) -> Optional[str]:
    """
    Read a string setting, treating empty values as unset

    Args:
        name: Environment variable name
        default: Value returned when the variable is missing or blank

    Returns:
        The stripped value or the default
    """
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    return value.strip()

def env_int(name: str, default: Optional[int] = None, minimum: Optional[int] = None) -> Optional[int]:
    """
    Safely read an integer setting.

    Args:
        name: Environment variable name
        default: Fallback when the variable is missing or cannot be converted
        minimum: Smallest accepted value; smaller values fall back to the default

    Returns:
        The parsed integer, or the default
    """
    raw = env_str(name)
    if raw is None:
        return default

    try:
        value = int(raw)
    except (ValueError, TypeError) as e:
        logger.warning(f"Could not parse {name}={raw!r} as an integer: {e}")
        return default

    if minimum is not None and value < minimum:
        logger.warning(f"{name}={value} is below the minimum {minimum}; using {default}")
        return default
    return value

def thread_count() -> Optional[int]:
    """
    Worker cap for replicate-parallel simulations.

    Read at call time so a single process can be reconfigured between runs.
    None means "let the executor decide".
    """
    return env_int('PROBGEO_THREADS', None, minimum=1)
