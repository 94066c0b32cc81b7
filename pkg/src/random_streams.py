"""
Deterministic random streams for simulations.

Every draw comes from numpy's counter-based Philox generator keyed by a
SeedSequence built from (seed, stream). Replicate r of an experiment uses
stream r, so results do not depend on execution order or thread count.
"""

import logging

import numpy as np

from src.errors import InvalidParameter

logger = logging.getLogger(__name__)

# 52 random bits per uniform, offset by half a unit; (k + 1/2) / 2^52 is exact in float64
_MANTISSA_BITS = 52
_SCALE = 2.0 ** -_MANTISSA_BITS


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Build the generator for one stream

    Args:
        seed: Non-negative master seed
        stream: Non-negative stream index (replicate number)

    Returns:
        A fresh numpy Generator backed by Philox
    """
    if seed < 0 or stream < 0:
        raise InvalidParameter(f"seed and stream must be non-negative, got seed={seed}, stream={stream}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def open_uniforms(seed: int, n: int, stream: int = 0) -> np.ndarray:
    """
    Draw n uniforms strictly inside (0, 1).

    u = (k + 1/2) / 2^52 with k uniform on {0, …, 2^52 - 1}, which keeps
    inverse-transform sampling away from infinite quantiles.
    """
    if n < 1:
        raise InvalidParameter(f"sample size must be at least 1, got {n}")
    bits = generator(seed, stream).integers(0, 2 ** _MANTISSA_BITS, size=n, dtype=np.uint64)
    return uniforms_from_bits(bits)


def uniforms_from_bits(bits: np.ndarray) -> np.ndarray:
    """Map integers in [0, 2^52) to the open-interval midpoints (k + 1/2) / 2^52"""
    return (np.asarray(bits, dtype=np.uint64).astype(np.float64) + 0.5) * _SCALE
