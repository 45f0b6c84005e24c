"""Deterministic, splittable random streams.

Every stochastic routine derives one counter-based generator per work item
from ``(seed, stream, index)``. Distinct keys give statistically independent
Philox streams, results never depend on batching or thread count, and the
same seed can drive several subsystems without their draws overlapping.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derived_rng", "TRAJECTORY", "HAAR_SCAN", "OPT_RESTART",
           "FEASIBLE_SCAN"]

# stream namespaces
TRAJECTORY = 0
HAAR_SCAN = 1
OPT_RESTART = 2
FEASIBLE_SCAN = 3

_MAX_SEED = 2**64
_MAX_INDEX = 2**56


def derived_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Generator for work item ``index`` of ``stream`` under ``seed``."""
    if not 0 <= seed < _MAX_SEED:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if not 0 <= stream < 256:
        raise ValueError(f"stream must be in [0, 255], got {stream}")
    if not 0 <= index < _MAX_INDEX:
        raise ValueError(f"index must be in [0, 2^56), got {index}")
    key = [seed, (stream << 56) + index]
    return np.random.Generator(np.random.Philox(key=key))
