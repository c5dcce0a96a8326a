"""Seedable RNG streams with stable split-by-index substreams.

Every sampler in the package takes a ``random.Random`` instance.  Parallel
replicas each get their own substream derived from ``(base_seed, index)``
through SHA-256, so results are reproducible regardless of scheduling and
identical across platforms.
"""

from __future__ import annotations

import hashlib
import random

__all__ = ["make_rng", "substream"]


def _derive(*parts: int) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:16], "big")


def make_rng(seed: int) -> random.Random:
    """Root stream for a base seed."""
    return random.Random(_derive(seed))


def substream(seed: int, index: int) -> random.Random:
    """Independent stream for replica ``index`` of base ``seed``."""
    return random.Random(_derive(seed, index))
