"""Deterministic seed derivation.

Every randomized routine takes a master seed and derives per-task streams
from (master seed, label parts).  Merged results are therefore independent
of execution order and schedule.
"""

import hashlib

import numpy as np

DEFAULT_SEED = 20240 + 5


def derive_seed(master, *parts):
    """A 64-bit stream seed from a master seed and hashable labels."""
    text = repr((int(master),) + tuple(parts)).encode()
    digest = hashlib.sha256(text).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(master, *parts):
    return np.random.default_rng(derive_seed(master, *parts))
