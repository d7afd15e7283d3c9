"""Seed-substream derivation.

All randomness flows from one root seed; every stage/group draws from a
named substream so partial pipelines reproduce bit-identically.
"""

import zlib

import numpy as np


def _tag_to_int(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode())


def substream(seed, *tags):
    """Generator for the substream named by ``tags`` under ``seed``."""
    key = tuple(_tag_to_int(t) for t in tags)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))
