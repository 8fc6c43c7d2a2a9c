"""Seed derivation: one 64-bit seed, independent streams per (label, stage)."""

import zlib

import numpy as np


def _word(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & 0xFFFFFFFF
    return zlib.crc32(str(label).encode("utf-8"))


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """Generator keyed on ``seed`` and the stream labels.

    The same labels always give the same stream, regardless of what other
    streams were drawn before, so per-class work is order independent.
    """
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(_word(x) for x in labels))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *labels) -> int:
    return int(derive_rng(seed, *labels).integers(0, 2**63 - 1))
