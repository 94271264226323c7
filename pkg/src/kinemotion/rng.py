"""Seed derivation so parallel work order never changes any random stream."""

import zlib

import numpy as np


def _key_to_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def derive_seed_sequence(master_seed: int, *keys) -> np.random.SeedSequence:
    """Stable child seed for a (master, *keys) path; string keys are CRC-hashed."""
    return np.random.SeedSequence([int(master_seed)] + [_key_to_int(k) for k in keys])


def derive_rng(master_seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(master_seed, *keys))
