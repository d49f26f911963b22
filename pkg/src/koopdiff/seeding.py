"""Counter-based seed derivation.

Every random stream is keyed by the run seed plus a path of labels
(component name, observable name, chunk index).  Labels are hashed with
CRC-32, so adding an observable never shifts another observable's stream.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode("utf-8"))


def derive_seed_sequence(seed: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_key(p) for p in path))


def derive_rng(seed: int, *path) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(seed, *path))
