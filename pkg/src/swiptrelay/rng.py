"""Keyed random streams.

Every random draw in the package comes from a generator addressed by
``(seed, *key)``, e.g. ``(seed, location_set, trial)``. Results therefore
do not depend on evaluation order or on how work is split across workers.
"""

from __future__ import annotations

import numpy as np

SEED_MAX = 2**64 - 1

# first key component, keeps unrelated consumers on disjoint streams
SCENARIO = 0
CHANNEL = 1
MOMENTS = 2


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """A child u64 seed, for handing a sub-experiment its own seed space."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1): independent real and imaginary parts of variance 1/2."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)
