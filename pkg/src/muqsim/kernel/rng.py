"""Counter-based seeding so results do not depend on execution order."""

from __future__ import annotations

import numpy as np


def task_rng(seed: int, sample: int = 0, time_index: int = 0, axis: int = 0) -> np.random.Generator:
    """Independent generator for one ``(seed, sample, time, axis)`` task."""
    if seed is None:
        raise ValueError("a seed is required for stochastic methods")
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(sample), int(time_index), int(axis)]))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
