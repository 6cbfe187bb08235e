"""
Path: app/services/random_streams.py
Description: Seed handling shared by the annealer, the simulator and the experiment runner
"""

from typing import Optional, Union
import numpy as np

Seed = Union[int, np.random.SeedSequence]


def as_seed_sequence(seed: Seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def generator(seed: Seed) -> np.random.Generator:
    return np.random.default_rng(as_seed_sequence(seed))


def seed_label(sequence: np.random.SeedSequence) -> Optional[int]:
    """The integer seed for a root sequence; spawned children have none."""
    entropy = sequence.entropy
    return int(entropy) if isinstance(entropy, int) and not sequence.spawn_key else None
