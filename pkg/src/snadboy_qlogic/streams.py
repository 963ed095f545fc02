"""Seeded per-trial random substreams.

Every trial draws from its own generator, keyed by (seed, key..., trial_id)
through ``numpy.random.SeedSequence`` spawn keys. A trial's draws therefore do
not depend on which worker runs it or in what order.
"""

from typing import Tuple

import numpy as np

from .exceptions import ConfigurationError

MAX_SEED = 2**64 - 1


class TrialStreams:
    """Factory of reproducible generators, one per trial id."""

    def __init__(self, seed: int = 42, key: Tuple[int, ...] = ()):
        if not 0 <= int(seed) <= MAX_SEED:
            raise ConfigurationError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)

    def derive(self, *key: int) -> "TrialStreams":
        """Independent family of substreams for a separate experiment."""
        return TrialStreams(self.seed, self.key + tuple(key))

    def generator(self, trial_id: int) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.key + (int(trial_id),))
        return np.random.Generator(np.random.PCG64(sequence))

    def uniforms(self, trial_id: int, count: int) -> np.ndarray:
        """``count`` uniforms in [0, 1) for one trial."""
        return self.generator(trial_id).random(count)

    def __repr__(self) -> str:
        return f"TrialStreams(seed={self.seed}, key={self.key})"
