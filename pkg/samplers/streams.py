"""
samplers/streams.py — Counter-based random streams.

Every random draw in a run comes from the stream keyed by (seed, walker, iteration, stage).
Streams never depend on execution order, so sequential, threaded and differently-sized
worker pools produce bit-identical chains.
"""

from __future__ import annotations

import numpy as np

from core.constants import Stage


class StreamFactory:
    """Philox generators seeded by SeedSequence(seed, spawn_key=(walker, iteration, stage))."""

    def __init__(self, seed: int) -> None:
        self.seed = int(seed)

    def stream(self, walker: int, iteration: int, stage: str) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.seed,
            spawn_key=(int(walker), int(iteration), Stage.index(stage)),
        )
        return np.random.Generator(np.random.Philox(seq))

    def __repr__(self) -> str:
        return f"StreamFactory(seed={self.seed})"


class PermutedStreams(StreamFactory):
    """
    Streams with walker labels relabelled through `perm` (walker i reads the stream of
    walker perm[i]). Used to check that walker-independent stages are exchangeable.
    """

    def __init__(self, seed: int, perm: np.ndarray) -> None:
        super().__init__(seed)
        self.perm = np.asarray(perm, dtype=int)

    def stream(self, walker: int, iteration: int, stage: str) -> np.random.Generator:
        return super().stream(int(self.perm[walker]), iteration, stage)
