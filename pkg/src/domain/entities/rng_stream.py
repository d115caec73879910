from dataclasses import dataclass

import numpy as np

from domain.exceptions import DomainError

_UINT64_LIMIT = 2**64


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream identified by (master_seed, stream_index).

    Streams with distinct indices are spawned children of the same SeedSequence,
    so they are independent and cheap to construct on any worker.
    """

    master_seed: int
    stream_index: int

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not 0 <= value < _UINT64_LIMIT:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value}")

    def generator(self) -> np.random.Generator:
        seed_seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seed_seq))
