"""Counter-based random stream derivation.

Every random stream in the package is ``make_rng(master_seed, *keys)``: a
PCG64 generator seeded by ``SeedSequence(master_seed, spawn_key=keys)``.
Keys are small non-negative integers such as (stream, replica) or
(stream, level), so a replica's stream does not depend on how many other
replicas run or in which order.
"""

from __future__ import annotations

import numpy as np

# Stream identifiers; the first spawn key of every derived generator.
STREAM_SAMPLE = 0
STREAM_COUPLE = 1
STREAM_VERIFY = 2
STREAM_ANNEAL = 3
STREAM_GRAPH = 4


def make_rng(master_seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def replica_rngs(master_seed: int, stream: int, count: int) -> list[np.random.Generator]:
    return [make_rng(master_seed, stream, i) for i in range(count)]
