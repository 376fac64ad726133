"""Seeded random streams.

Every random quantity comes from a PCG64 generator keyed by
``SeedSequence(seed, spawn_key=(stream,))``, so the graph coordinates, the
observation vectors and the test matrices of one seed never share a stream.
"""

import numpy as np

GRAPH_STREAM = 0
RHS_STREAM = 1
POWER_STREAM = 2
TEST_STREAM = 3


def make_rng(seed: int, stream: int = GRAPH_STREAM) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(seq))
