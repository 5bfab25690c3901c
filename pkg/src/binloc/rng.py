"""Seeded random streams.

Every stochastic routine takes an explicit ``numpy.random.Generator``; nothing
touches global state. Streams for distinct purposes are derived from a single
scenario seed so a run is reproducible from the seed alone.
"""

import numpy as np

RandomStream = np.random.Generator

# stream purposes; appended to the seed as a SeedSequence spawn key
SIMULATE = 0
ESTIMATE = 1
RESAMPLE = 2
AREA = 3


def random_stream(seed: int, purpose: int | None = None) -> RandomStream:
    """Return a PCG64 generator for ``seed`` (optionally split by ``purpose``)."""
    if purpose is None:
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(purpose,))))
