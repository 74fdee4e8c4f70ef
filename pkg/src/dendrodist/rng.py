"""Seeded counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by a
64-bit seed plus a stream path, so results do not depend on call order
across streams or on how work is split between processes.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for ``(seed, *stream)``."""
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))
