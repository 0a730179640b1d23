"""Named random sub-streams derived from a single integer seed."""
import zlib

import numpy as np


def stream(seed, name, *index):
    """Return a Generator for sub-stream ``name:index...`` of ``seed``.

    Streams are independent of each other and of call order, so e.g. test
    vector ``r`` can be computed alone and still match a full run.
    """
    key = [int(seed) & 0xFFFFFFFF, zlib.crc32(name.encode("utf-8"))]
    key.extend(int(i) for i in index)
    return np.random.default_rng(np.random.SeedSequence(key))
