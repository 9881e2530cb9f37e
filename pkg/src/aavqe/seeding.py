"""Deterministic seed derivation for independent random streams."""

from __future__ import annotations

import numpy as np

# stream labels
INIT, SPSA, SHOTS, RETRY = 1, 2, 3, 4


def derive_seed(master: int, *keys: int) -> int:
    """Derive a 63-bit seed from ``master`` and integer ``keys``.

    Uses numpy's SeedSequence hashing, so distinct key tuples give
    statistically independent streams.
    """
    seq = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *map(int, keys)])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
