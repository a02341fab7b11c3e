"""Deterministic seed derivation for disorder realizations and trajectories.

Seeds are 64-bit blake2b digests of the master seed plus the *values* that
identify a run (grid point rates, realization index, trajectory index), so a
run's stream never depends on the order in which grid points are listed or on
which worker executes it.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

__all__ = ["derive_seed"]


def derive_seed(*parts) -> int:
    """Hash ints/floats/strings into a reproducible 64-bit seed."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        if isinstance(p, str):
            h.update(b"s")
            h.update(p.encode("utf-8"))
        elif isinstance(p, (bool, np.bool_)):
            raise TypeError("bool seeds are ambiguous; pass an int")
        elif isinstance(p, (int, np.integer)):
            h.update(b"i")
            h.update(int(p).to_bytes(16, "little", signed=True))
        elif isinstance(p, (float, np.floating)):
            h.update(b"f")
            h.update(struct.pack("<d", float(p)))
        else:
            raise TypeError(f"cannot derive a seed from {type(p).__name__}")
    return int.from_bytes(h.digest(), "little")
