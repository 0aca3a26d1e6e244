"""Stable seed derivation so sweeps can be resumed and grids edited safely."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    """64-bit seed from a tuple of ints/strings, stable across runs and machines."""
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "little")


def rng_from(*parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(*parts))
