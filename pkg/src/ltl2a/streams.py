"""Seeded RNG streams with a fixed splitting rule.

The generator is numpy's PCG64 seeded through ``SeedSequence``. Child
streams are derived with ``spawn_key``, one child per draw index, so any
draw is reproducible in isolation and across platforms: stream ``(seed,)``
is the root, ``(seed, i)`` the stream for draw ``i``, and so on.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "DEFAULT_SEED"]

# Used wherever a seed is not supplied explicitly (also the CLI fallback).
DEFAULT_SEED = 0


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``seed`` split by the given draw indices."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
