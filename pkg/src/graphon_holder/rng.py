"""Deterministic random substreams.

Two mechanisms:

* :func:`substream` gives a numpy Generator keyed by (seed, *key) through
  ``SeedSequence.spawn_key``; used per stratum so that results do not depend
  on how strata are scheduled across workers.
* :func:`counter_uniform` is a stateless counter-based generator (SplitMix64
  finaliser over a keyed counter), vectorised over arrays of counters.  It
  gives every (seed, stream, i, j) its own uniform without materialising a
  generator per pair.
"""
from __future__ import annotations

import os

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def counter_bits(seed: int, stream: int, i, j) -> np.ndarray:
    """64 well-mixed bits for each counter (i, j) under key (seed, stream)."""
    with np.errstate(over="ignore"):
        key = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * _GOLDEN + np.uint64(stream & 0xFFFFFFFF))
        a = np.asarray(i, dtype=np.uint64)
        b = np.asarray(j, dtype=np.uint64)
        z = _mix64(key ^ (a * _GOLDEN))
        z = _mix64(z + _GOLDEN + b * _M2)
    return z


def counter_uniform(seed: int, stream: int, i, j) -> np.ndarray:
    """Uniforms in [0, 1) with 53 random bits, one per counter pair."""
    bits = counter_bits(seed, stream, i, j)
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else $GRAPHON_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("GRAPHON_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))
