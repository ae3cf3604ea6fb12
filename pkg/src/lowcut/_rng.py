"""Repo-wide seeded randomness.

Every random draw in this package flows through :class:`Prng`, a thin layer
over numpy's PCG64 bit generator.  The conventions are fixed so that outputs
are bit-reproducible per platform:

* uniforms are 53-bit doubles in [0, 1) (PCG64 raw output >> 11, scaled),
  exactly what ``numpy.random.Generator.random`` produces;
* standard normals come from the Box-Muller transform applied to consecutive
  uniform pairs (``z[2i] = r*cos``, ``z[2i+1] = r*sin``), never from numpy's
  ziggurat sampler;
* bounded integers are ``floor(u * n)``, whose bias is below ``n * 2**-53``.

Seed-mixing helpers (splitmix64 / FNV-1a, constants below) turn structured
experiment coordinates into independent 64-bit seeds.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# splitmix64 constants (Steele, Lea & Flood's SplittableRandom finalizer).
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB

# FNV-1a 64-bit constants.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(state: int) -> int:
    """One splitmix64 output step for the given 64-bit state."""
    z = (state + _SM_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _SM_MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MIX2) & _MASK64
    return z ^ (z >> 31)


def mix64(*values: int) -> int:
    """Fold integers into one 64-bit seed; order-sensitive, deterministic."""
    acc = 0
    for v in values:
        acc = splitmix64(acc ^ (v & _MASK64))
    return acc


def hash_label(label: str) -> int:
    """FNV-1a 64-bit hash of a UTF-8 string (stable across processes)."""
    h = _FNV_OFFSET
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class Prng:
    """Seeded random source (PCG64 core, fixed draw conventions).

    One instance is owned by one worker at a time; nothing here is shared
    or thread-safe.  Construct with a 64-bit seed, or pass an existing
    instance wherever a ``seed`` argument is accepted.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def raw(self, n: int) -> np.ndarray:
        """Raw uint64 stream, used by golden-value tests."""
        return self._gen.bit_generator.random_raw(n)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        return self._gen.random(n)

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on consecutive uniform pairs."""
        pairs = (n + 1) // 2
        u = self._gen.random(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        # 1 - u1 lies in (0, 1], so the log is finite.
        r = np.sqrt(-2.0 * np.log1p(-u1))
        theta = 2.0 * np.pi * u2
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n]

    def integers(self, n: int, upper: int) -> np.ndarray:
        """n integers uniform on {0, ..., upper-1} via floor(u * upper)."""
        if upper <= 0:
            raise ValueError("upper must be positive")
        return np.minimum((self.uniforms(n) * upper).astype(np.int64), upper - 1)


def as_prng(seed) -> Prng:
    """Coerce an int seed or existing Prng into a Prng."""
    if isinstance(seed, Prng):
        return seed
    return Prng(seed)
