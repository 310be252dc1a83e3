"""Reproducible random streams.

A stream is addressed by a (seed, stream-index) pair; equal pairs replay the
identical draw sequence and distinct pairs behave as independent generators.
The harness keys replicate k of a case/q cell to
``replicate_stream(case_hash, q, k)``, so results do not depend on how
replicates are scheduled over threads.
"""

from __future__ import annotations

from .backend import core

__all__ = ["RngStream", "case_hash", "replicate_stream", "pilot_stream",
           "fixed_covariate_stream"]

_MASK = 0xFFFFFFFFFFFFFFFF
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_FIXED_COV_SALT = 0xF0E1D2C3B4A59687
_PILOT_SALT = 0x70696C6F74  # ascii "pilot"


def case_hash(case_id: str) -> int:
    """FNV-1a hash of a case id; the per-case key for stream derivation."""
    h = _FNV_OFFSET
    for b in case_id.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _MASK
    return h


def replicate_stream(chash: int, q: int, k: int) -> int:
    return core.replicate_stream(chash, q, k)


def pilot_stream(chash: int, q: int, k: int, salt: int = 0) -> int:
    """Streams for pilot fits; disjoint from the study's replicate streams."""
    return core.mix64(core.replicate_stream(chash, q, k)
                      ^ core.mix64(_PILOT_SALT + salt))


def fixed_covariate_stream(chash: int, salt: int = 0) -> int:
    """Stream for the one-off covariate draw of fixed-design mode."""
    return core.mix64(chash ^ _FIXED_COV_SALT ^ core.mix64(salt))


class RngStream:
    """Stateful generator for one (seed, stream) pair.

    Construction is cheap; draws mutate the instance.  Rebuilding with the
    same pair replays the same sequence.
    """

    __slots__ = ("seed", "stream", "_state")

    def __init__(self, seed: int, stream: int = 0):
        if stream < 0:
            raise ValueError("stream index must be nonnegative")
        self.seed = seed & _MASK
        self.stream = stream & _MASK
        self._state = core.rng_new(self.seed, self.stream)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream={self.stream})"

    def u64(self) -> int:
        return core.rng_u64(self._state)

    def uniform01(self) -> float:
        return core.rng_u01(self._state)

    def uniform(self, lo: float, hi: float) -> float:
        return core.rng_uniform(self._state, lo, hi)

    def normal(self) -> float:
        return core.rng_normal(self._state)

    def exponential(self) -> float:
        return core.rng_exponential(self._state)
