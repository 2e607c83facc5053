"""Seeded Laplace noise channels for privacy perturbation of shared states.

Each coordinate of a perturbation is an independent draw from a zero-mean
Laplace distribution whose scale follows a per-round schedule; the variance
at scale ``nu`` is ``2 * nu**2``.  Draws use the inverse-CDF transform

    zeta = -nu * sign(u) * log(1 - 2 |u|),   u uniform on (-1/2, 1/2),

with the endpoints of the uniform interval excluded by construction so the
logarithm never sees zero.

Streams are Philox counter-based generators seeded by the documented
splitting rule ``SeedSequence((master_seed, stream_tag, run, agent))``:
distinct runs and agents get statistically independent streams without any
coordination, and a given ``(master_seed, run, agent)`` triple always
reproduces the same draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .schedules import Schedule

__all__ = [
    "NoiseChannel",
    "NonpositiveScale",
    "ZeroChannel",
    "channel_for_run",
    "laplace_std",
]

#: Stream tags for the seed-splitting rule; signal generation uses tag 0 in
#: the harness, noise channels use tag 1.
SIGNAL_STREAM_TAG = 0
NOISE_STREAM_TAG = 1

# Draws map 53-bit integers in [1, 2**53) onto the open interval (0, 1).
_DENOM = float(2**53)


class NonpositiveScale(ValueError):
    """The scale schedule is not strictly positive where a draw is needed."""


class NoiseChannel:
    """One agent's private Laplace noise stream.

    Parameters
    ----------
    scale : Schedule
        Per-round Laplace scale; must be strictly positive at round 0 (and
        at every round actually drawn from).
    bit_generator : np.random.BitGenerator
        Owned generator state; never share one across channels.
    """

    def __init__(self, scale: Schedule, bit_generator: np.random.BitGenerator):
        if scale.eval(0) <= 0.0:
            raise NonpositiveScale("scale schedule must be strictly positive")
        self.scale = scale
        self._bits = bit_generator
        self._rng = np.random.Generator(bit_generator)

    def draw(self, k: int, d: int) -> np.ndarray:
        """``d`` independent Laplace draws at the round-``k`` scale."""
        nu = self.scale.eval(k)
        if nu <= 0.0:
            raise NonpositiveScale(f"scale at round {k} is {nu}")
        u = self._rng.integers(1, 2**53, size=d) / _DENOM - 0.5
        return -nu * np.sign(u) * np.log1p(-2.0 * np.abs(u))

    def clone(self) -> "NoiseChannel":
        """Independent copy that will replay this channel's future draws."""
        bits = type(self._bits)()
        bits.state = self._bits.state
        return NoiseChannel(self.scale, bits)


class ZeroChannel:
    """Noise-free stand-in channel: every draw is the zero vector."""

    def draw(self, k: int, d: int) -> np.ndarray:
        return np.zeros(d)

    def clone(self) -> "ZeroChannel":
        return ZeroChannel()


def channel_for_run(
    scale: Schedule, master_seed: int, run_index: int, agent_index: int
) -> NoiseChannel:
    """Channel seeded by the splitting rule (master_seed, run, agent)."""
    seq = np.random.SeedSequence((master_seed, NOISE_STREAM_TAG, run_index, agent_index))
    return NoiseChannel(scale, np.random.Philox(seq))


def laplace_std(scale: Schedule) -> Schedule:
    """Standard-deviation schedule of Laplace noise: ``sqrt(2) * scale``."""
    return scale.scaled(math.sqrt(2.0))
