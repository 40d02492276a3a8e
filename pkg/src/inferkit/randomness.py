"""Deterministic random streams and primitive distributions.

The generator is SplitMix64: a 64-bit counter advanced by the golden-gamma
increment ``0x9E3779B97F4A7C15``, with each output passed through the
murmur-style avalanche finalizer (xor-shift 30, multiply
``0xBF58476D1CE4E5B9``; xor-shift 27, multiply ``0x94D049BB133111EB``;
xor-shift 31).  It is tiny, portable, and reproduces bit-for-bit on any
platform, which the whole library relies on: every inference run is a pure
function of its seed.

Unit uniforms take the top 53 bits of an output word, ``u = (bits >> 11)
* 2**-53``, giving values in ``[0, 1)``.  Distribution helpers consume a
*fixed* number of uniforms each (normal: exactly two, Bernoulli: exactly
one) so that recorded traces of uniforms can be replayed positionally.
The one exception, :func:`gamma_sample`, uses rejection and consumes a
variable number of draws; it must never be called from inside a traced
model.

Independent streams (one per chain, per particle, per subsystem) are made
by drawing a fresh 64-bit word from a parent stream and using it as a
child seed; :meth:`RngState.spawn` packages that convention.
"""

from __future__ import annotations

import math

from .errors import InvalidProbability, InvalidScale
from .logweight import LogWeight

__all__ = [
    "RngState",
    "derive_substream",
    "normal_from_uniforms",
    "normal",
    "bernoulli",
    "gamma_sample",
    "log_normal_pdf",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53
_TWO_PI = 2.0 * math.pi
_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _mix64(z: int) -> int:
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


class RngState:
    """A SplitMix64 stream positioned at some point in its sequence."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        """Next raw 64-bit word; advances the stream by one step."""
        self.state = (self.state + _GAMMA) & _MASK64
        return _mix64(self.state)

    def next_unit_uniform(self) -> float:
        """Next uniform draw in ``[0, 1)``; advances the stream by one step."""
        return (self.next_u64() >> 11) * _INV_2_53

    def spawn(self) -> "RngState":
        """A new stream seeded from the next word of this one.

        This is the library-wide convention for stream separation: parents
        hand out one word per child, children never touch the parent state
        again.
        """
        return RngState(self.next_u64())

    def __repr__(self) -> str:
        return f"RngState(0x{self.state:016x})"


def derive_substream(seed: int, index: int) -> int:
    """Seed for the ``index``-th child stream of a base seed.

    Used where children are created by index rather than sequentially
    (for example one inner stream per proposal of an outer sampler):
    ``mix64(seed + (index + 1) * gamma)``, the same arithmetic SplitMix64
    itself uses to walk its sequence.
    """
    return _mix64((seed + (index + 1) * _GAMMA) & _MASK64)


def normal_from_uniforms(u1: float, u2: float, mu: float, sigma: float) -> float:
    """Gaussian deviate from exactly two unit uniforms.

    The primary (cosine) branch of the Box-Muller transform:
    ``z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``, then scaled to
    ``mu + sigma * z``.  Using ``1 - u1`` keeps the logarithm finite for
    ``u1 = 0``, which is a representable draw.
    """
    if not sigma > 0.0:
        raise InvalidScale(f"sigma must be positive, got {sigma!r}")
    z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(_TWO_PI * u2)
    return mu + sigma * z


def normal(rng: RngState, mu: float, sigma: float) -> float:
    """Gaussian draw consuming exactly two uniforms from ``rng``."""
    u1 = rng.next_unit_uniform()
    u2 = rng.next_unit_uniform()
    return normal_from_uniforms(u1, u2, mu, sigma)


def bernoulli(rng: RngState, p: float) -> bool:
    """Coin flip consuming exactly one uniform; true iff ``u < p``."""
    if math.isnan(p) or p < 0.0 or p > 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p!r}")
    return rng.next_unit_uniform() < p


def gamma_sample(rng: RngState, shape: float, scale: float = 1.0) -> float:
    """Gamma draw via Marsaglia-Tsang squeeze-rejection.

    Consumes a VARIABLE number of uniforms (the rejection loop), so this
    must never be called from inside a traced model; traces index draws
    positionally and variable consumption would desynchronize them.
    """
    if not shape > 0.0:
        raise InvalidScale(f"shape must be positive, got {shape!r}")
    if not scale > 0.0:
        raise InvalidScale(f"scale must be positive, got {scale!r}")
    if shape < 1.0:
        # Boost: draw for shape+1 and scale by u^(1/shape).
        u = rng.next_unit_uniform()
        while u == 0.0:
            u = rng.next_unit_uniform()
        return gamma_sample(rng, shape + 1.0, scale) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = normal(rng, 0.0, 1.0)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = rng.next_unit_uniform()
        if u == 0.0:
            continue
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v * scale
        if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v * scale


def log_normal_pdf(x: float, sigma: float, mu: float) -> LogWeight:
    """Log density of ``N(mu, sigma^2)`` at ``x`` as a weight.

    ``-log(sigma) - log(sqrt(2 pi)) - (x - mu)^2 / (2 sigma^2)``.
    Argument order is (value, scale, location), matching how scoring sites
    read: "weight of x, at spread sigma, around mu".
    """
    if not sigma > 0.0:
        raise InvalidScale(f"sigma must be positive, got {sigma!r}")
    d = x - mu
    return LogWeight(-math.log(sigma) - _LOG_SQRT_TWO_PI - (d * d) / (2.0 * sigma * sigma))
