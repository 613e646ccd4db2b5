"""SplitMix64 seed streams.

The generator is specified bit for bit so that a given seed yields the same
sequence on every platform::

    state  <- state + 0x9E3779B97F4A7C15           (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB (mod 2**64)
    output <- z ^ (z >> 31)

Floats take the top 53 bits of an output. Bounded integers use rejection
sampling on the raw 64-bit output, so they carry no modulo bias.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# stream tags for derive_seed
TAG_GRID = 0x67726964  # "grid"
TAG_DYNAMICS = 0x64796E61  # "dyna"


def mix64(z: int) -> int:
    """SplitMix64 output finalizer applied to a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SeedStream:
    """Deterministic 64-bit PRNG (SplitMix64)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        # 2**64 mod bound; raw draws below it would bias the low residues
        threshold = (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound

    def __repr__(self) -> str:
        return f"SeedStream(state=0x{self.state:016x})"


def derive_seed(base_seed: int, index: int, tag: int) -> int:
    """Hash-mix (base_seed, index, tag) into an independent 64-bit seed."""
    h = mix64((base_seed & MASK64) + GOLDEN_GAMMA)
    h = mix64((h ^ (index & MASK64)) + GOLDEN_GAMMA)
    return mix64((h ^ (tag & MASK64)) + GOLDEN_GAMMA)
