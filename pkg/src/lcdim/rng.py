"""Seeded 64-bit linear congruential generator.

All randomness in the package goes through this generator so that streams
and Monte Carlo runs are bit-reproducible across implementations.
"""

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1


class LCG:
    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK64
        return self.state

    def bit(self) -> int:
        """Top bit of the next state (low LCG bits have short periods)."""
        return self.next_u64() >> 63

    def bits(self, k: int) -> str:
        return "".join(str(self.bit()) for _ in range(k))

    def uniform(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53


def derive_seed(seed: int, stream: int) -> int:
    """Decorrelated seed for a secondary consumer of the same user seed."""
    return LCG(seed ^ (0x9E3779B97F4A7C15 * (stream + 1) & MASK64)).next_u64()
