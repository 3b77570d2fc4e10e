"""splitmix64 PRNG: the single source of randomness for the whole package.

Every stochastic decision (weight init, epoch shuffling, temperature
sampling) goes through this generator so that runs are reproducible from a
64-bit seed alone, independent of numpy's global state.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 output scramble of a 64-bit value (stateless)."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential splitmix64 stream over a 64-bit state."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        return mix64(self.state)

    def next_double(self) -> float:
        """Uniform double in [0, 1): top 53 bits of the next output."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_doubles(self, n: int) -> np.ndarray:
        """Vectorized batch of n uniform doubles, identical to n next_double calls."""
        if n == 0:
            return np.empty(0, dtype=np.float64)
        # state_k = state + GAMMA*k, so the whole batch is computable at once
        ks = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + np.uint64(_GAMMA) * ks
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + _GAMMA * n) & _MASK64
        return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniforms(self, n: int, lo: float, hi: float) -> np.ndarray:
        return lo + (hi - lo) * self.next_doubles(n)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return min(int(self.next_double() * n), n - 1)

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def categorical(self, probs) -> int:
        """Inverse-CDF draw over ids 0..len(probs)-1 in ascending order."""
        u = self.next_double()
        cum = 0.0
        last = len(probs) - 1
        for i, p in enumerate(probs):
            cum += float(p)
            if u < cum:
                return i
        return last
