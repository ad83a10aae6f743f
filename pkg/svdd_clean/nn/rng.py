from typing import Optional, Sequence, Tuple, Union

import numpy as np

Shape = Union[int, Tuple[int, ...]]


class SeededRng:
    """Deterministic random source built on numpy's PCG64 bit generator.

    PCG64 streams are specified independently of platform, so the same seed yields
    the same draws everywhere. Child streams are derived from ``(seed, *keys)`` via
    ``SeedSequence`` so that, for example, every label class gets its own stream
    regardless of the order in which classes are processed.
    """

    def __init__(self, seed: int, keys: Sequence[int] = ()):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self._seed = int(seed)
        self._keys = tuple(int(k) for k in keys)
        entropy = [self._seed, *self._keys] if self._keys else self._seed
        self._generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy))
        )

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def keys(self) -> Tuple[int, ...]:
        return self._keys

    def derive(self, *keys: int) -> "SeededRng":
        return SeededRng(self._seed, self._keys + tuple(keys))

    def uniform(self, low: float, high: float, size: Optional[Shape] = None):
        return self._generator.uniform(low, high, size)

    def normal(self, loc: float = 0.0, scale: float = 1.0, size: Optional[Shape] = None):
        return self._generator.normal(loc, scale, size)

    def integers(self, low: int, high: int, size: Optional[Shape] = None):
        return self._generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def __repr__(self):
        return f"SeededRng(seed={self._seed}, keys={self._keys})"
