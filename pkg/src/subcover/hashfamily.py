"""Seeded stand-ins for the k idealized random functions h_1..h_k : X -> Y.

Every value is a pure function of ``(seed, i, x)`` built from the splitmix64
finalizer, so a family is reproducible, cheap to tabulate with numpy and
safe to share between threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DOMAIN_CAP = 1 << 24


def mix64(z: int) -> int:
    """splitmix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master: int, *counters: int) -> int:
    """Fold counters into a 64-bit seed with the same keyed mapping as the family."""
    s = mix64(master)
    for c in counters:
        s = mix64(s ^ mix64((c + 1) * GOLDEN))
    return s


def default_domain_size(N: int, k: int, r: int = 1, cap: int = DOMAIN_CAP) -> int:
    """|X| = (r*N)^k, refusing anything above ``cap``."""
    from .errors import ResourceError

    M = (r * N) ** k
    if M > cap:
        raise ResourceError(f"domain size ({r}*{N})^{k} = {M} exceeds cap {cap}")
    return M


@dataclass(frozen=True)
class FunctionFamily:
    seed: int
    k: int
    N: int
    M: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be positive")
        object.__setattr__(self, "seed", self.seed & MASK64)

    def _key(self, i: int) -> int:
        return mix64(self.seed ^ mix64((i + 1) * GOLDEN))

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self.k:
            raise ValueError(f"function index {i} outside [0, {self.k})")

    def _check_x(self, x: int) -> None:
        if not 0 <= x < self.M:
            raise ValueError(f"domain element {x} outside [0, {self.M})")

    def eval(self, i: int, x: int) -> int:
        self._check_index(i)
        self._check_x(x)
        return mix64(mix64(self._key(i) ^ x) + GOLDEN) % self.N

    def image_set(self, x: int) -> frozenset[int]:
        self._check_x(x)
        return frozenset(self.eval(i, x) for i in range(self.k))

    def image_tuple(self, x: int) -> tuple[int, ...]:
        self._check_x(x)
        return tuple(self.eval(i, x) for i in range(self.k))

    def values(self, i: int, xs) -> np.ndarray:
        """Vectorised ``eval(i, x)`` over an array of domain elements."""
        self._check_index(i)
        xs = np.asarray(xs, dtype=np.uint64)
        if xs.size and int(xs.max()) >= self.M:
            raise ValueError("domain element out of range")
        z = _mix64_array(np.uint64(self._key(i)) ^ xs) + np.uint64(GOLDEN)
        return (_mix64_array(z) % np.uint64(self.N)).astype(np.int64)

    def table(self, i: int) -> np.ndarray:
        return self.values(i, np.arange(self.M, dtype=np.uint64))

    def tables(self, count: int | None = None) -> np.ndarray:
        """``(count, M)`` array of the first ``count`` functions over the whole domain."""
        count = self.k if count is None else count
        xs = np.arange(self.M, dtype=np.uint64)
        return np.stack([self.values(i, xs) for i in range(count)])

    def extend(self, extra: int) -> FunctionFamily:
        if extra < 0:
            raise ValueError("extra must be >= 0")
        return FunctionFamily(self.seed, self.k + extra, self.N, self.M)

    def restrict(self, k: int) -> FunctionFamily:
        """The family made of the first ``k`` functions only."""
        if not 1 <= k <= self.k:
            raise ValueError(f"cannot restrict {self.k} functions to {k}")
        return FunctionFamily(self.seed, k, self.N, self.M)
