"""Lazy-sampled classical databases, property counters and Monte-Carlo bound checks.

A classical database holding i entries is what i distinct classical queries
to k random functions produce, so any probability measured here must sit
below the square of the corresponding quantum amplitude bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable

import numpy as np

from .bounds import BoundValue
from .errors import ResourceError

RSC_BUDGET = 64
CONFIDENCE = 0.99
MIN_TRIALS = 1000


@dataclass(frozen=True)
class ClassicalDatabase:
    """Entries x -> (h_1(x), .., h_k(x)); domain labels are 0..i-1 since only values matter."""

    values: np.ndarray
    N: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        if v.ndim != 2:
            raise ValueError("values must be an (i, k) array")
        if v.size and (v.min() < 0 or v.max() >= self.N):
            raise ValueError("values must lie in [0, N)")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_entries(cls, entries: dict[int, tuple[int, ...]], N: int, k: int) -> ClassicalDatabase:
        rows = [entries[x] for x in sorted(entries)]
        return cls(np.array(rows, dtype=np.int64).reshape(len(rows), k), N)

    @property
    def i(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def entries(self) -> dict[int, tuple[int, ...]]:
        return {x: tuple(row) for x, row in enumerate(self.values.tolist())}


def sample_database(i: int, N: int, k: int, rng: np.random.Generator) -> ClassicalDatabase:
    if i < 0:
        raise ValueError("i must be >= 0")
    return ClassicalDatabase(rng.integers(0, N, size=(i, k)), N)


def count_distinct_2collisions(db: ClassicalDatabase, fn: int = 0) -> int:
    """Largest set of collision pairs on h_fn whose members carry pairwise distinct image tuples.

    Within a group of m entries sharing h_fn with d distinct tuples, at most
    min(m - 1, d) such pairs exist: a chain over the group's tuples gives d - 1,
    and one more when some tuple appears twice.
    """
    if not 0 <= fn < db.k:
        raise ValueError(f"function index {fn} outside [0, {db.k})")
    groups: dict[int, list[tuple[int, ...]]] = {}
    for row in db.values.tolist():
        groups.setdefault(row[fn], []).append(tuple(row))
    return sum(min(len(g) - 1, len(set(g))) for g in groups.values())


def count_j_repetitions(db: ClassicalDatabase, j: int) -> int:
    """Entries whose first j values coincide."""
    if not 2 <= j <= db.k:
        raise ValueError(f"need 2 <= j <= k, got j={j}, k={db.k}")
    v = db.values[:, :j]
    return int(np.sum(np.all(v == v[:, :1], axis=1)))


def count_distinct_rsc(db: ClassicalDatabase, s: int) -> int:
    """Distinct (h_1..h_s) tuples among entries x0 that have an s-RSC inside the database."""
    if not 1 <= s <= db.k:
        raise ValueError(f"need 1 <= s <= k, got s={s}, k={db.k}")
    if db.i > RSC_BUDGET:
        raise ResourceError(f"RSC counting limited to {RSC_BUDGET} entries, got {db.i}")
    v = db.values[:, :s]
    if db.i == 0:
        return 0
    same = v[:, None, :] == v[None, :, :]          # (x0, x, fn)
    same[np.arange(db.i), np.arange(db.i), :] = False
    has_rsc = np.all(np.any(same, axis=1), axis=1)
    return len({tuple(row) for row in v[has_rsc].tolist()})


def contains_1ksc(db: ClassicalDatabase) -> bool:
    sets = [set(row) for row in db.values.tolist()]
    return any(a <= b for p, a in enumerate(sets) for q, b in enumerate(sets) if p != q)


# ---- batched counters over many databases at once -------------------------

def _tuple_codes(values: np.ndarray, N: int) -> np.ndarray:
    code = np.zeros(values.shape[:-1], dtype=np.int64)
    for f in range(values.shape[-1]):
        code = code * N + values[..., f]
    return code


def batch_count_2collisions(values: np.ndarray, N: int, fn: int = 0) -> np.ndarray:
    """``count_distinct_2collisions`` for each database in a (trials, i, k) stack.

    Uses sum over groups of min(m-1, d) = (#distinct tuples) - (#groups whose tuples are all distinct).
    """
    T, i, k = values.shape
    if T * N ** k >= 2 ** 62:
        raise ResourceError("tuple codes would overflow int64")
    if i == 0:
        return np.zeros(T, dtype=np.int64)
    trial = np.repeat(np.arange(T, dtype=np.int64), i)
    NK = N ** k
    group = trial * N + values[:, :, fn].ravel()
    tup = trial * NK + _tuple_codes(values, N).ravel()
    ug, m = np.unique(group, return_counts=True)
    ut = np.unique(tup)
    t_trial = ut // NK
    t_fn = (ut % NK) // N ** (k - 1 - fn) % N
    _, d = np.unique(t_trial * N + t_fn, return_counts=True)
    distinct = np.bincount(t_trial, minlength=T)
    all_distinct = np.bincount(ug // N, weights=(d == m), minlength=T).astype(np.int64)
    return distinct - all_distinct


def batch_count_repetitions(values: np.ndarray, j: int) -> np.ndarray:
    v = values[:, :, :j]
    return np.sum(np.all(v == v[:, :, :1], axis=2), axis=1)


# ---- properties and estimation ---------------------------------------------

@dataclass(frozen=True)
class PropertySpec:
    name: str
    params: dict = field(default_factory=dict)
    scalar: Callable[[ClassicalDatabase], bool] = None
    batch: Callable[[np.ndarray, int], np.ndarray] | None = None

    def holds(self, db: ClassicalDatabase) -> bool:
        return bool(self.scalar(db))

    def evaluate(self, values: np.ndarray, N: int) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(values, N), dtype=bool)
        return np.array([self.scalar(ClassicalDatabase(v, N)) for v in values], dtype=bool)

    def describe(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))


def nonempty() -> PropertySpec:
    return PropertySpec("nonempty", {}, lambda db: db.i >= 1,
                        lambda v, N: np.full(v.shape[0], v.shape[1] >= 1))


def at_least_collisions(j: int, fn: int = 0) -> PropertySpec:
    return PropertySpec("collisions", {"j": j, "fn": fn},
                        lambda db: count_distinct_2collisions(db, fn) >= j,
                        lambda v, N: batch_count_2collisions(v, N, fn) >= j)


def at_least_repetitions(ell: int, j: int) -> PropertySpec:
    return PropertySpec("repetitions", {"ell": ell, "j": j},
                        lambda db: count_j_repetitions(db, j) >= ell,
                        lambda v, N: batch_count_repetitions(v, j) >= ell)


def at_least_rsc(ell: int, s: int) -> PropertySpec:
    return PropertySpec("rsc", {"ell": ell, "s": s}, lambda db: count_distinct_rsc(db, s) >= ell)


def has_1ksc() -> PropertySpec:
    return PropertySpec("1ksc", {}, contains_1ksc)


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    half_width: float
    successes: int
    trials: int


def wilson_half_width(successes: int, n: int, confidence: float = CONFIDENCE) -> float:
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / n
    denom = 1 + z * z / n
    return z / denom * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n))


def estimate_probability(prop: PropertySpec, i: int, N: int, k: int, trials: int,
                         rng: np.random.Generator, batch_size: int = 20000) -> Estimate:
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials")
    hits = 0
    done = 0
    while done < trials:
        n = min(batch_size, trials - done)
        values = rng.integers(0, N, size=(n, i, k))
        hits += int(np.sum(prop.evaluate(values, N)))
        done += n
    return Estimate(hits / trials, float(wilson_half_width(hits, trials)), hits, trials)


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    margin: float


def check_bound(p_hat: float, half_width: float, bound: BoundValue) -> BoundCheck:
    prob = bound.as_probability
    return BoundCheck(p_hat - half_width <= prob, prob - p_hat)
