"""Grover search simulated exactly in the two-dimensional marked/unmarked plane.

The simulator is told the marked set (built classically), so a run of m
Grover iterations only needs the closed-form success probability
sin^2((2m+1)*theta), sin(theta) = sqrt(t/M).  One iteration is one query to
the search predicate, which is one query to the underlying hash functions.
The search loop also pays one predicate query per measured outcome to check
whether it is marked; those are tallied separately in ``verification_queries``
as well as in ``quantum_queries``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotFound

BBHT_GROWTH = 6 / 5
CUTOFF_FACTOR = 64


@dataclass(frozen=True)
class SearchInstance:
    space_size: int
    marked: np.ndarray

    def __post_init__(self):
        if self.space_size < 1:
            raise ValueError("space_size must be positive")
        marked = np.unique(np.asarray(self.marked, dtype=np.int64))
        if marked.size and (marked[0] < 0 or marked[-1] >= self.space_size):
            raise ValueError("marked elements must lie in [0, space_size)")
        marked.setflags(write=False)
        object.__setattr__(self, "marked", marked)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> SearchInstance:
        return cls(int(mask.size), np.flatnonzero(mask))

    @property
    def t(self) -> int:
        return int(self.marked.size)

    def without(self, elements) -> SearchInstance:
        return SearchInstance(self.space_size, np.setdiff1d(self.marked, np.asarray(list(elements), dtype=np.int64)))


@dataclass
class QueryLedger:
    quantum_queries: int = 0
    classical_evals: int = 0
    grover_runs: int = 0
    verification_queries: int = 0

    def charge_queries(self, n: int) -> None:
        if n < 0:
            raise ValueError("query charges are non-negative")
        self.quantum_queries += n

    def charge_check(self) -> None:
        """One predicate evaluation on a measured outcome."""
        self.quantum_queries += 1
        self.verification_queries += 1

    def charge_classical(self, n: int) -> None:
        if n < 0:
            raise ValueError("evaluation charges are non-negative")
        self.classical_evals += n

    def to_json(self) -> dict:
        return {"quantum_queries": self.quantum_queries,
                "classical_evals": self.classical_evals,
                "grover_runs": self.grover_runs,
                "verification_queries": self.verification_queries}


def success_probability(M: int, t: int, m: int) -> float:
    if M < 1 or m < 0 or t < 0:
        raise ValueError("need M >= 1, t >= 0, m >= 0")
    if t > M:
        raise ValueError(f"marked count {t} exceeds space size {M}")
    theta = math.asin(math.sqrt(t / M))
    return math.sin((2 * m + 1) * theta) ** 2


def grover_sample(inst: SearchInstance, m: int, rng: np.random.Generator,
                  ledger: QueryLedger) -> int | None:
    """Run m iterations and measure; None stands for an unmarked outcome."""
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    ledger.charge_queries(m)
    if inst.t == 0:
        return None
    if rng.random() < success_probability(inst.space_size, inst.t, m):
        return int(inst.marked[rng.integers(inst.t)])
    return None


def default_cutoff(M: int) -> int:
    return max(1, math.ceil(CUTOFF_FACTOR * math.sqrt(M)))


def bbht_search(inst: SearchInstance, rng: np.random.Generator, ledger: QueryLedger,
                cutoff: int | None = None) -> int:
    """Grover search with an unknown number of marked elements.

    The iteration bound starts at 1 and grows by 6/5 up to sqrt(M); each round
    draws its iteration count uniformly below the bound, measures, and checks
    the outcome with one predicate query.  A round that would push the total
    past ``cutoff`` is not started.
    """
    cutoff = default_cutoff(inst.space_size) if cutoff is None else cutoff
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    ledger.grover_runs += 1
    cap = math.sqrt(inst.space_size)
    bound = 1.0
    spent = 0
    while True:
        m = int(rng.integers(math.ceil(bound)))
        if spent + m + 1 > cutoff:
            break
        spent += m + 1
        x = grover_sample(inst, m, rng, ledger)
        ledger.charge_check()
        if x is not None:
            return x
        bound = min(bound * BBHT_GROWTH, cap)
    raise NotFound(f"no marked element after {spent} queries (t={inst.t})")


def find_distinct(inst: SearchInstance, count: int, rng: np.random.Generator,
                  ledger: QueryLedger, cutoff: int | None = None) -> list[int]:
    """``count`` distinct marked elements, removing each find from later searches."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if inst.t < count:
        raise NotFound(f"only {inst.t} marked elements, {count} requested")
    found: list[int] = []
    current = inst
    for _ in range(count):
        x = bbht_search(current, rng, ledger, cutoff)
        found.append(x)
        current = current.without([x])
    return found
