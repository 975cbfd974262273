"""Witness types, verifiers and exhaustive oracles for SC, RSC and j-repetitions.

These are the ground truth every solver and Monte-Carlo counter is checked
against, so they favour obviously-correct code over speed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ResourceError
from .hashfamily import FunctionFamily

ENUMERATION_BUDGET = 1 << 24


@dataclass(frozen=True)
class SubsetCoverWitness:
    x0: int
    coverers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coverers", tuple(int(c) for c in self.coverers))
        if len(self.coverers) < 1:
            raise ValueError("a subset cover needs at least one coverer")

    @property
    def r(self) -> int:
        return len(self.coverers)

    def to_json(self) -> dict:
        return {"kind": "sc", "x0": self.x0, "elements": list(self.coverers), "indices": []}


@dataclass(frozen=True)
class RestrictedSCWitness:
    x0: int
    partners: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "partners", tuple(int(p) for p in self.partners))

    def as_subset_cover(self) -> SubsetCoverWitness:
        return SubsetCoverWitness(self.x0, tuple(dict.fromkeys(self.partners)))

    def to_json(self) -> dict:
        return {"kind": "rsc", "x0": self.x0, "elements": list(self.partners), "indices": []}


@dataclass(frozen=True)
class RepetitionWitness:
    x: int
    indices: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        raw = [int(i) for i in self.indices]
        if len(set(raw)) != len(raw):
            raise ValueError(f"duplicate function indices in {raw}")
        object.__setattr__(self, "indices", frozenset(raw))
        if len(self.indices) < 2:
            raise ValueError("a repetition needs at least two function indices")

    @property
    def j(self) -> int:
        return len(self.indices)

    def to_json(self) -> dict:
        return {"kind": "repetition", "x0": self.x, "elements": [], "indices": sorted(self.indices)}


def witness_to_json(w) -> str:
    return json.dumps(w.to_json(), sort_keys=True)


def witness_from_json(data: str | dict):
    d = json.loads(data) if isinstance(data, str) else data
    kind = d["kind"]
    if kind == "sc":
        return SubsetCoverWitness(d["x0"], tuple(d["elements"]))
    if kind == "rsc":
        return RestrictedSCWitness(d["x0"], tuple(d["elements"]))
    if kind == "repetition":
        return RepetitionWitness(d["x0"], frozenset(d["indices"]))
    raise ValueError(f"unknown witness kind {kind!r}")


def verify_sc(family: FunctionFamily, w: SubsetCoverWitness) -> bool:
    # image_set range-checks every element
    target = family.image_set(w.x0)
    union: set[int] = set()
    for c in w.coverers:
        union |= family.image_set(c)
    return w.x0 not in w.coverers and target <= union


def verify_rsc(family: FunctionFamily, w: RestrictedSCWitness) -> bool:
    if len(w.partners) != family.k:
        raise ValueError(f"expected {family.k} partners, got {len(w.partners)}")
    ok = True
    for i, xi in enumerate(w.partners):
        ok &= family.eval(i, w.x0) == family.eval(i, xi) and xi != w.x0
    return ok


def verify_repetition(family: FunctionFamily, w: RepetitionWitness) -> bool:
    for i in w.indices:
        family._check_index(i)
    vals = {family.eval(i, w.x) for i in w.indices}
    return len(vals) == 1


def _check_budget(size: int, budget: int) -> None:
    if size > budget:
        raise ResourceError(f"enumeration of {size} candidates exceeds budget {budget}")


def _covers_within(target: frozenset[int], masks: list[frozenset[int]], r: int) -> list[int] | None:
    """Indices of at most r masks whose union contains target, or None."""
    for size in range(1, min(r, len(masks)) + 1):
        for combo in combinations(range(len(masks)), size):
            union = frozenset().union(*(masks[c] for c in combo))
            if target <= union:
                return list(combo)
    return None


def brute_force_sc(family: FunctionFamily, r: int,
                   budget: int = ENUMERATION_BUDGET) -> SubsetCoverWitness | None:
    """First (r,k)-SC in domain order, or None when the domain holds none.

    Coverers disjoint from H(x0) never help, and repeats are allowed, so the
    search only tries useful coverers and pads short covers by repetition.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    _check_budget(family.M ** (r + 1), budget)
    tab = family.tables()
    for x0 in range(family.M):
        target = frozenset(tab[:, x0].tolist())
        values = sorted(target)
        # bit b of code[x] set iff values[b] is in H(x)
        code = np.zeros(family.M, dtype=np.int64)
        for b, v in enumerate(values):
            code |= np.any(tab == v, axis=0).astype(np.int64) << b
        code[x0] = 0
        # one representative per distinct useful contribution
        reps: dict[frozenset[int], int] = {}
        for c in np.unique(code[code > 0]):
            part = frozenset(v for b, v in enumerate(values) if c >> b & 1)
            reps[part] = int(np.flatnonzero(code == c)[0])
        masks = list(reps)
        chosen = _covers_within(target, masks, r)
        if chosen is not None:
            coverers = [reps[masks[c]] for c in chosen]
            coverers += [coverers[-1]] * (r - len(coverers))
            return SubsetCoverWitness(x0, tuple(coverers))
    return None


def brute_force_rsc(family: FunctionFamily,
                    budget: int = ENUMERATION_BUDGET) -> RestrictedSCWitness | None:
    _check_budget(family.M * family.M, budget)
    tab = family.tables()
    for x0 in range(family.M):
        partners = []
        for i in range(family.k):
            hits = np.flatnonzero(tab[i] == tab[i, x0])
            hits = hits[hits != x0]
            if hits.size == 0:
                break
            partners.append(int(hits[0]))
        else:
            return RestrictedSCWitness(x0, tuple(partners))
    return None


def repetition_mask(tables: np.ndarray, j: int, indices=None) -> np.ndarray:
    """Boolean mask over the domain: True where a j-repetition exists.

    ``tables`` is the (k, M) value table.  With ``indices`` the repetition
    must sit on exactly those functions, otherwise on any j of them.
    """
    k = tables.shape[0]
    if not 2 <= j <= k:
        raise ValueError(f"need 2 <= j <= k, got j={j}, k={k}")
    if indices is not None:
        idx = sorted(indices)
        if len(idx) != j or len(set(idx)) != j or not all(0 <= i < k for i in idx):
            raise ValueError("indices must be j distinct function indices")
        sub = tables[idx]
        return np.all(sub == sub[0], axis=0)
    # some value occurs at least j times in the column
    counts = np.zeros(tables.shape[1], dtype=np.int64)
    for i in range(k):
        counts = np.maximum(counts, np.sum(tables == tables[i], axis=0))
    return counts >= j


def repetition_indices(column, j: int) -> frozenset[int]:
    """First j indices (in function order) sharing the earliest value that repeats >= j times."""
    column = list(column)
    for v in column:
        idx = [i for i, u in enumerate(column) if u == v]
        if len(idx) >= j:
            return frozenset(idx[:j])
    raise ValueError("column holds no j-repetition")


def enumerate_repetitions(family: FunctionFamily, j: int, indices=None,
                          budget: int = ENUMERATION_BUDGET) -> list[RepetitionWitness]:
    if not 2 <= j <= family.k:
        raise ValueError(f"need 2 <= j <= k, got j={j}, k={family.k}")
    _check_budget(family.M, budget)
    tab = family.tables()
    xs = np.flatnonzero(repetition_mask(tab, j, indices))
    if indices is not None:
        fixed = frozenset(indices)
        return [RepetitionWitness(int(x), fixed) for x in xs]
    return [RepetitionWitness(int(x), repetition_indices(tab[:, x], j)) for x in xs]
