"""Grover-based subset-cover solvers.

``solve_1k`` finds a (1,k)-SC in two phases: collect t distinct j-repetitions
x_1..x_t, then search for an x whose images cover H(x_l) for one of them.
``solve_rk`` lifts this recursively: t distinct (r-1,k')-SCs on the first k'
functions, then one Grover search for an x covering the remaining k-k'
images of a covered element.

Marked sets are built classically from full value tables and charged to
``classical_evals``; only Grover iterations count as quantum queries.
"""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InstanceInfeasible
from .grover import QueryLedger, SearchInstance, bbht_search, find_distinct
from .hashfamily import FunctionFamily
from .witness import SubsetCoverWitness, repetition_indices, repetition_mask, verify_sc

VARIANTS = ("fixed", "any")


@dataclass(frozen=True)
class OneKParams:
    j: int
    t: int
    variant: str = "fixed"

    def __post_init__(self):
        if self.j < 2:
            raise ValueError("j must be >= 2")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass(frozen=True)
class RKParams:
    r: int
    k: int
    k_total: int    # k rounded up to a multiple of r+1
    k_prime: int
    t: int

    @property
    def extra(self) -> int:
        """Fresh functions appended to the family before solving."""
        return self.k_total - self.k


def default_params_1k(k: int, N: int, variant: str = "fixed") -> OneKParams:
    if k < 2:
        raise ValueError("k must be >= 2")
    j = (k + 2) // 2 if k % 2 == 0 else (k + 1) // 2
    t = max(1, round(N ** ((k - 2 * j + 2) / 3)))
    return OneKParams(j, t, variant)


def default_params_rk(r: int, k: int, N: int) -> RKParams:
    if r < 1 or k < 2:
        raise ValueError("need r >= 1 and k >= 2")
    k_total = -(-k // (r + 1)) * (r + 1)
    k_prime = r * k_total // (r + 1)
    t = max(1, round(N ** ((r * k_total - r * k_prime - k_prime) / (3 * r))))
    return RKParams(r, k, k_total, k_prime, t)


def predicted_query_exponent(problem: str, r: int = 1, k: int = 2) -> Fraction:
    if problem == "one-k-sc":
        if k < 2:
            raise ValueError("k must be >= 2")
        return Fraction(k, 4) + (Fraction(1, 12) if k % 2 else 0)
    if problem == "r-k-sc":
        if r < 1 or k < 2:
            raise ValueError("need r >= 1 and k >= 2")
        base = Fraction(k, 2 + 2 * r)
        return base if k % (r + 1) == 0 else base + Fraction(1, 2)
    if problem == "k-rsc-upper":
        if k < 1:
            raise ValueError("k must be >= 1")
        return Fraction(2 ** k - 1, 2 ** (k + 1) - 1)
    raise ValueError(f"unsupported problem {problem!r}")


def phase1_mask(tables: np.ndarray, j: int, variant: str = "fixed") -> np.ndarray:
    """Elements with a j-repetition: on the first j functions, or on any j."""
    if variant == "fixed":
        return repetition_mask(tables, j, range(j))
    if variant == "any":
        return repetition_mask(tables, j)
    raise ValueError(f"variant must be one of {VARIANTS}")


def _cover_mask_fixed(tables: np.ndarray, x0: int, j: int) -> np.ndarray:
    # h_1(x) = h_1(x0) and h_{m+1}(x) = h_{j+m}(x0) for 1 <= m <= k-j
    k = tables.shape[0]
    mask = tables[0] == tables[0, x0]
    for m in range(1, k - j + 1):
        mask &= tables[m] == tables[j + m - 1, x0]
    return mask


def _cover_mask_any(tables: np.ndarray, x0: int, j: int) -> np.ndarray:
    # the repeated value plus the k-j leftover values of x0, as a multiset,
    # must sit inside the multiset of x's values
    column = tables[:, x0].tolist()
    rep = repetition_indices(column, j)
    need = Counter([column[min(rep)]] + [v for i, v in enumerate(column) if i not in rep])
    mask = np.ones(tables.shape[1], dtype=bool)
    for v, c in need.items():
        mask &= np.sum(tables == v, axis=0) >= c
    return mask


def _excluded_by_tuple(tables: np.ndarray, xs) -> np.ndarray:
    """Elements whose image tuple equals that of any element of xs."""
    out = np.zeros(tables.shape[1], dtype=bool)
    for x in xs:
        out |= np.all(tables == tables[:, [x]], axis=0)
    return out


def _solve_1k_tables(tables, params: OneKParams, excluded, rng, ledger) -> SubsetCoverWitness:
    k, M = tables.shape
    if params.j > k:
        raise ValueError(f"j={params.j} exceeds k={k}")
    marked1 = phase1_mask(tables, params.j, params.variant)
    if excluded is not None:
        marked1 &= ~excluded
    inst1 = SearchInstance.from_mask(marked1)
    if inst1.t < params.t:
        raise InstanceInfeasible(f"{inst1.t} repetitions available, {params.t} needed")
    T = find_distinct(inst1, params.t, rng, ledger)

    cover = _cover_mask_fixed if params.variant == "fixed" else _cover_mask_any
    per_x0 = [cover(tables, x0, params.j) for x0 in T]
    marked2 = np.logical_or.reduce(per_x0)
    marked2[T] = False
    inst2 = SearchInstance.from_mask(marked2)
    if inst2.t == 0:
        raise InstanceInfeasible("no element covers any collected repetition")
    x = bbht_search(inst2, rng, ledger)
    x0 = next(T[i] for i, m in enumerate(per_x0) if m[x])
    return SubsetCoverWitness(x0, (x,))


def _solve_rk_tables(tables, r, k, N, excluded, rng, ledger, variant) -> SubsetCoverWitness:
    if r == 1:
        return _solve_1k_tables(tables[:k], default_params_1k(k, N, variant), excluded, rng, ledger)
    p = default_params_rk(r, k, N)
    if p.k_total > tables.shape[0]:
        raise ValueError(f"need {p.k_total} tabulated functions, have {tables.shape[0]}")
    kp = p.k_prime
    sub_tables = tables[:kp]
    found: list[SubsetCoverWitness] = []
    for _ in range(p.t):
        sub_excluded = _excluded_by_tuple(sub_tables, [w.x0 for w in found])
        if excluded is not None:
            sub_excluded |= excluded
        found.append(_solve_rk_tables(sub_tables, r - 1, kp, N, sub_excluded, rng, ledger, variant))

    # h_m(x) = h_{k'+m}(x_{i,0}) for 1 <= m <= k-k'
    per_sub = []
    for w in found:
        mask = np.ones(tables.shape[1], dtype=bool)
        for m in range(1, p.k_total - kp + 1):
            mask &= tables[m - 1] == tables[kp + m - 1, w.x0]
        mask[w.x0] = False
        per_sub.append(mask)
    inst = SearchInstance.from_mask(np.logical_or.reduce(per_sub))
    if inst.t == 0:
        raise InstanceInfeasible("no element covers the remaining images of any sub-solution")
    x = bbht_search(inst, rng, ledger)
    w = next(found[i] for i, m in enumerate(per_sub) if m[x])
    return SubsetCoverWitness(w.x0, w.coverers + (x,))


def _tabulate(family: FunctionFamily, ledger: QueryLedger) -> np.ndarray:
    ledger.charge_classical(family.M * family.k)
    return family.tables()


def _checked(family: FunctionFamily, w: SubsetCoverWitness) -> SubsetCoverWitness:
    if not verify_sc(family, w):
        raise RuntimeError(f"solver produced an invalid witness {w}")
    return w


def solve_1k(family: FunctionFamily, params: OneKParams | None, rng: np.random.Generator,
             ledger: QueryLedger | None = None) -> tuple[SubsetCoverWitness, QueryLedger]:
    ledger = QueryLedger() if ledger is None else ledger
    if family.k < 2:
        raise ValueError("a (1,k)-SC needs k >= 2")
    if family.M != family.N ** family.k:
        warnings.warn(f"domain size {family.M} differs from N^k = {family.N ** family.k}", stacklevel=2)
    params = default_params_1k(family.k, family.N) if params is None else params
    tables = _tabulate(family, ledger)
    w = _solve_1k_tables(tables, params, None, rng, ledger)
    return _checked(family, w), ledger


def solve_rk(family: FunctionFamily, r: int, rng: np.random.Generator,
             ledger: QueryLedger | None = None,
             variant: str = "fixed") -> tuple[SubsetCoverWitness, QueryLedger]:
    """(r,k)-SC; extends the family with fresh functions when r+1 does not divide k."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return solve_1k(family, default_params_1k(family.k, family.N, variant), rng, ledger)
    ledger = QueryLedger() if ledger is None else ledger
    expected = (r * family.N) ** family.k
    if family.M != expected:
        warnings.warn(f"domain size {family.M} differs from (rN)^k = {expected}", stacklevel=2)
    p = default_params_rk(r, family.k, family.N)
    tables = _tabulate(family.extend(p.extra), ledger)
    w = _solve_rk_tables(tables, r, p.k_total, family.N, None, rng, ledger, variant)
    return _checked(family, w), ledger

