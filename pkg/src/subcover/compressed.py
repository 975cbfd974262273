"""Exact statevector simulation of standard and compressed random oracles at micro sizes.

Amplitudes live in a tensor of shape ``(X, Y, C, .., C)``: the adversary's query
and answer registers followed by one database cell per domain point.  Cells
have C = Y + 1 levels; the last one (index ``Y``) is the empty symbol.

Representation: database cells are kept in the value basis.  The standard
oracle starts every cell in the uniform vector u = F|0>, and compression is
the per-cell reflection swapping u with the empty symbol.  The compressed
oracle is then Comp . StO . Comp^dagger, which equals the Fourier-side form
Comp' . O . Comp'^dagger once conjugated by the QFT on y and on every cell
(checked numerically in the tests).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ResourceError, StateError

MAX_X = 4
MAX_Y = 4
MAX_QUERIES = 4
QUERY = "query"

STANDARD = "standard"
COMPRESSED = "compressed"


def dft_matrix(d: int, inverse: bool = False) -> np.ndarray:
    """F[b, a] = omega^{ab} / sqrt(d), omega = exp(2 pi i / d)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    a = np.arange(d)
    sign = -1 if inverse else 1
    return np.exp(sign * 2j * np.pi * np.outer(a, a) / d) / np.sqrt(d)


def _extended(F: np.ndarray) -> np.ndarray:
    """Act with F on the value levels and leave the empty symbol alone."""
    d = F.shape[0]
    out = np.eye(d + 1, dtype=complex)
    out[:d, :d] = F
    return out


def comp_cell_matrix(Y: int) -> np.ndarray:
    """Per-cell compression: swaps the uniform vector and the empty symbol, identity elsewhere."""
    C = Y + 1
    u = np.zeros(C, dtype=complex)
    u[:Y] = 1 / np.sqrt(Y)
    bot = np.zeros(C, dtype=complex)
    bot[Y] = 1
    return (np.eye(C, dtype=complex) - np.outer(u, u) - np.outer(bot, bot)
            + np.outer(bot, u) + np.outer(u, bot))


@dataclass
class OracleState:
    amplitudes: np.ndarray
    X: int
    Y: int
    mode: str

    def __post_init__(self):
        check_dims(self.X, self.Y)
        expected = (self.X, self.Y) + (self.Y + 1,) * self.X
        if self.amplitudes.shape != expected:
            raise ValueError(f"amplitude tensor has shape {self.amplitudes.shape}, expected {expected}")
        if self.mode not in (STANDARD, COMPRESSED):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def C(self) -> int:
        return self.Y + 1

    def copy(self) -> OracleState:
        return OracleState(self.amplitudes.copy(), self.X, self.Y, self.mode)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def empty_weight(self) -> float:
        """Total probability on databases containing at least one empty cell."""
        cfg = np.indices((self.C,) * self.X)
        has_empty = np.any(cfg == self.Y, axis=0)
        return float(np.sum(np.abs(self.amplitudes[..., has_empty]) ** 2))

    def adversary_marginal(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p.reshape(self.X, self.Y, -1).sum(axis=2)


def check_dims(X: int, Y: int, queries: int = 0) -> None:
    if not 1 <= X <= MAX_X or not 2 <= Y <= MAX_Y:
        raise ResourceError(f"need 1 <= |X| <= {MAX_X} and 2 <= |Y| <= {MAX_Y}, got {X}, {Y}")
    if queries > MAX_QUERIES:
        raise ResourceError(f"at most {MAX_QUERIES} queries supported, got {queries}")


def initial_state(X: int, Y: int, mode: str = STANDARD) -> OracleState:
    """Adversary in |0,0>; database uniform over all functions, or all-empty when compressed."""
    check_dims(X, Y)
    C = Y + 1
    cell = np.zeros(C, dtype=complex)
    if mode == STANDARD:
        cell[:Y] = 1 / np.sqrt(Y)
    elif mode == COMPRESSED:
        cell[Y] = 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    db = np.ones((), dtype=complex)
    for _ in range(X):
        db = np.multiply.outer(db, cell)
    amps = np.zeros((X, Y) + (C,) * X, dtype=complex)
    amps[0, 0] = db
    return OracleState(amps, X, Y, mode)


def _apply_on_axis(amps: np.ndarray, A: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(A, amps, axes=([1], [axis])), 0, axis)


def _cells(state: OracleState, cells) -> list[int]:
    cells = range(state.X) if cells is None else cells
    out = [int(c) for c in cells]
    if any(not 0 <= c < state.X for c in out):
        raise ValueError("cell index out of range")
    return out


def qft_d(state: OracleState, register="y", inverse: bool = False) -> OracleState:
    """DFT on the answer register (``'y'``), one cell (int) or all cells (``'db'``)."""
    F = dft_matrix(state.Y, inverse)
    amps = state.amplitudes
    if register == "y":
        amps = _apply_on_axis(amps, F, 1)
    elif register == "db":
        for c in range(state.X):
            amps = _apply_on_axis(amps, _extended(F), 2 + c)
    elif isinstance(register, (int, np.integer)) and 0 <= register < state.X:
        amps = _apply_on_axis(amps, _extended(F), 2 + int(register))
    else:
        raise ValueError(f"unknown register {register!r}")
    return OracleState(amps, state.X, state.Y, state.mode)


def iqft_d(state: OracleState, register="y") -> OracleState:
    return qft_d(state, register, inverse=True)


def _sto_shift(state: OracleState, sign: int = 1) -> OracleState:
    """|x, y>|D> -> |x, y + sign*D_x mod Y>|D>; identity where D_x is empty."""
    amps = state.amplitudes.copy()
    for x in range(state.X):
        for v in range(state.Y):
            idx = [x, slice(None)] + [slice(None)] * state.X
            idx[2 + x] = v
            idx = tuple(idx)
            amps[idx] = np.roll(state.amplitudes[idx], sign * v, axis=0)
    return OracleState(amps, state.X, state.Y, state.mode)


def sto_apply(state: OracleState) -> OracleState:
    if state.mode != STANDARD:
        raise StateError("the standard oracle acts on standard-mode states only")
    return _sto_shift(state)


def o_apply(state: OracleState) -> OracleState:
    """Fourier-side oracle: QFT on y and database, StO, inverse QFT."""
    if state.mode != STANDARD:
        raise StateError("O acts on standard-mode states only")
    s = qft_d(qft_d(state, "y"), "db")
    s = _sto_shift(s)
    return iqft_d(iqft_d(s, "db"), "y")


def o_dagger(state: OracleState) -> OracleState:
    if state.mode != STANDARD:
        raise StateError("O acts on standard-mode states only")
    s = qft_d(qft_d(state, "y"), "db")
    s = _sto_shift(s, -1)
    return iqft_d(iqft_d(s, "db"), "y")


def comp_apply(state: OracleState, cells=None, mode: str | None = None) -> OracleState:
    A = comp_cell_matrix(state.Y)
    amps = state.amplitudes
    for c in _cells(state, cells):
        amps = _apply_on_axis(amps, A, 2 + c)
    return OracleState(amps, state.X, state.Y, mode or state.mode)


def comp_dagger(state: OracleState, cells=None, mode: str | None = None) -> OracleState:
    A = comp_cell_matrix(state.Y).conj().T
    amps = state.amplitudes
    for c in _cells(state, cells):
        amps = _apply_on_axis(amps, A, 2 + c)
    return OracleState(amps, state.X, state.Y, mode or state.mode)


def compress(state: OracleState) -> OracleState:
    if state.mode != STANDARD:
        raise StateError("state is already compressed")
    return comp_apply(state, mode=COMPRESSED)


def decompress(state: OracleState, cells=None) -> OracleState:
    """Undo compression on ``cells`` (all by default, which returns a standard-mode state)."""
    if state.mode != COMPRESSED:
        raise StateError("state is not compressed")
    full = cells is None
    return comp_dagger(state, cells, mode=STANDARD if full else COMPRESSED)


def co_apply(state: OracleState) -> OracleState:
    if state.mode != COMPRESSED:
        raise StateError("the compressed oracle acts on compressed-mode states only")
    return comp_apply(_sto_shift(comp_dagger(state)))


def co_dagger(state: OracleState) -> OracleState:
    if state.mode != COMPRESSED:
        raise StateError("the compressed oracle acts on compressed-mode states only")
    return comp_apply(_sto_shift(comp_dagger(state), -1))


def apply_local(state: OracleState, U: np.ndarray) -> OracleState:
    """Apply an (X*Y) x (X*Y) unitary to the adversary registers."""
    d = state.X * state.Y
    if U.shape != (d, d):
        raise ValueError(f"local unitary must be {d}x{d}, got {U.shape}")
    flat = state.amplitudes.reshape(d, -1)
    return OracleState((U @ flat).reshape(state.amplitudes.shape), state.X, state.Y, state.mode)


# ---- circuits ---------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    X: int
    Y: int
    steps: tuple   # items are (X*Y)x(X*Y) unitaries or QUERY

    def __post_init__(self):
        check_dims(self.X, self.Y, self.queries)
        d = self.X * self.Y
        for s in self.steps:
            if isinstance(s, str):
                if s != QUERY:
                    raise ValueError(f"unknown circuit step {s!r}")
            elif np.shape(s) != (d, d):
                raise ValueError(f"circuit unitary has shape {np.shape(s)}, expected {(d, d)}")

    @property
    def queries(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, str))


def random_circuit(X: int, Y: int, queries: int, rng: np.random.Generator) -> Circuit:
    """U_{q+1} Q U_q .. Q U_1 with Haar-random local unitaries."""
    from scipy.stats import unitary_group

    d = X * Y
    steps: list = [unitary_group.rvs(d, random_state=rng)]
    for _ in range(queries):
        steps += [QUERY, unitary_group.rvs(d, random_state=rng)]
    return Circuit(X, Y, tuple(steps))


def classical_query_circuit(X: int, Y: int, x: int = 0) -> Circuit:
    """Prepare |x, 0>, query once; the answer register then holds H(x)."""
    d = X * Y
    P = np.eye(d, dtype=complex)
    # swap basis states |0,0> and |x,0>
    a, b = 0, x * Y
    P[[a, b]] = P[[b, a]]
    return Circuit(X, Y, (P, QUERY))


def run_adversary(circuit: Circuit, oracle_kind: str = STANDARD,
                  trace: list | None = None) -> OracleState:
    """Run the alternation of local unitaries and oracle calls from the initial state.

    With ``trace`` given, appends (state before, state after) for every query.
    """
    if oracle_kind not in (STANDARD, COMPRESSED):
        raise ValueError(f"unknown oracle kind {oracle_kind!r}")
    state = initial_state(circuit.X, circuit.Y, oracle_kind)
    query = sto_apply if oracle_kind == STANDARD else co_apply
    for step in circuit.steps:
        if isinstance(step, str):
            before = state
            state = query(state)
            if trace is not None:
                trace.append((before, state))
        else:
            state = apply_local(state, step)
    return state


# ---- database properties ----------------------------------------------------

DbPredicate = Callable[[tuple], bool]


def predicate_mask(X: int, Y: int, predicate: DbPredicate) -> np.ndarray:
    """Boolean tensor over database configurations; empty cells appear as None."""
    C = Y + 1
    mask = np.zeros((C,) * X, dtype=bool)
    for cfg in itertools.product(range(C), repeat=X):
        mask[cfg] = bool(predicate(tuple(None if v == Y else v for v in cfg)))
    return mask


def project(state: OracleState, mask: np.ndarray) -> OracleState:
    return OracleState(state.amplitudes * mask, state.X, state.Y, state.mode)


def projector_norm(state: OracleState, predicate: DbPredicate | np.ndarray) -> float:
    if state.mode != COMPRESSED:
        raise StateError("database properties are measured on compressed states")
    mask = predicate if isinstance(predicate, np.ndarray) else predicate_mask(state.X, state.Y, predicate)
    return project(state, mask).norm()


def has_collision(db: tuple) -> bool:
    seen = [v for v in db if v is not None]
    return len(seen) != len(set(seen))


def always(db: tuple) -> bool:
    return True


def support_size(state: OracleState, tol: float = 1e-12) -> int:
    """Largest number of non-empty cells among database configurations carrying weight."""
    p = np.abs(state.amplitudes) ** 2
    weight = p.reshape((state.X * state.Y,) + p.shape[2:]).sum(axis=0)
    best = 0
    for cfg in zip(*np.nonzero(weight > tol)):
        best = max(best, sum(1 for v in cfg if v != state.Y))
    return best


# ---- inequality checks -----------------------------------------------------

Extraction = Callable[[int, int], Sequence[tuple[int, int]]]


@dataclass(frozen=True)
class GuessGapReport:
    p: float
    p_prime: float
    claims: int
    bound_holds: bool


def _claims_probability(state: OracleState, extraction: Extraction) -> tuple[float, int]:
    p = np.abs(state.amplitudes) ** 2
    total = 0.0
    claims = 0
    for x in range(state.X):
        for y in range(state.Y):
            pairs = list(extraction(x, y))
            claims = max(claims, len(pairs))
            sub = p[x, y]
            # an empty cell never satisfies a claim
            for cx, cy in pairs:
                if not 0 <= cx < state.X or not 0 <= cy < state.Y:
                    raise ValueError(f"claim {(cx, cy)} out of range")
                keep = np.zeros(state.C, dtype=bool)
                keep[cy] = True
                shape = [1] * state.X
                shape[cx] = state.C
                sub = sub * keep.reshape(shape)
            total += float(sub.sum())
    return total, claims


def guess_gap_check(circuit: Circuit, extraction: Extraction, tol: float = 1e-9) -> GuessGapReport:
    """p for the standard oracle, p' for the compressed one, and whether sqrt p <= sqrt p' + sqrt(k/|Y|)."""
    p, k = _claims_probability(run_adversary(circuit, STANDARD), extraction)
    p_prime, _ = _claims_probability(run_adversary(circuit, COMPRESSED), extraction)
    holds = np.sqrt(p) <= np.sqrt(p_prime) + np.sqrt(k / circuit.Y) + tol
    return GuessGapReport(p, p_prime, k, bool(holds))


@dataclass(frozen=True)
class QueryStepCheck:
    after: float
    before: float
    fresh: float

    @property
    def holds(self) -> bool:
        return self.after <= self.before + self.fresh + 1e-9


def query_step_checks(circuit: Circuit, predicate: DbPredicate) -> list[QueryStepCheck]:
    """|P psi_i| against |P phi_i| + |P cO (I-P) phi_i| at every query of a compressed run."""
    trace: list = []
    run_adversary(circuit, COMPRESSED, trace)
    mask = predicate_mask(circuit.X, circuit.Y, predicate)
    out = []
    for before, after in trace:
        fresh = project(co_apply(project(before, ~mask)), mask).norm()
        out.append(QueryStepCheck(project(after, mask).norm(), project(before, mask).norm(), fresh))
    return out
