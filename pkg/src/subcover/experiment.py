"""Scaling sweeps, exponent fits and the batch check suites behind the CLI."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds, compressed as co, montecarlo as mc
from .algorithms import solve_rk
from .errors import InstanceInfeasible, NotFound
from .grover import QueryLedger
from .hashfamily import DOMAIN_CAP, FunctionFamily, default_domain_size, derive_seed
from .witness import verify_sc, witness_from_json, witness_to_json

PROBLEMS = ("one-k-sc", "r-k-sc")
CSV_COLUMNS = ("problem", "r", "k", "variant", "N", "M", "trial", "seed",
               "quantum_queries", "classical_evals", "success", "witness_json")


@dataclass(frozen=True)
class ScalingConfig:
    problem: str
    k: int
    Ns: tuple[int, ...]
    trials: int
    seed: int = 0
    r: int = 1
    variant: str = "fixed"
    workers: int = 1
    cap: int = DOMAIN_CAP

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {PROBLEMS}")
        if self.problem == "one-k-sc" and self.r != 1:
            raise ValueError("one-k-sc has r = 1")
        if self.trials < 1 or not self.Ns:
            raise ValueError("need at least one N and one trial")

    def domain_size(self, N: int) -> int:
        return default_domain_size(N, self.k, self.r, self.cap)


@dataclass(frozen=True)
class TrialRecord:
    problem: str
    r: int
    k: int
    variant: str
    N: int
    M: int
    trial: int
    seed: int
    quantum_queries: int
    classical_evals: int
    success: bool
    witness_json: str


@dataclass
class ScalingRun:
    config: ScalingConfig
    records: list[TrialRecord] = field(default_factory=list)

    def mean_queries(self) -> dict[int, float]:
        """Mean quantum queries per N over all trials, failed ones included."""
        out = {}
        for N in self.config.Ns:
            q = [r.quantum_queries for r in self.records if r.N == N]
            out[N] = float(np.mean(q))
        return out

    def fit(self) -> dict:
        return fit_exponent(sorted(self.mean_queries().items()))


def _run_trial(config: ScalingConfig, N: int, M: int, trial: int) -> TrialRecord:
    seed = derive_seed(config.seed, N, trial)
    family = FunctionFamily(seed, config.k, N, M)
    rng = np.random.default_rng(seed)
    ledger = QueryLedger()
    try:
        w, _ = solve_rk(family, config.r, rng, ledger, config.variant)
        wj, ok = witness_to_json(w), True
    except (InstanceInfeasible, NotFound):
        wj, ok = "", False
    return TrialRecord(config.problem, config.r, config.k, config.variant, N, M, trial, seed,
                       ledger.quantum_queries, ledger.classical_evals, ok, wj)


def run_scaling(config: ScalingConfig) -> ScalingRun:
    # the cap is checked for every N before any trial runs
    sizes = {N: config.domain_size(N) for N in config.Ns}
    jobs = [(N, sizes[N], t) for N in config.Ns for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            futures = [pool.submit(_run_trial, config, *job) for job in jobs]
            records = [f.result() for f in futures]
    else:
        records = [_run_trial(config, *job) for job in jobs]
    records.sort(key=lambda rec: (config.Ns.index(rec.N), rec.trial))
    return ScalingRun(config, records)


def replay(record: TrialRecord) -> bool:
    """Re-verify a stored witness against a freshly built family."""
    if not record.success:
        return True
    family = FunctionFamily(record.seed, record.k, record.N, record.M)
    return verify_sc(family, witness_from_json(record.witness_json))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        row = asdict(rec)
        row["success"] = int(row["success"])
        w.writerow([row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(TrialRecord(row["problem"], int(row["r"]), int(row["k"]), row["variant"],
                               int(row["N"]), int(row["M"]), int(row["trial"]), int(row["seed"]),
                               int(row["quantum_queries"]), int(row["classical_evals"]),
                               bool(int(row["success"])), row["witness_json"]))
    return out


def emit(run: ScalingRun, fmt: str = "csv", path=None) -> str:
    if fmt == "csv":
        text = records_to_csv(run.records)
    elif fmt == "json":
        cfg = asdict(run.config)
        cfg["Ns"] = list(cfg["Ns"])
        text = json.dumps({"config": cfg, "records": [asdict(r) for r in run.records]},
                          indent=1, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def fit_exponent(points) -> dict:
    """Least-squares line through (log N, log mean queries)."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    if any(n <= 0 or q <= 0 for n, q in pts):
        raise ValueError("points must be positive")
    x = np.log([float(n) for n, _ in pts])
    y = np.log([float(q) for _, q in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1 - ss_res / ss_tot
    if ss_tot <= 1e-300:
        slope = 0.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


# ---- Monte-Carlo grid -------------------------------------------------------

MC_COLUMNS = ("property", "i", "N", "k", "params", "trials", "p_hat", "ci_half_width",
              "bound_prob", "holds", "margin")


def mc_check_grid(i_values=(2, 4, 8, 16), N_values=(64, 256), trials: int = 100_000,
                  seed: int = 0) -> list[dict]:
    """Collision (j = 1, 2; k = 2) and repetition (ell = 1, j = 2, 3; k = 3) probabilities vs their bounds."""
    rows = []
    cases = []
    for N in N_values:
        for i in i_values:
            for j in (1, 2):
                cases.append((mc.at_least_collisions(j), i, N, 2, bounds.collision_bound(i, j, N)))
            for j in (2, 3):
                cases.append((mc.at_least_repetitions(1, j), i, N, 3, bounds.repetition_bound(i, 1, j, N)))
    for n, (prop, i, N, k, bound) in enumerate(cases):
        rng = np.random.default_rng(derive_seed(seed, n))
        est = mc.estimate_probability(prop, i, N, k, trials, rng)
        chk = mc.check_bound(est.p_hat, est.half_width, bound)
        rows.append({"property": prop.name, "i": i, "N": N, "k": k, "params": prop.describe(),
                     "trials": trials, "p_hat": est.p_hat, "ci_half_width": est.half_width,
                     "bound_prob": bound.as_probability, "holds": chk.holds, "margin": chk.margin})
    return rows


# ---- compressed-oracle suite ------------------------------------------------

CO_COLUMNS = ("check", "dims", "queries", "max_error", "pass")


def _random_compressed_state(X, Y, rng) -> co.OracleState:
    shape = (X, Y) + (Y + 1,) * X
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return co.OracleState(a / np.linalg.norm(a), X, Y, co.COMPRESSED)


def circuit_corpus(count: int = 60, seed: int = 0, dims=((2, 2), (2, 3), (3, 2), (3, 3)),
                   max_queries: int = 3) -> list[co.Circuit]:
    rng = np.random.default_rng(seed)
    combos = [(X, Y, q) for X, Y in dims for q in range(1, max_queries + 1)]
    return [co.random_circuit(*combos[n % len(combos)], rng) for n in range(count)]


def co_check_suite(count: int = 60, seed: int = 0) -> list[dict]:
    """One row per (check, dims, queries) group with the worst error seen across the corpus."""
    rng = np.random.default_rng(derive_seed(seed, 1))
    groups: dict[tuple, dict] = {}

    def record(check, X, Y, q, err, tol):
        key = (check, f"{X}x{Y}", q)
        g = groups.setdefault(key, {"check": check, "dims": key[1], "queries": q,
                                    "max_error": 0.0, "pass": True})
        g["max_error"] = max(g["max_error"], float(err))
        g["pass"] &= bool(err <= tol)

    def single_claim(x, y):
        return [(x, y)]

    collision_masks = {}
    for circ in circuit_corpus(count, seed):
        X, Y, q = circ.X, circ.Y, circ.queries
        s = _random_compressed_state(X, Y, rng)
        out = co.co_apply(s)
        record("co-unitary", X, Y, q, max(abs(out.norm() - 1),
                                          np.max(np.abs(co.co_dagger(out).amplitudes - s.amplitudes))), 1e-10)
        back = co.comp_apply(co.comp_dagger(s))
        record("comp-identity", X, Y, q, np.max(np.abs(back.amplitudes - s.amplitudes)), 1e-12)

        trace: list = []
        std = co.run_adversary(circ, co.STANDARD)
        cmp_ = co.run_adversary(circ, co.COMPRESSED, trace)
        record("lazy-sampling", X, Y, q,
               np.max(np.abs(std.adversary_marginal() - cmp_.adversary_marginal())), 1e-9)
        excess = max(co.support_size(after, tol=1e-20) - (n + 1) for n, (_, after) in enumerate(trace))
        record("support-growth", X, Y, q, max(excess, 0), 0)

        z = co.guess_gap_check(circ, single_claim)
        record("guess-gap", X, Y, q, max(0.0, np.sqrt(z.p) - np.sqrt(z.p_prime) - np.sqrt(z.claims / Y)), 1e-9)

        steps = co.query_step_checks(circ, co.has_collision)
        record("query-step", X, Y, q, max(max(0.0, c.after - c.before - c.fresh) for c in steps), 1e-9)

        if (X, Y) not in collision_masks:
            collision_masks[(X, Y)] = co.predicate_mask(X, Y, co.has_collision)
        mask = rng.random(collision_masks[(X, Y)].shape) < 0.5
        U = circ.steps[0]
        lhs = co.project(co.apply_local(s, U), mask).norm()
        record("local-commute", X, Y, q, abs(lhs - co.project(s, mask).norm()), 1e-10)
    return list(groups.values())


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({c: (int(v) if isinstance(v, bool) else v) for c, v in row.items()})
    return buf.getvalue()


# ---- bound table ------------------------------------------------------------

BOUND_COLUMNS = ("formula", "args", "raw", "clamped", "probability")


def bound_table(N_values=(64, 256), i_values=(1, 2, 4, 8, 16), k: int = 2) -> list[dict]:
    rows = []

    def add(name, args, value):
        if isinstance(value, bounds.BoundValue):
            rows.append({"formula": name, "args": args, "raw": value.raw,
                         "clamped": value.clamped, "probability": value.as_probability})
        else:
            rows.append({"formula": name, "args": args, "raw": value, "clamped": "", "probability": ""})

    for N in N_values:
        for i in i_values:
            for j in (1, 2):
                add("collision_bound", f"i={i};j={j};N={N}", bounds.collision_bound(i, j, N))
            for j in (2, 3):
                add("repetition_bound", f"i={i};ell=1;j={j};N={N}", bounds.repetition_bound(i, 1, j, N))
            add("one_ksc_amplitude_bound", f"i={i};k={k};N={N}", bounds.one_ksc_amplitude_bound(i, k, N))
            add("a_i", f"i={i};N={N}", bounds.a_i(i, N))
        add("mu3", f"ell=0;N={N}", bounds.mu3(0, N))
        add("a_i_cap", f"N={N}", bounds.a_i_cap(N))
    add("c_k", f"k={k}", bounds.c_k(k))
    for s in (1, 2, 3, 4, 5):
        add("pi_s", f"s={s}", bounds.pi_s(s))
    add("lower_bound_exponent", f"problem=k-rsc;k={k}", float(bounds.lower_bound_exponent("k-rsc", k)))
    add("lower_bound_exponent", f"problem=one-k-sc;k={k}", float(bounds.lower_bound_exponent("one-k-sc", k)))
    return rows

