"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from subcover import bounds
from subcover import experiment as ex
from subcover.algorithms import phase1_mask
from subcover.grover import QueryLedger, SearchInstance, bbht_search, success_probability
from subcover.hashfamily import FunctionFamily
from subcover.witness import (
    brute_force_rsc, brute_force_sc, enumerate_repetitions, verify_rsc, verify_sc,
)

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
        assert ok, detail
    return emit


def scaling_check(config, lo, hi, budget):
    start = time.perf_counter()
    run = ex.run_scaling(config)
    elapsed = time.perf_counter() - start
    fit = run.fit()
    solved = sum(r.success for r in run.records)
    replayed = all(ex.replay(r) for r in run.records)
    ok = lo <= fit["slope"] <= hi and replayed and elapsed < budget
    detail = (f"slope={fit['slope']:.3f} (want [{lo}, {hi}]), r2={fit['r2']:.3f}, "
              f"solved {solved}/{len(run.records)}, witnesses verify={replayed}, {elapsed:.1f}s")
    return ok, detail


def test_criterion_1_algorithm1_scaling(report):
    cfg = ex.ScalingConfig("one-k-sc", 2, (64, 256, 1024), 200, seed=0)
    assert all(cfg.domain_size(N) == N * N for N in cfg.Ns)
    report(1, *scaling_check(cfg, 0.35, 0.65, 300))


def test_criterion_2_algorithm3_scaling(report):
    cfg = ex.ScalingConfig("r-k-sc", 3, (8, 16, 32), 200, seed=0, r=2)
    assert all(cfg.domain_size(N) == min((2 * N) ** 3, 2**24) for N in cfg.Ns)
    report(2, *scaling_check(cfg, 0.3, 0.7, 600))


def test_criterion_3_any_indices_advantage(report):
    k, N, j = 4, 32, 3
    fixed = anyj = 0
    for seed in range(50):
        tab = FunctionFamily(seed, k, N, N ** k).tables()
        fixed += int(phase1_mask(tab, j, "fixed").sum())
        anyj += int(phase1_mask(tab, j, "any").sum())
    ratio = anyj / fixed
    target = math.comb(4, 3)
    ok = abs(ratio - target) <= 0.25 * target
    report(3, ok, f"marked-set ratio any/fixed = {ratio:.3f} over 50 seeds (want {target} +/- 25%)")


def test_criterion_4_grover_exactness(report):
    p = success_probability(4, 1, 1)
    rng = np.random.default_rng(0)
    M, t = 2**16, 16
    inst = SearchInstance(M, rng.choice(M, size=t, replace=False))
    ledger = QueryLedger()
    for _ in range(1000):
        bbht_search(inst, rng, ledger)
    mean = ledger.quantum_queries / 1000
    limit = 8 * math.sqrt(M / t)
    ok = abs(p - 1) <= 1e-12 and mean <= limit
    report(4, ok, f"p(4,1,1)={p:.15f}, BBHT mean queries {mean:.1f} <= {limit:.0f}")


def test_criterion_5_bound_formulas(report):
    failures = []
    if bounds.c_k(4) != 40:
        failures.append("c_k(4)")
    bad_pi = [s for s in range(1, 41) if not bounds.pi_s(s) <= 4 * s]
    if bad_pi:
        failures.append(f"pi_s at {bad_pi}")
    worst = 0.0
    for N in (2**8, 2**12, 2**16):
        vals = bounds.a_i_prefix(math.isqrt(N) + 1, N)
        cap = bounds.a_i_cap(N)
        worst = max(worst, float(vals.max() / cap))
        if not np.all(vals < cap):
            failures.append(f"a_i cap at N={N}")
        for i in (1, math.isqrt(N) // 2, math.isqrt(N)):
            if abs(vals[i] - bounds.a_i(i, N)) > 1e-9 * abs(bounds.a_i(i, N)):
                failures.append(f"a_i prefix mismatch at i={i}, N={N}")
    report(5, not failures, f"c_k(4)=40, pi_s <= 4s for s<=40, max a_i/cap = {worst:.3f}"
           + (f"; failures: {failures}" if failures else ""))


def test_criterion_6_monte_carlo(report):
    start = time.perf_counter()
    rows = ex.mc_check_grid((2, 4, 8, 16), (64, 256), trials=100_000, seed=0)
    elapsed = time.perf_counter() - start
    bad = [(r["property"], r["params"], r["i"], r["N"]) for r in rows if not r["holds"]]
    tightest = max(r["p_hat"] / r["bound_prob"] for r in rows)
    ok = len(rows) == 32 and not bad and elapsed < 600
    report(6, ok, f"{len(rows)} grid points, violations={bad}, largest p_hat/bound {tightest:.3f}, {elapsed:.1f}s")


def test_criterion_7_compressed_oracle(report):
    start = time.perf_counter()
    corpus = ex.circuit_corpus(60, seed=0)
    assert len(corpus) >= 50 and all(c.X <= 3 and c.Y <= 3 and c.queries <= 3 for c in corpus)
    rows = ex.co_check_suite(60, seed=0)
    elapsed = time.perf_counter() - start
    worst = {}
    for r in rows:
        worst[r["check"]] = max(worst.get(r["check"], 0.0), r["max_error"])
    failed = sorted({r["check"] for r in rows if not r["pass"]})
    ok = not failed and elapsed < 120
    summary = ", ".join(f"{k}={v:.1e}" for k, v in sorted(worst.items()))
    report(7, ok, f"60 circuits, worst errors: {summary}; failed={failed}; {elapsed:.1f}s")


def quadratic_sc(tab):
    k, M = tab.shape
    covered = np.ones((M, M), dtype=bool)          # covered[x0, x]
    for i in range(k):
        hit = np.zeros((M, M), dtype=bool)
        for jj in range(k):
            hit |= tab[i][:, None] == tab[jj][None, :]
        covered &= hit
    np.fill_diagonal(covered, False)
    return bool(covered.any())


def quadratic_rsc(tab):
    k, M = tab.shape
    ok = np.ones(M, dtype=bool)
    for i in range(k):
        same = tab[i][:, None] == tab[i][None, :]
        np.fill_diagonal(same, False)
        ok &= same.any(axis=1)
    return bool(ok.any())


def test_criterion_8_verifier_oracles(report):
    rng = np.random.default_rng(0)
    mismatches = 0
    rsc_ok = True
    for _ in range(100):
        M = int(rng.integers(2, 257))
        f = FunctionFamily(int(rng.integers(2**63)), 2, 4, M)
        tab = f.tables()
        w = brute_force_sc(f, 1)
        mismatches += (w is not None) != quadratic_sc(tab)
        if w is not None and not verify_sc(f, w):
            mismatches += 1
        w_rsc = brute_force_rsc(f)
        mismatches += (w_rsc is not None) != quadratic_rsc(tab)
        if w_rsc is not None:
            rsc_ok &= verify_rsc(f, w_rsc) and verify_sc(f, w_rsc.as_subset_cover())
        reps = [x.x for x in enumerate_repetitions(f, 2)]
        mismatches += reps != np.flatnonzero(tab[0] == tab[1]).tolist()
    ok = mismatches == 0 and rsc_ok
    report(8, ok, f"100 instances, mismatches={mismatches}, RSC witnesses re-verify as SC={rsc_ok}")
