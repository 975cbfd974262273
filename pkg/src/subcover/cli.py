"""Command-line entry point: ``subcover <subcommand> [options]``.

Exit codes: 0 all checks passed, 1 a check failed (or no witness found),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiment as ex
from .errors import InstanceInfeasible, NotFound, ResourceError
from .grover import QueryLedger
from .hashfamily import FunctionFamily, default_domain_size
from .algorithms import solve_rk
from .witness import verify_sc


def _common(p: argparse.ArgumentParser, n_default=None) -> None:
    p.add_argument("--problem", default="one-k-sc", choices=ex.PROBLEMS)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, action="append", dest="n", help="codomain size N (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", default="fixed", choices=("fixed", "any"))
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", default="csv", choices=("csv", "json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print the witness")
    _common(p)

    p = sub.add_parser("scaling", help="query-count sweep over several N")
    _common(p)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bounds", help="table of bound evaluations")
    _common(p)
    p.add_argument("--i", type=int, action="append", dest="i")

    p = sub.add_parser("mc-check", help="Monte-Carlo probabilities against bounds")
    _common(p)
    p.add_argument("--i", type=int, action="append", dest="i")
    p.add_argument("--trials", type=int, default=100_000)

    p = sub.add_parser("co-check", help="compressed-oracle invariant suite")
    _common(p)
    p.add_argument("--trials", type=int, default=60, help="number of random circuits")

    p = sub.add_parser("fit", help="fit the query exponent of a scaling CSV")
    p.add_argument("path")
    p.add_argument("--out")
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows(rows, columns, fmt) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    return ex.rows_to_csv(rows, columns)


def cmd_solve(args) -> int:
    N = (args.n or [16])[0]
    M = default_domain_size(N, args.k, args.r)
    family = FunctionFamily(args.seed, args.k, N, M)
    rng = np.random.default_rng(args.seed)
    ledger = QueryLedger()
    try:
        w, _ = solve_rk(family, args.r, rng, ledger, args.variant)
    except (InstanceInfeasible, NotFound) as e:
        _write(json.dumps({"success": False, "reason": str(e), "ledger": ledger.to_json()}) + "\n", args.out)
        return 1
    result = {"success": True, "N": N, "M": M, "witness": w.to_json(),
              "verified": verify_sc(family, w), "ledger": ledger.to_json()}
    _write(json.dumps(result) + "\n", args.out)
    return 0


def cmd_scaling(args) -> int:
    cfg = ex.ScalingConfig(args.problem, args.k, tuple(args.n or [16, 32, 64]), args.trials,
                           args.seed, args.r, args.variant, args.workers)
    run = ex.run_scaling(cfg)
    _write(ex.emit(run, args.format), args.out)
    if len(cfg.Ns) >= 3:
        print(json.dumps(run.fit()), file=sys.stderr)
    return 0 if all(ex.replay(r) for r in run.records) else 1


def cmd_bounds(args) -> int:
    rows = ex.bound_table(tuple(args.n or [64, 256]), tuple(args.i or [1, 2, 4, 8, 16]), args.k)
    _write(_rows(rows, ex.BOUND_COLUMNS, args.format), args.out)
    return 0


def cmd_mc_check(args) -> int:
    rows = ex.mc_check_grid(tuple(args.i or [2, 4, 8, 16]), tuple(args.n or [64, 256]),
                            args.trials, args.seed)
    _write(_rows(rows, ex.MC_COLUMNS, args.format), args.out)
    return 0 if all(r["holds"] for r in rows) else 1


def cmd_co_check(args) -> int:
    rows = ex.co_check_suite(args.trials, args.seed)
    _write(_rows(rows, ex.CO_COLUMNS, args.format), args.out)
    return 0 if all(r["pass"] for r in rows) else 1


def cmd_fit(args) -> int:
    with open(args.path) as fh:
        records = ex.records_from_csv(fh.read())
    by_n: dict[int, list[int]] = {}
    for r in records:
        by_n.setdefault(r.N, []).append(r.quantum_queries)
    fit = ex.fit_exponent(sorted((n, float(np.mean(q))) for n, q in by_n.items()))
    _write(json.dumps(fit) + "\n", args.out)
    return 0


COMMANDS = {"solve": cmd_solve, "scaling": cmd_scaling, "bounds": cmd_bounds,
            "mc-check": cmd_mc_check, "co-check": cmd_co_check, "fit": cmd_fit}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, ResourceError, OSError) as e:
        print(f"subcover: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
