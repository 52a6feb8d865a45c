"""Command-line interface: bench, verify, dynamic, generate."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .bench import (
    DEFAULT_LENGTH,
    DEFAULT_REPS,
    ALGORITHMS,
    WorkloadSpec,
    attach_speedups,
    generate_workload,
    read_csv,
    run_bench,
    verify_instance,
    write_csv,
)
from .core import write_extents
from .dynamic import DynamicMatcher
from .matchers import match_brute_force


def _workload_args(parser: argparse.ArgumentParser, dims: bool = True) -> None:
    parser.add_argument("--extents", type=int, required=True, help="total extent count N (half S, half U)")
    parser.add_argument("--alpha", type=float, required=True, help="overlapping degree")
    parser.add_argument("--length", type=float, default=DEFAULT_LENGTH, help="routing space length L")
    if dims:
        parser.add_argument("--dims", type=int, default=1, help="dimensions d")
    parser.add_argument("--seed", type=int, default=42, help="base RNG seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddmatch", description="Extent intersection matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bench = sub.add_parser("bench", help="time one matching algorithm")
    _workload_args(p_bench)
    p_bench.add_argument("--algo", required=True, choices=sorted(ALGORITHMS), help="algorithm to run")
    p_bench.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker count for parallel algorithms")
    p_bench.add_argument("--grid-cells", type=int, default=None, help="grid cell count (gb only)")
    p_bench.add_argument("--reps", type=int, default=DEFAULT_REPS, help="independent executions to average")
    p_bench.add_argument("--csv", default=None, help="append the result to this CSV file")
    p_bench.add_argument("--fixed-workload", action="store_true", help="re-time one instance instead of regenerating per rep")

    p_verify = sub.add_parser("verify", help="cross-check all algorithms against brute force")
    _workload_args(p_verify, dims=False)
    p_verify.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to verify")
    p_verify.add_argument("--grid-cells", type=int, default=64, help="grid cell count used in the check")

    p_dyn = sub.add_parser("dynamic", help="random extent moves with brute-force auditing")
    _workload_args(p_dyn, dims=False)
    p_dyn.add_argument("--moves", type=int, required=True, help="number of random moves")
    p_dyn.add_argument("--audit-every", type=int, default=1, help="audit the matrix every k moves")

    p_gen = sub.add_parser("generate", help="write a workload in the extent text format")
    _workload_args(p_gen)
    p_gen.add_argument("--out", required=True, help="output path")
    return parser


def _cmd_bench(args) -> int:
    spec = WorkloadSpec(args.extents, args.alpha, args.length, args.dims, args.seed)
    threads = args.threads if args.algo.endswith("-par") else 1
    result = run_bench(
        spec, args.algo, threads=threads, grid_cells=args.grid_cells,
        reps=args.reps, fixed_workload=args.fixed_workload,
    )
    if args.csv:
        existing = read_csv(args.csv) if os.path.exists(args.csv) else []
        existing.append(result)
        attach_speedups(existing)
        write_csv(existing, args.csv)
    print(
        f"{args.algo}: N={spec.extents} alpha={spec.alpha} d={spec.dims} p={threads} "
        f"reps={args.reps} mean={result.mean_s:.6f}s stddev={result.stddev_s:.6f}s K={result.matches}"
        + (f" speedup={result.speedup:.2f}" if result.speedup else "")
    )
    return 0


def _cmd_verify(args) -> int:
    status = 0
    for offset in range(args.seeds):
        spec = WorkloadSpec(args.extents, args.alpha, args.length, 1, args.seed + offset)
        report = verify_instance(spec, grid_cells=args.grid_cells)
        print(f"seed {spec.seed}: {report.message}")
        if not report.ok:
            status = 1
    return status


def _cmd_dynamic(args) -> int:
    spec = WorkloadSpec(args.extents, args.alpha, args.length, 1, args.seed)
    inst = generate_workload(spec)
    dm = DynamicMatcher(inst.subscription_intervals(0), inst.update_intervals(0))
    rng = np.random.default_rng(spec.seed + 1)
    l = spec.segment_length
    for move in range(1, args.moves + 1):
        lo = float(rng.uniform(0, spec.length - l))
        if rng.random() < 0.5:
            dm.move_update(int(rng.integers(1, dm.m + 1)), lo, lo + l)
        else:
            dm.move_subscription(int(rng.integers(1, dm.n + 1)), lo, lo + l)
        if move % args.audit_every == 0:
            if dm.matrix != match_brute_force(dm.subs, dm.upds):
                print(f"AUDIT FAILED after move {move}")
                return 1
    print(f"OK: {args.moves} moves audited every {args.audit_every}, final K={dm.matrix.popcount()}")
    return 0


def _cmd_generate(args) -> int:
    spec = WorkloadSpec(args.extents, args.alpha, args.length, args.dims, args.seed)
    write_extents(generate_workload(spec), args.out)
    print(f"wrote {spec.extents} extents (d={spec.dims}) to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "bench": _cmd_bench,
        "verify": _cmd_verify,
        "dynamic": _cmd_dynamic,
        "generate": _cmd_generate,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
