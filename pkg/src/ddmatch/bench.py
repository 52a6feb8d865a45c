"""Workload generation, timing, verification and CSV reporting.

Workloads follow the standard methodology for this problem family: N
extents (half subscriptions, half updates) placed uniformly at random
on a segment of length L, all with the same length l = alpha * L / N,
where alpha is the overlapping degree (total extent length over routing
space length, a proxy for match density). Timings are wall clock over
the full matching call, preprocessing included (tree build, endpoint
sort, matrix allocation), averaged over independent executions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .core import Extent, IntersectionMatrix, Kind, MatchInstance, match_extents
from .dynamic import DynamicMatcher
from .matchers import (
    BinarySearchCounter,
    GridConfig,
    match_brute_force,
    match_grid,
    match_interval_tree,
    match_sort_based,
)
from .parallel import ParallelConfig, match_brute_force_parallel, match_interval_tree_parallel

DEFAULT_LENGTH = 1.0e6
DEFAULT_REPS = 30


@dataclass(frozen=True)
class WorkloadSpec:
    """Generator parameters: extent count, overlap degree, space length, dims, seed."""

    extents: int
    alpha: float
    length: float = DEFAULT_LENGTH
    dims: int = 1
    seed: int = 42

    def __post_init__(self) -> None:
        if self.extents < 0 or self.extents % 2:
            raise ValueError(f"extent count must be even and >= 0, got {self.extents}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.length <= 0:
            raise ValueError(f"routing space length must be positive, got {self.length}")
        if self.dims < 1:
            raise ValueError(f"dims must be >= 1, got {self.dims}")
        if self.extents and self.segment_length > self.length:
            raise ValueError(
                f"alpha={self.alpha} needs segments of length {self.segment_length} "
                f"> routing space {self.length}; lower alpha or raise the extent count"
            )

    @property
    def segment_length(self) -> float:
        """Common extent length l = alpha * L / N."""
        return self.alpha * self.length / self.extents if self.extents else 0.0


def generate_workload(spec: WorkloadSpec) -> MatchInstance:
    """Draw the instance: N/2 subscriptions + N/2 updates, deterministic per seed."""
    n = spec.extents // 2
    l = spec.segment_length
    rng = np.random.default_rng(spec.seed)
    lows = rng.uniform(0.0, spec.length - l, size=(spec.extents, spec.dims))
    subs = tuple(
        Extent.from_bounds(i + 1, Kind.SUBSCRIPTION, [(lo, lo + l) for lo in lows[i]])
        for i in range(n)
    )
    upds = tuple(
        Extent.from_bounds(j + 1, Kind.UPDATE, [(lo, lo + l) for lo in lows[n + j]])
        for j in range(n)
    )
    return MatchInstance(subs, upds, spec.dims)


@dataclass(frozen=True)
class _AlgoContext:
    grid: GridConfig | None
    parallel: ParallelConfig


ALGORITHMS: dict[str, Callable] = {
    "bf": lambda ctx: match_brute_force,
    "sbm": lambda ctx: match_sort_based,
    "gb": lambda ctx: partial(match_grid, grid=ctx.grid),
    "itm": lambda ctx: match_interval_tree,
    "bf-par": lambda ctx: partial(match_brute_force_parallel, config=ctx.parallel),
    "itm-par": lambda ctx: partial(match_interval_tree_parallel, config=ctx.parallel),
}


def _matcher_for(algo: str, spec: WorkloadSpec, threads: int, grid_cells: int | None):
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")
    grid = None
    if algo == "gb":
        if grid_cells is None:
            raise ValueError("grid-based matching needs a cell count (--grid-cells)")
        grid = GridConfig(grid_cells, (0.0, spec.length))
    ctx = _AlgoContext(grid=grid, parallel=ParallelConfig(threads))
    return ALGORITHMS[algo](ctx)


@dataclass
class BenchResult:
    """Timing record for one algorithm at one workload configuration."""

    algo: str
    extents: int
    alpha: float
    dims: int
    threads: int
    grid_cells: int | None
    reps: int
    wall_times: list[float]
    mean_s: float
    stddev_s: float
    matches: int
    speedup: float | None = None


def run_bench(
    spec: WorkloadSpec,
    algo: str,
    threads: int = 1,
    grid_cells: int | None = None,
    reps: int = DEFAULT_REPS,
    fixed_workload: bool = False,
) -> BenchResult:
    """Time `algo` over `reps` executions.

    Each repetition draws a fresh workload from seed XOR rep index
    (`fixed_workload` re-times one instance instead). The timed region is
    the complete matching call: preprocessing, matrix allocation, and the
    match itself. A tiny untimed warm-up run first, so one-time kernel
    compilation/loading never pollutes the measurements.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    matcher = _matcher_for(algo, spec, threads, grid_cells)
    warm_spec = replace(spec, extents=64, alpha=1.0, seed=0)
    match_extents(generate_workload(warm_spec), matcher)
    wall_times: list[float] = []
    matches = 0
    for rep in range(reps):
        rep_spec = spec if fixed_workload else replace(spec, seed=spec.seed ^ rep)
        inst = generate_workload(rep_spec)
        t0 = time.perf_counter()
        matrix = match_extents(inst, matcher)
        wall_times.append(time.perf_counter() - t0)
        matches = matrix.popcount()
    mean = float(np.mean(wall_times))
    stddev = float(np.std(wall_times, ddof=1)) if reps > 1 else 0.0
    return BenchResult(
        algo=algo,
        extents=spec.extents,
        alpha=spec.alpha,
        dims=spec.dims,
        threads=threads,
        grid_cells=grid_cells,
        reps=reps,
        wall_times=wall_times,
        mean_s=mean,
        stddev_s=stddev,
        matches=matches,
    )


def attach_speedups(results: Sequence[BenchResult]) -> None:
    """Fill in speedup = mean(p=1) / mean(p) wherever a p=1 baseline exists."""
    baselines: dict[tuple, float] = {}
    for r in results:
        if r.threads == 1:
            baselines[(r.algo, r.extents, r.alpha, r.dims, r.grid_cells)] = r.mean_s
    for r in results:
        base = baselines.get((r.algo, r.extents, r.alpha, r.dims, r.grid_cells))
        if base is not None and r.mean_s > 0:
            r.speedup = base / r.mean_s


@dataclass
class VerifyReport:
    ok: bool
    message: str
    matches: int


def _first_difference(a: IntersectionMatrix, b: IntersectionMatrix) -> tuple[int, int]:
    diff = a.words ^ b.words
    j_idx, word_idx = np.nonzero(diff)
    j, word = int(j_idx[0]), int(word_idx[0])
    bit = (int(diff[j, word]) & -int(diff[j, word])).bit_length() - 1
    return (word << 6) + bit + 1, j + 1


def verify_instance(
    spec: WorkloadSpec, grid_cells: int = 64, audit_moves: int = 50
) -> VerifyReport:
    """Cross-check every algorithm on one generated instance.

    Runs brute force, sort-based, grid-based and interval-tree matching
    and demands bit-identical matrices; checks each column's population
    against the binary-search counting oracle; and audits a short random
    move sequence against brute-force recomputation. The 1-D-only checks
    (counting, moves) are skipped for dims > 1.
    """
    if spec.extents == 0:
        return VerifyReport(True, "OK: empty instance, K=0", 0)
    inst = generate_workload(spec)
    reference = match_extents(inst, _matcher_for("bf", spec, 1, None))
    for algo in ("sbm", "gb", "itm"):
        matcher = _matcher_for(algo, spec, 1, grid_cells if algo == "gb" else None)
        result = match_extents(inst, matcher)
        if result != reference:
            i, j = _first_difference(result, reference)
            return VerifyReport(
                False, f"MISMATCH: {algo} differs from bf first at (i={i}, j={j})", reference.popcount()
            )
    k_total = reference.popcount()
    if spec.dims == 1:
        counter = BinarySearchCounter(inst.subscription_intervals(0))
        u_low = np.array([u.low for u in inst.update_intervals(0)])
        u_high = np.array([u.high for u in inst.update_intervals(0)])
        expected = counter.count_many(u_low, u_high)
        got = reference.column_popcounts()
        if not np.array_equal(expected, got):
            j = int(np.nonzero(expected != got)[0][0]) + 1
            return VerifyReport(
                False,
                f"MISMATCH: column {j} popcount {int(got[j - 1])} != counting oracle {int(expected[j - 1])}",
                k_total,
            )
        dm = DynamicMatcher(inst.subscription_intervals(0), inst.update_intervals(0))
        rng = np.random.default_rng(spec.seed + 1)
        l = spec.segment_length
        for move in range(audit_moves):
            lo = float(rng.uniform(0, spec.length - l))
            if rng.random() < 0.5:
                j = int(rng.integers(1, dm.m + 1))
                dm.move_update(j, lo, lo + l)
            else:
                i = int(rng.integers(1, dm.n + 1))
                dm.move_subscription(i, lo, lo + l)
            fresh = match_brute_force(dm.subs, dm.upds)
            if dm.matrix != fresh:
                i, j = _first_difference(dm.matrix, fresh)
                return VerifyReport(
                    False, f"MISMATCH: dynamic matrix wrong after move {move + 1} at (i={i}, j={j})", k_total
                )
    return VerifyReport(True, f"OK: 4 algorithms agree, K={k_total}", k_total)


CSV_HEADER = "algo,N,alpha,d,p,G,reps,mean_s,stddev_s,K,speedup"


def write_csv(results: Sequence[BenchResult], path) -> None:
    """One row per result, in input order; floats use repr for lossless round-trips."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in results:
            fields = [
                r.algo,
                str(r.extents),
                repr(r.alpha),
                str(r.dims),
                str(r.threads),
                "" if r.grid_cells is None else str(r.grid_cells),
                str(r.reps),
                repr(r.mean_s),
                repr(r.stddev_s),
                str(r.matches),
                "" if r.speedup is None else repr(r.speedup),
            ]
            fh.write(",".join(fields) + "\n")


def read_csv(path) -> list[BenchResult]:
    """Parse a file produced by write_csv (wall_times are not serialized)."""
    results = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            f = line.split(",")
            results.append(
                BenchResult(
                    algo=f[0],
                    extents=int(f[1]),
                    alpha=float(f[2]),
                    dims=int(f[3]),
                    threads=int(f[4]),
                    grid_cells=None if f[5] == "" else int(f[5]),
                    reps=int(f[6]),
                    wall_times=[],
                    mean_s=float(f[7]),
                    stddev_s=float(f[8]),
                    matches=int(f[9]),
                    speedup=None if f[10] == "" else float(f[10]),
                )
            )
    return results
