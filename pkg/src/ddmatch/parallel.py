"""Data-parallel matching over static contiguous column chunks.

All tree queries are independent and each one writes only its own
matrix column, so the query loop is fork-join parallel with no
synchronization on the output: partition the update extents into p
contiguous chunks, run the chunks on worker threads against the shared
read-only tree, join. The result is bit-identical to the sequential
matcher regardless of p or scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as k
from .core import IntersectionMatrix, Interval1D
from .interval_tree import IntervalTree
from .matchers import _bounds


def physical_cpu_count() -> int:
    """Distinct physical cores; falls back to the logical count."""
    try:
        pairs = set()
        phys, core = None, None
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("physical id"):
                    phys = line.split(":")[1].strip()
                elif line.startswith("core id"):
                    core = line.split(":")[1].strip()
                elif not line.strip():
                    if phys is not None and core is not None:
                        pairs.add((phys, core))
                    phys, core = None, None
        if phys is not None and core is not None:
            pairs.add((phys, core))
        if pairs:
            return len(pairs)
    except OSError:
        pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ParallelConfig:
    """Worker count and the static chunking it induces."""

    workers: int = field(default_factory=lambda: os.cpu_count() or 1)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError(f"worker count must be >= 1, got {self.workers}")

    def chunks(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """(starts, ends) of `workers` contiguous ranges partitioning 0..m.

        Chunk sizes differ by at most one; when workers > m some chunks
        are empty.
        """
        bounds = np.linspace(0, m, self.workers + 1).astype(np.int64)
        return bounds[:-1], bounds[1:]


def match_interval_tree_parallel(
    subs: Sequence[Interval1D],
    upds: Sequence[Interval1D],
    config: ParallelConfig | None = None,
) -> IntersectionMatrix:
    """Interval-tree matching with the query loop spread over p workers.

    The tree is built once, sequentially; only the queries fan out.
    """
    config = config or ParallelConfig()
    u_low, u_high = _bounds(upds)
    tree = IntervalTree.build(subs)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    if tree.size == 0 or m == 0:
        return matrix
    if config.workers == 1:
        k.itm_query_range(*tree._arrays(), tree._root, u_low, u_high, 0, m, matrix.words)
        return matrix
    starts, ends = config.chunks(m)
    if k.HAVE_NUMBA:
        previous = k.get_num_threads()
        k.set_num_threads(min(config.workers, previous))
        try:
            k.itm_query_chunks(*tree._arrays(), tree._root, u_low, u_high, starts, ends, matrix.words)
        finally:
            k.set_num_threads(previous)
    else:  # pragma: no cover - plain-Python fallback
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(
                    k.itm_query_range, *tree._arrays(), tree._root, u_low, u_high, j0, j1, matrix.words
                )
                for j0, j1 in zip(starts, ends)
            ]
            for fut in futures:
                fut.result()
    return matrix


def _bf_columns(s_low, s_high, u_low, u_high, j0: int, j1: int, columns: np.ndarray) -> None:
    n_bytes = (s_low.shape[0] + 7) // 8
    for j in range(j0, j1):
        hits = (s_low < u_high[j]) & (u_low[j] < s_high)
        columns[j, :n_bytes] = np.packbits(hits, bitorder="little")


def match_brute_force_parallel(
    subs: Sequence[Interval1D],
    upds: Sequence[Interval1D],
    config: ParallelConfig | None = None,
) -> IntersectionMatrix:
    """Brute force with columns partitioned across worker threads.

    Every iteration is independent, so each worker just evaluates the
    predicate for its own column range (numpy releases the GIL inside
    the comparisons).
    """
    config = config or ParallelConfig()
    s_low, s_high = _bounds(subs)
    u_low, u_high = _bounds(upds)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    if m == 0:
        return matrix
    columns = matrix.byte_columns
    if config.workers == 1:
        _bf_columns(s_low, s_high, u_low, u_high, 0, m, columns)
        return matrix
    starts, ends = config.chunks(m)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = [
            pool.submit(_bf_columns, s_low, s_high, u_low, u_high, int(j0), int(j1), columns)
            for j0, j1 in zip(starts, ends)
        ]
        for fut in futures:
            fut.result()
    return matrix
