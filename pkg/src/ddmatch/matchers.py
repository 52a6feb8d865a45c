"""The four 1-D matching algorithms, plus a binary-search counting oracle.

All matchers consume two interval lists (subscriptions, updates) whose
ids must equal their 1-based positions, and return a fresh
IntersectionMatrix. They agree bit for bit: the sort-based, grid-based
and tree-based algorithms are exact, not approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels as k
from .core import IntersectionMatrix, Interval1D
from .interval_tree import IntervalTree


def _bounds(intervals: Sequence[Interval1D]) -> tuple[np.ndarray, np.ndarray]:
    """Extract (lows, highs) arrays, checking ids are 1..n in order."""
    lows = np.empty(len(intervals))
    highs = np.empty(len(intervals))
    for pos, iv in enumerate(intervals):
        if iv.id != pos + 1:
            raise ValueError(f"interval at position {pos} has id {iv.id}, expected {pos + 1}")
        lows[pos] = iv.low
        highs[pos] = iv.high
    return lows, highs


def match_brute_force(subs: Sequence[Interval1D], upds: Sequence[Interval1D]) -> IntersectionMatrix:
    """Test all n*m pairs directly; the reference the other matchers must equal."""
    s_low, s_high = _bounds(subs)
    u_low, u_high = _bounds(upds)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    columns = matrix.byte_columns
    n_bytes = (n + 7) // 8
    for j in range(m):
        hits = (s_low < u_high[j]) & (u_low[j] < s_high)
        columns[j, :n_bytes] = np.packbits(hits, bitorder="little")
    return matrix


def _sorted_event_codes(s_low, s_high, u_low, u_high) -> np.ndarray:
    """Endpoint events sorted in nondecreasing coordinate order.

    At equal coordinates upper endpoints come first (so touching extents
    never co-occur in the active sets), then subscriptions before
    updates, then id. Code layout: (index0 << 2) | (is_sub << 1) | is_lower.
    """
    n, m = s_low.shape[0], u_low.shape[0]
    coords = np.concatenate([s_low, s_high, u_low, u_high])
    sub_ids = np.arange(n, dtype=np.int64)
    upd_ids = np.arange(m, dtype=np.int64)
    codes = np.concatenate(
        [
            (sub_ids << 2) | 3,  # subscription lower
            (sub_ids << 2) | 2,  # subscription upper
            (upd_ids << 2) | 1,  # update lower
            (upd_ids << 2) | 0,  # update upper
        ]
    )
    is_lower = codes & 1
    is_upd = (codes & 2) ^ 2
    ids = codes >> 2
    order = np.lexsort((ids, is_upd, is_lower, coords))
    return codes[order]


def match_sort_based(subs: Sequence[Interval1D], upds: Sequence[Interval1D]) -> IntersectionMatrix:
    """Sort the 2(n+m) endpoints, then sweep once.

    Two bitmaps track the currently open subscriptions and updates; when
    an extent closes, the opposite bitmap is OR-ed into its row or
    column of the matrix.
    """
    s_low, s_high = _bounds(subs)
    u_low, u_high = _bounds(upds)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    if n and m:
        codes = _sorted_event_codes(s_low, s_high, u_low, u_high)
        k.sbm_scan(codes, n, m, matrix.words)
    return matrix


@dataclass(frozen=True)
class GridConfig:
    """Uniform partition of the routing-space interval [lo, hi) into `cells` cells."""

    cells: int
    span: tuple[float, float]

    def __post_init__(self) -> None:
        if self.cells < 1:
            raise ValueError(f"cell count must be >= 1, got {self.cells}")
        if not self.span[0] < self.span[1]:
            raise ValueError(f"span must satisfy lo < hi, got {self.span}")


def _cell_range(lows: np.ndarray, highs: np.ndarray, cfg: GridConfig) -> tuple[np.ndarray, np.ndarray]:
    """First and last grid cell each interval overlaps.

    Float division can land one cell off near boundaries; the correction
    steps only ever widen toward the true range, and any extra cell is
    harmless because the per-cell refinement re-tests every pair.
    """
    lo, hi = cfg.span
    if lows.size and (lows.min() < lo or highs.max() > hi):
        raise ValueError(f"extent outside the grid span [{lo}, {hi})")
    width = (hi - lo) / cfg.cells
    first = np.floor((lows - lo) / width).astype(np.int64)
    last = np.floor((highs - lo) / width).astype(np.int64)
    np.clip(first, 0, cfg.cells - 1, out=first)
    np.clip(last, 0, cfg.cells - 1, out=last)
    fix = (first > 0) & (lo + first * width > lows)
    first[fix] -= 1
    fix = (last < cfg.cells - 1) & (lo + (last + 1) * width < highs)
    last[fix] += 1
    return first, last


def _cell_buckets(first: np.ndarray, last: np.ndarray, cells: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR-style (start offsets, member indices) of extents per cell."""
    counts = last - first + 1
    total = int(counts.sum())
    members = np.repeat(np.arange(first.shape[0], dtype=np.int64), counts)
    offsets = np.concatenate([[0], np.cumsum(counts)])[:-1]
    cell_of = first.repeat(counts) + (np.arange(total, dtype=np.int64) - offsets.repeat(counts))
    order = np.argsort(cell_of, kind="stable")
    starts = np.zeros(cells + 1, dtype=np.int64)
    np.cumsum(np.bincount(cell_of, minlength=cells), out=starts[1:])
    return starts, members[order]


def match_grid(
    subs: Sequence[Interval1D], upds: Sequence[Interval1D], grid: GridConfig
) -> IntersectionMatrix:
    """Map extents to the grid cells they overlap, then brute-force each cell.

    The per-cell re-test means the grid never reports spurious overlaps;
    pairs sharing several cells are absorbed by the idempotent bit OR.
    With one cell this degenerates to plain brute force.
    """
    s_low, s_high = _bounds(subs)
    u_low, u_high = _bounds(upds)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    if n and m:
        s_first, s_last = _cell_range(s_low, s_high, grid)
        u_first, u_last = _cell_range(u_low, u_high, grid)
        sub_start, sub_members = _cell_buckets(s_first, s_last, grid.cells)
        upd_start, upd_members = _cell_buckets(u_first, u_last, grid.cells)
        k.grid_cell_match(
            s_low, s_high, u_low, u_high, sub_start, sub_members, upd_start, upd_members, matrix.words
        )
    return matrix


def match_interval_tree(subs: Sequence[Interval1D], upds: Sequence[Interval1D]) -> IntersectionMatrix:
    """Build an interval tree over the subscriptions, then query it per update.

    Each query writes its own matrix column, which is what makes the
    query loop embarrassingly parallel (see ddmatch.parallel).
    """
    u_low, u_high = _bounds(upds)
    tree = IntervalTree.build(subs)
    n, m = len(subs), len(upds)
    matrix = IntersectionMatrix(n, m)
    if tree.size and m:
        k.itm_query_range(*tree._arrays(), tree._root, u_low, u_high, 0, m, matrix.words)
    return matrix


class BinarySearchCounter:
    """Count (not enumerate) intersections against a fixed interval set.

    Preprocessing sorts the start and end points once; each count is two
    binary searches: |B| minus the intervals ending at or before q.low
    minus those starting at or after q.high. Used as an independent
    check on matrix column populations.
    """

    def __init__(self, intervals: Sequence[Interval1D]):
        lows = np.fromiter((iv.low for iv in intervals), dtype=np.float64, count=len(intervals))
        highs = np.fromiter((iv.high for iv in intervals), dtype=np.float64, count=len(intervals))
        self.starts = np.sort(lows)
        self.ends = np.sort(highs)

    def __len__(self) -> int:
        return self.starts.shape[0]

    def count(self, q: Interval1D) -> int:
        return int(self.count_many(np.array([q.low]), np.array([q.high]))[0])

    def count_many(self, q_lows: np.ndarray, q_highs: np.ndarray) -> np.ndarray:
        """Vectorized count for many query intervals at once."""
        size = self.starts.shape[0]
        end_before = np.searchsorted(self.ends, q_lows, side="right")
        start_after = size - np.searchsorted(self.starts, q_highs, side="left")
        return size - end_before - start_after
