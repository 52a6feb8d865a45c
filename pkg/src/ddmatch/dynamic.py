"""Incremental matrix maintenance while extents move or resize.

Two interval trees are kept, one over the subscriptions and one over
the updates. Moving an update extent invalidates exactly one matrix
column: the old interval is swapped in its tree and the column is
recomputed with a single query against the subscription tree. Moving a
subscription is the symmetric row operation against the update tree.
The matrix therefore always equals a from-scratch brute-force match of
the current extents, at O(log n + k) tree work plus one row/column
rewrite per move.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _kernels as k
from .core import Interval1D, Kind
from .interval_tree import IntervalTree
from .matchers import _bounds, match_interval_tree


class DynamicMatcher:
    """Matching state that stays consistent under single-extent moves."""

    def __init__(self, subs: Sequence[Interval1D], upds: Sequence[Interval1D]):
        _bounds(subs), _bounds(upds)  # id/position validation
        self.subs = list(subs)
        self.upds = list(upds)
        self.sub_tree = IntervalTree.build(self.subs)
        self.upd_tree = IntervalTree.build(self.upds)
        self.matrix = match_interval_tree(self.subs, self.upds)

    @property
    def n(self) -> int:
        return len(self.subs)

    @property
    def m(self) -> int:
        return len(self.upds)

    def move_update(self, j: int, new_low: float, new_high: float) -> None:
        """Replace update extent j and recompute its matrix column."""
        if not 1 <= j <= self.m:
            raise IndexError(f"update index {j} out of range 1..{self.m}")
        old = self.upds[j - 1]
        new = Interval1D(new_low, new_high, j, Kind.UPDATE)
        self.upd_tree.delete(old)
        self.upd_tree.insert(new)
        self.upds[j - 1] = new
        col = self.matrix.words[j - 1]
        col[:] = 0
        if self.sub_tree.size:
            t = self.sub_tree
            k.tree_query_column(*t._arrays(), t._root, new.low, new.high, col)

    def move_subscription(self, i: int, new_low: float, new_high: float) -> None:
        """Replace subscription extent i and recompute its matrix row."""
        if not 1 <= i <= self.n:
            raise IndexError(f"subscription index {i} out of range 1..{self.n}")
        old = self.subs[i - 1]
        new = Interval1D(new_low, new_high, i, Kind.SUBSCRIPTION)
        self.sub_tree.delete(old)
        self.sub_tree.insert(new)
        self.subs[i - 1] = new
        word_i = (i - 1) >> 6
        mask = np.uint64(1 << ((i - 1) & 63))
        self.matrix.words[:, word_i] &= ~mask
        for j in self.upd_tree.query_ids(new):
            self.matrix.words[j - 1, word_i] |= mask
