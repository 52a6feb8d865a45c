"""Augmented AVL interval tree: insert, delete, and overlap enumeration.

Nodes are ordered by (low, high, id) so every stored interval has a
unique position and deletion is unambiguous. Each node carries two
aggregates over its subtree, the maximum upper bound and minimum lower
bound, which the query uses to prune whole subtrees. Insertions and
deletions rebalance with the usual AVL rotations and push refreshed
aggregates up the access path, through rotated nodes included.

Nodes live in parallel arrays (slot index = node handle, -1 = no child)
so the hot paths can run as compiled kernels; `NodeView` exposes the
conventional node/left/right object view on top.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from . import _kernels as k
from .core import Interval1D, Kind

_KINDS = (Kind.SUBSCRIPTION, Kind.UPDATE)


class NodeView:
    """Read-only view of one tree node."""

    __slots__ = ("_tree", "_slot")

    def __init__(self, tree: "IntervalTree", slot: int):
        self._tree = tree
        self._slot = slot

    @property
    def interval(self) -> Interval1D:
        return self._tree._interval_at(self._slot)

    @property
    def left(self) -> "NodeView | None":
        slot = self._tree._left[self._slot]
        return NodeView(self._tree, int(slot)) if slot != k.NIL else None

    @property
    def right(self) -> "NodeView | None":
        slot = self._tree._right[self._slot]
        return NodeView(self._tree, int(slot)) if slot != k.NIL else None

    @property
    def height(self) -> int:
        return int(self._tree._height[self._slot])

    @property
    def max_upper(self) -> float:
        return float(self._tree._maxupper[self._slot])

    @property
    def min_lower(self) -> float:
        return float(self._tree._minlower[self._slot])


class IntervalTree:
    """Dynamic set of intervals with O(log n) insert/delete and pruned overlap queries."""

    def __init__(self, capacity: int = 16):
        capacity = max(capacity, 1)
        self._low = np.empty(capacity, dtype=np.float64)
        self._high = np.empty(capacity, dtype=np.float64)
        self._iid = np.empty(capacity, dtype=np.int64)
        self._kind = np.empty(capacity, dtype=np.int8)
        self._left = np.full(capacity, k.NIL, dtype=np.int64)
        self._right = np.full(capacity, k.NIL, dtype=np.int64)
        self._height = np.ones(capacity, dtype=np.int64)
        self._maxupper = np.empty(capacity, dtype=np.float64)
        self._minlower = np.empty(capacity, dtype=np.float64)
        self._root = k.NIL
        self._used = 0
        self._free: list[int] = []
        self.size = 0

    # -- slot management ------------------------------------------------

    def _grow(self) -> None:
        new_cap = max(16, 2 * self._low.shape[0])
        for name in ("_low", "_high", "_iid", "_kind", "_left", "_right", "_height", "_maxupper", "_minlower"):
            old = getattr(self, name)
            fresh = np.empty(new_cap, dtype=old.dtype)
            fresh[: old.shape[0]] = old
            setattr(self, name, fresh)

    def _alloc(self, iv: Interval1D) -> int:
        if self._free:
            slot = self._free.pop()
        else:
            if self._used == self._low.shape[0]:
                self._grow()
            slot = self._used
            self._used += 1
        self._low[slot] = iv.low
        self._high[slot] = iv.high
        self._iid[slot] = iv.id
        self._kind[slot] = _KINDS.index(iv.kind)
        self._left[slot] = k.NIL
        self._right[slot] = k.NIL
        self._height[slot] = 1
        self._maxupper[slot] = iv.high
        self._minlower[slot] = iv.low
        return slot

    def _interval_at(self, slot: int) -> Interval1D:
        return Interval1D(
            float(self._low[slot]), float(self._high[slot]), int(self._iid[slot]), _KINDS[self._kind[slot]]
        )

    def _arrays(self):
        return (self._low, self._high, self._iid, self._left, self._right, self._maxupper, self._minlower)

    # -- operations -----------------------------------------------------

    @classmethod
    def build(cls, intervals: Iterable[Interval1D]) -> "IntervalTree":
        """Create a tree by inserting the intervals in the given order."""
        items = list(intervals)
        count = len(items)
        tree = cls(capacity=max(count, 1))
        tree._low[:count] = np.fromiter((iv.low for iv in items), np.float64, count=count)
        tree._high[:count] = np.fromiter((iv.high for iv in items), np.float64, count=count)
        tree._iid[:count] = np.fromiter((iv.id for iv in items), np.int64, count=count)
        tree._kind[:count] = np.fromiter(
            (iv.kind is Kind.UPDATE for iv in items), np.bool_, count=count
        )
        tree._maxupper[:count] = tree._high[:count]
        tree._minlower[:count] = tree._low[:count]
        tree._used = count
        tree._root = int(
            k.tree_build(
                tree._low, tree._high, tree._iid, tree._left, tree._right,
                tree._height, tree._maxupper, tree._minlower, count,
            )
        )
        tree.size = count
        return tree

    def insert(self, iv: Interval1D) -> None:
        slot = self._alloc(iv)
        self._root = int(
            k.tree_insert(
                self._low, self._high, self._iid, self._left, self._right,
                self._height, self._maxupper, self._minlower, self._root, slot,
            )
        )
        self.size += 1

    def delete(self, iv: Interval1D) -> None:
        """Remove the stored interval matching iv's full key (low, high, id)."""
        root, freed = k.tree_delete(
            self._low, self._high, self._iid, self._kind, self._left, self._right,
            self._height, self._maxupper, self._minlower, self._root, iv.low, iv.high, iv.id,
        )
        if freed == -2:
            raise KeyError(f"interval [{iv.low}, {iv.high}] id={iv.id} is not in the tree")
        self._root = int(root)
        self._free.append(int(freed))
        self.size -= 1

    def query(self, q: Interval1D, sink: Callable[[Interval1D], None]) -> int:
        """Call sink once per stored interval strictly intersecting q, in key order.

        Returns the number of nodes examined (at most the tree size; a
        query falling outside the root's [minlower, maxupper] examines
        only the root).
        """
        if self._root == k.NIL:
            return 0
        out = np.empty(self.size, dtype=np.int64)
        count, visits = k.tree_query_collect(*self._arrays(), self._root, q.low, q.high, out)
        for slot in out[:count]:
            sink(self._interval_at(int(slot)))
        return int(visits)

    def query_ids(self, q: Interval1D) -> list[int]:
        """Ids of stored intervals intersecting q, in key order."""
        ids: list[int] = []
        self.query(q, lambda iv: ids.append(iv.id))
        return ids

    def __len__(self) -> int:
        return self.size

    @property
    def height(self) -> int:
        return int(self._height[self._root]) if self._root != k.NIL else 0

    @property
    def root(self) -> NodeView | None:
        return NodeView(self, self._root) if self._root != k.NIL else None

    # -- diagnostics ------------------------------------------------------

    def validate(self) -> tuple[bool, str]:
        """Recompute every structural invariant from scratch.

        Checks, per node: AVL balance factor in {-1, 0, 1}, stored height,
        strict (low, high, id) ordering between parent and children, and
        exact maxupper/minlower aggregates. Returns (ok, message) where
        the message names the first violating node.
        """
        seen = 0
        # iterative post-order: (slot, lower_bound_key, upper_bound_key)
        stack: list[tuple[int, tuple | None, tuple | None, bool]] = []
        results: dict[int, tuple[int, float, float]] = {}
        if self._root != k.NIL:
            stack.append((self._root, None, None, False))
        while stack:
            slot, lo_key, hi_key, expanded = stack.pop()
            key = (float(self._low[slot]), float(self._high[slot]), int(self._iid[slot]))
            if not expanded:
                # equal full keys go right on insert, so the lower bound is non-strict
                if lo_key is not None and not key >= lo_key:
                    return False, f"key order violated at node {key}: less than ancestor {lo_key}"
                if hi_key is not None and not key < hi_key:
                    return False, f"key order violated at node {key}: not less than {hi_key}"
                stack.append((slot, lo_key, hi_key, True))
                if self._left[slot] != k.NIL:
                    stack.append((int(self._left[slot]), lo_key, key, False))
                if self._right[slot] != k.NIL:
                    stack.append((int(self._right[slot]), key, hi_key, False))
                continue
            seen += 1
            lh, l_mu, l_ml = results.pop(int(self._left[slot]), (0, None, None))
            rh, r_mu, r_ml = results.pop(int(self._right[slot]), (0, None, None))
            if abs(lh - rh) > 1:
                return False, f"balance factor {lh - rh} at node {key}"
            h = max(lh, rh) + 1
            if h != int(self._height[slot]):
                return False, f"height mismatch at node {key}: stored {int(self._height[slot])}, actual {h}"
            mu = max(v for v in (key[1], l_mu, r_mu) if v is not None)
            ml = min(v for v in (key[0], l_ml, r_ml) if v is not None)
            if mu != float(self._maxupper[slot]):
                return False, f"maxupper mismatch at node {key}: stored {float(self._maxupper[slot])}, actual {mu}"
            if ml != float(self._minlower[slot]):
                return False, f"minlower mismatch at node {key}: stored {float(self._minlower[slot])}, actual {ml}"
            results[slot] = (h, mu, ml)
        if seen != self.size:
            return False, f"size mismatch: {seen} reachable nodes, size says {self.size}"
        return True, "ok"

    def dump(self) -> str:
        """Indented text rendering of the tree, for debugging."""
        lines: list[str] = []

        def walk(slot: int, depth: int) -> None:
            if slot == k.NIL:
                return
            walk(int(self._right[slot]), depth + 1)
            iv = self._interval_at(slot)
            lines.append(
                "  " * depth
                + f"[{iv.low}, {iv.high}] id={iv.id} maxupper={float(self._maxupper[slot])} "
                  f"minlower={float(self._minlower[slot])}"
            )
            walk(int(self._left[slot]), depth + 1)

        walk(self._root, 0)
        return "\n".join(lines)
