# The augmented AVL interval tree: inserts, deletes, pruned overlap
# queries, and the structural validator.

import numpy as np

from ddmatch import Interval1D, IntervalTree

rng = np.random.default_rng(7)

# Build a small tree and look at its shape. Each node stores the max
# upper bound and min lower bound of its subtree; queries use them to
# skip whole subtrees.
tree = IntervalTree.build(
    [Interval1D(float(lo), float(lo + rng.uniform(1, 8)), i + 1) for i, lo in enumerate(rng.uniform(0, 60, 7))]
)
print(f"{len(tree)} intervals, height {tree.height}")
print(tree.dump())

# Overlap query: the sink fires once per stored interval strictly
# intersecting the query, in (low, high, id) order.
hits = []
visits = tree.query(Interval1D(10, 30, 1), hits.append)
print(f"\nquery [10,30] -> {len(hits)} hits, {visits} of {len(tree)} nodes examined")
for iv in hits:
    print(f"  [{iv.low:.2f}, {iv.high:.2f}] id={iv.id}")

# A query beyond every stored upper bound is rejected at the root.
visits = tree.query(Interval1D(1000, 1001, 1), lambda _: None)
print(f"query far right -> {visits} node examined")

# The tree is fully dynamic: delete and insert keep it balanced and keep
# the subtree aggregates exact. validate() recomputes everything from
# scratch and reports the first violation, if any.
tree.delete(hits[0])
tree.insert(Interval1D(5.0, 45.0, 99))
ok, msg = tree.validate()
print(f"\nafter delete+insert: size={len(tree)} validate -> {ok} ({msg})")

# Stress: a thousand random operations, validating as we go.
live = []
next_id = 100
for step in range(1000):
    if live and rng.random() < 0.5:
        tree.delete(live.pop(int(rng.integers(len(live)))))
    else:
        lo = float(rng.uniform(0, 500))
        iv = Interval1D(lo, lo + float(rng.uniform(0.1, 50)), next_id)
        next_id += 1
        tree.insert(iv)
        live.append(iv)
ok, msg = tree.validate()
print(f"after 1000 random ops: size={len(tree)} height={tree.height} validate -> {ok}")
