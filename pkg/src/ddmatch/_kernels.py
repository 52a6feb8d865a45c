"""Compiled kernels for the tree, scan and grid hot paths.

Everything here works on flat numpy arrays so numba can compile it; the
same code runs (much slower) as plain Python when numba is missing.
Interval trees are stored as parallel arrays indexed by node slot, with
-1 as the null link. Matrix columns are packed into little-endian uint64
words: bit i of a column lives at word i >> 6, mask 1 << (i & 63).
"""

from __future__ import annotations

import os

import numpy as np

try:
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # workqueue is always available and fork-safe; avoids TBB probing noise
        from numba import config as _numba_config

        _numba_config.THREADING_LAYER = "workqueue"
    from numba import get_num_threads, njit, prange, set_num_threads

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda func: func

    def get_num_threads() -> int:
        return 1

    def set_num_threads(n: int) -> None:
        return None


NIL = -1


@njit(cache=True)
def _refresh(low, high, left, right, height, maxupper, minlower, x):
    # recompute height/maxupper/minlower of x from its children
    h = np.int64(1)
    mu = high[x]
    ml = low[x]
    l = left[x]
    if l != NIL:
        if height[l] + 1 > h:
            h = height[l] + 1
        if maxupper[l] > mu:
            mu = maxupper[l]
        if minlower[l] < ml:
            ml = minlower[l]
    r = right[x]
    if r != NIL:
        if height[r] + 1 > h:
            h = height[r] + 1
        if maxupper[r] > mu:
            mu = maxupper[r]
        if minlower[r] < ml:
            ml = minlower[r]
    height[x] = h
    maxupper[x] = mu
    minlower[x] = ml


@njit(cache=True)
def _h(height, x):
    return height[x] if x != NIL else np.int64(0)


@njit(cache=True)
def _rotate_left(low, high, left, right, height, maxupper, minlower, x):
    y = right[x]
    right[x] = left[y]
    left[y] = x
    _refresh(low, high, left, right, height, maxupper, minlower, x)
    _refresh(low, high, left, right, height, maxupper, minlower, y)
    return y


@njit(cache=True)
def _rotate_right(low, high, left, right, height, maxupper, minlower, x):
    y = left[x]
    left[x] = right[y]
    right[y] = x
    _refresh(low, high, left, right, height, maxupper, minlower, x)
    _refresh(low, high, left, right, height, maxupper, minlower, y)
    return y


@njit(cache=True)
def _rebalance(low, high, left, right, height, maxupper, minlower, x):
    # restore the AVL balance at x, returning the new subtree root;
    # the double-rotation test uses < so it is valid for deletions too
    bal = _h(height, left[x]) - _h(height, right[x])
    if bal > 1:
        l = left[x]
        if _h(height, left[l]) < _h(height, right[l]):
            left[x] = _rotate_left(low, high, left, right, height, maxupper, minlower, l)
        return _rotate_right(low, high, left, right, height, maxupper, minlower, x)
    if bal < -1:
        r = right[x]
        if _h(height, right[r]) < _h(height, left[r]):
            right[x] = _rotate_right(low, high, left, right, height, maxupper, minlower, r)
        return _rotate_left(low, high, left, right, height, maxupper, minlower, x)
    return x


@njit(cache=True)
def _key_less(low, high, iid, a_low, a_high, a_id, x):
    if a_low != low[x]:
        return a_low < low[x]
    if a_high != high[x]:
        return a_high < high[x]
    return a_id < iid[x]


@njit(cache=True)
def tree_insert(low, high, iid, left, right, height, maxupper, minlower, root, node):
    """Insert prepared slot `node` under `root`; returns the new root."""
    if root == NIL:
        return node
    path = np.empty(96, dtype=np.int64)
    depth = 0
    x = root
    a_low, a_high, a_id = low[node], high[node], iid[node]
    while True:
        path[depth] = x
        depth += 1
        if _key_less(low, high, iid, a_low, a_high, a_id, x):
            nxt = left[x]
            if nxt == NIL:
                left[x] = node
                break
        else:
            nxt = right[x]
            if nxt == NIL:
                right[x] = node
                break
        x = nxt
    for i in range(depth - 1, -1, -1):
        x = path[i]
        old_h = height[x]
        old_mu = maxupper[x]
        old_ml = minlower[x]
        _refresh(low, high, left, right, height, maxupper, minlower, x)
        sub = _rebalance(low, high, left, right, height, maxupper, minlower, x)
        if sub != x:
            if i > 0:
                p = path[i - 1]
                if left[p] == x:
                    left[p] = sub
                else:
                    right[p] = sub
            else:
                root = sub
            continue
        if height[x] == old_h and maxupper[x] == old_mu and minlower[x] == old_ml:
            break
    return root


@njit(cache=True)
def tree_build(low, high, iid, left, right, height, maxupper, minlower, count):
    """Insert slots 0..count-1 in order; returns the root."""
    root = NIL
    for node in range(count):
        root = tree_insert(low, high, iid, left, right, height, maxupper, minlower, root, node)
    return root


@njit(cache=True)
def tree_delete(low, high, iid, kind, left, right, height, maxupper, minlower, root, d_low, d_high, d_id):
    """Remove the node whose full key is (d_low, d_high, d_id).

    Returns (new_root, freed_slot); freed_slot is -2 when no node matches.
    """
    path = np.empty(96, dtype=np.int64)
    depth = 0
    x = root
    while x != NIL:
        if d_low == low[x] and d_high == high[x] and d_id == iid[x]:
            break
        path[depth] = x
        depth += 1
        if _key_less(low, high, iid, d_low, d_high, d_id, x):
            x = left[x]
        else:
            x = right[x]
    if x == NIL:
        return root, np.int64(-2)
    if left[x] != NIL and right[x] != NIL:
        # two children: replace payload with the in-order successor's,
        # then splice the successor node out instead
        path[depth] = x
        depth += 1
        s = right[x]
        while left[s] != NIL:
            path[depth] = s
            depth += 1
            s = left[s]
        low[x] = low[s]
        high[x] = high[s]
        iid[x] = iid[s]
        kind[x] = kind[s]
        x = s
    child = left[x] if left[x] != NIL else right[x]
    if depth == 0:
        root = child
    else:
        p = path[depth - 1]
        if left[p] == x:
            left[p] = child
        else:
            right[p] = child
    freed = x
    for i in range(depth - 1, -1, -1):
        x = path[i]
        old_h = height[x]
        old_mu = maxupper[x]
        old_ml = minlower[x]
        _refresh(low, high, left, right, height, maxupper, minlower, x)
        sub = _rebalance(low, high, left, right, height, maxupper, minlower, x)
        if sub != x:
            if i > 0:
                p = path[i - 1]
                if left[p] == x:
                    left[p] = sub
                else:
                    right[p] = sub
            else:
                root = sub
            continue
        if height[x] == old_h and maxupper[x] == old_mu and minlower[x] == old_ml:
            break
    return root, freed


@njit(cache=True)
def tree_query_column(low, high, iid, left, right, maxupper, minlower, root, q_low, q_high, col):
    """Set column bit id-1 for every stored interval strictly intersecting the query.

    In-order traversal; a subtree is pruned when its maxupper < q_low or
    its minlower > q_high, and the right child is entered only when
    q_high > node.low. Returns the number of nodes examined.
    """
    visits = np.int64(0)
    stack = np.empty(96, dtype=np.int64)
    top = 0
    x = root
    while True:
        while x != NIL:
            visits += 1
            if maxupper[x] < q_low or minlower[x] > q_high:
                x = NIL
                break
            stack[top] = x
            top += 1
            x = left[x]
        if top == 0:
            break
        top -= 1
        x = stack[top]
        if q_low < high[x] and low[x] < q_high:
            i = iid[x] - 1
            col[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
        x = right[x] if q_high > low[x] else NIL
    return visits


@njit(cache=True)
def tree_query_collect(low, high, iid, left, right, maxupper, minlower, root, q_low, q_high, out):
    """Like tree_query_column but collects matching slots in-order into `out`.

    Returns (match_count, visits).
    """
    visits = np.int64(0)
    count = 0
    stack = np.empty(96, dtype=np.int64)
    top = 0
    x = root
    while True:
        while x != NIL:
            visits += 1
            if maxupper[x] < q_low or minlower[x] > q_high:
                x = NIL
                break
            stack[top] = x
            top += 1
            x = left[x]
        if top == 0:
            break
        top -= 1
        x = stack[top]
        if q_low < high[x] and low[x] < q_high:
            out[count] = x
            count += 1
        x = right[x] if q_high > low[x] else NIL
    return count, visits


@njit(cache=True)
def itm_query_range(low, high, iid, left, right, maxupper, minlower, root, u_low, u_high, j0, j1, words):
    """Run one tree query per update extent j in [j0, j1), writing column j."""
    visits = np.int64(0)
    for j in range(j0, j1):
        visits += tree_query_column(
            low, high, iid, left, right, maxupper, minlower, root, u_low[j], u_high[j], words[j]
        )
    return visits


@njit(cache=True, parallel=True)
def itm_query_chunks(low, high, iid, left, right, maxupper, minlower, root, u_low, u_high, starts, ends, words):
    """Fork-join over static contiguous chunks; chunk w writes only its own columns."""
    for w in prange(starts.shape[0]):
        itm_query_range(
            low, high, iid, left, right, maxupper, minlower, root, u_low, u_high, starts[w], ends[w], words
        )


@njit(cache=True)
def sbm_scan(codes, n, m, words):
    """Scan sorted endpoint events, maintaining bitmap active sets.

    Event code layout: (index0 << 2) | (is_subscription << 1) | is_lower.
    Closing a subscription ORs the active-update bitmap into its row;
    closing an update ORs the active-subscription bitmap into its column.
    Every extent enters and leaves its set exactly once, so exact active
    counts let the bitmap sweeps cover only the live word range.
    """
    one = np.uint64(1)
    n_words = (n + 63) >> 6
    m_words = (m + 63) >> 6
    subs = np.zeros(n_words, dtype=np.uint64)
    upds = np.zeros(m_words, dtype=np.uint64)
    s_count = 0
    s_lo, s_hi = 0, -1  # live word range of subs; empty when s_count == 0
    u_count = 0
    u_lo, u_hi = 0, -1
    for e in range(codes.shape[0]):
        code = codes[e]
        idx = code >> 2
        w = idx >> 6
        mask = one << np.uint64(idx & 63)
        if code & 2:  # subscription endpoint
            if code & 1:
                subs[w] |= mask
                if s_count == 0:
                    s_lo = w
                    s_hi = w
                else:
                    if w < s_lo:
                        s_lo = w
                    if w > s_hi:
                        s_hi = w
                s_count += 1
            else:
                subs[w] &= ~mask
                s_count -= 1
                # every active update overlaps subscription idx: OR into row idx
                if u_count > 0:
                    for jw in range(u_lo, u_hi + 1):
                        b = upds[jw]
                        if b:
                            bit = jw << 6
                            while b:
                                if b & one:
                                    words[bit, w] |= mask
                                b >>= one
                                bit += 1
        else:  # update endpoint
            if code & 1:
                upds[w] |= mask
                if u_count == 0:
                    u_lo = w
                    u_hi = w
                else:
                    if w < u_lo:
                        u_lo = w
                    if w > u_hi:
                        u_hi = w
                u_count += 1
            else:
                upds[w] &= ~mask
                u_count -= 1
                # every active subscription overlaps update idx: OR into column idx
                if s_count > 0:
                    row = words[idx]
                    for iw in range(s_lo, s_hi + 1):
                        row[iw] |= subs[iw]


@njit(cache=True)
def grid_cell_match(
    s_low, s_high, u_low, u_high, sub_start, sub_members, upd_start, upd_members, words
):
    """Brute-force refinement inside each grid cell.

    Cell c holds subscriptions sub_members[sub_start[c]:sub_start[c+1]]
    and updates likewise; pairs co-located in several cells are absorbed
    by the idempotent bit OR.
    """
    cells = sub_start.shape[0] - 1
    for c in range(cells):
        u0, u1 = upd_start[c], upd_start[c + 1]
        s0, s1 = sub_start[c], sub_start[c + 1]
        if u0 == u1 or s0 == s1:
            continue
        for uk in range(u0, u1):
            j = upd_members[uk]
            lo = u_low[j]
            hi = u_high[j]
            row = words[j]
            for sk in range(s0, s1):
                i = sub_members[sk]
                if s_low[i] < hi and lo < s_high[i]:
                    row[i >> 6] |= np.uint64(1) << np.uint64(i & 63)
