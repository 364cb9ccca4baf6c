"""Compiled kernels. Imported only when numba is available and not disabled."""

import numba as nb
import numpy as np

GREEDY = 0
ITERATIVE = 1


@nb.njit(cache=True)
def choose_dimension(g, mode, prefs, start, depth):
    k = g.shape[0]
    if mode == GREEDY:
        best = -1
        for j in range(k):
            d = prefs[j]
            if g[d] > 1 and (best < 0 or g[d] > g[best]):
                best = d
        return best
    for j in range(k):
        d = (start + depth + j) % k
        if g[d] > 1:
            return d
    return -1


@nb.njit(cache=True)
def _insertion_sort(idx, key, lo, hi):
    for i in range(lo + 1, hi):
        v = idx[i]
        kv = key[v]
        j = i - 1
        while j >= lo and key[idx[j]] > kv:
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = v


@nb.njit(cache=True)
def _partition(idx, key, lo, hi, pivot_pos):
    # Lomuto around idx[pivot_pos]; returns final pivot position. Keys are unique.
    idx[pivot_pos], idx[hi - 1] = idx[hi - 1], idx[pivot_pos]
    pk = key[idx[hi - 1]]
    store = lo
    for i in range(lo, hi - 1):
        if key[idx[i]] < pk:
            idx[store], idx[i] = idx[i], idx[store]
            store += 1
    idx[store], idx[hi - 1] = idx[hi - 1], idx[store]
    return store


@nb.njit(cache=True)
def _median_of_three(idx, key, lo, hi):
    mid = lo + (hi - lo) // 2
    a, b, c = key[idx[lo]], key[idx[mid]], key[idx[hi - 1]]
    if (a <= b <= c) or (c <= b <= a):
        return mid
    if (b <= a <= c) or (c <= a <= b):
        return lo
    return hi - 1


@nb.njit(cache=True)
def _mom_select(idx, key, lo, hi, target):
    """Deterministic linear-time selection (median of medians of five)."""
    while hi - lo > 5:
        # group medians to the front of [lo, hi)
        write = lo
        for s in range(lo, hi, 5):
            e = min(s + 5, hi)
            _insertion_sort(idx, key, s, e)
            m = s + (e - s - 1) // 2
            idx[write], idx[m] = idx[m], idx[write]
            write += 1
        mid = lo + (write - lo - 1) // 2
        _mom_select(idx, key, lo, write, mid)
        p = _partition(idx, key, lo, hi, mid)
        if p == target:
            return
        if target < p:
            hi = p
        else:
            lo = p + 1
    _insertion_sort(idx, key, lo, hi)


@nb.njit(cache=True)
def _select(idx, key, lo, hi, target):
    """Reorder idx[lo:hi] so idx[target] holds the element of that rank,
    smaller keys before it and larger after (introselect)."""
    budget = 2 * (int(np.log2(max(hi - lo, 2))) + 1)
    while hi - lo > 16:
        if budget == 0:
            _mom_select(idx, key, lo, hi, target)
            return
        budget -= 1
        p = _partition(idx, key, lo, hi, _median_of_three(idx, key, lo, hi))
        if p == target:
            return
        if target < p:
            hi = p
        else:
            lo = p + 1
    _insertion_sort(idx, key, lo, hi)


@nb.njit(cache=True)
def split_diffuse(ranks, extents, mode, prefs, start):
    """Place points given per-dimension ranks of shape (k, n).

    Returns an (n, k) int64 array of cells.
    """
    k, n = ranks.shape
    idx = np.arange(n)
    cells = np.empty((n, k), dtype=np.int64)
    width = 3 + 2 * k
    stack = np.empty((n + 1, width), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    for d in range(k):
        stack[0, 3 + d] = extents[d]
        stack[0, 3 + k + d] = 0
    top = 1
    g = np.empty(k, dtype=np.int64)
    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        depth = stack[top, 2]
        if hi - lo == 1:
            for d in range(k):
                cells[idx[lo], d] = stack[top, 3 + k + d]
            continue
        for d in range(k):
            g[d] = stack[top, 3 + d]
        a = choose_dimension(g, mode, prefs, start, depth)
        wl = g[a] // 2
        m = wl * ((hi - lo) // g[a])
        _select(idx, ranks[a], lo, hi, lo + m - 1)
        # right child first so the left one is popped next
        for r in range(width):
            stack[top + 1, r] = stack[top, r]
        stack[top + 1, 0] = lo + m
        stack[top + 1, 2] = depth + 1
        stack[top + 1, 3 + a] = g[a] - wl
        stack[top + 1, 3 + k + a] += wl
        stack[top, 1] = lo + m
        stack[top, 2] = depth + 1
        stack[top, 3 + a] = wl
        top += 2
    return cells


@nb.njit(cache=True)
def pair_violations(coords, cells):
    """Exhaustive per-dimension counts of type-I and type-II violations."""
    n, k = coords.shape
    v1 = np.zeros(k, dtype=np.int64)
    v2 = np.zeros(k, dtype=np.int64)
    for l in range(k):
        c1 = 0
        c2 = 0
        for i in range(n):
            pi = coords[i, l]
            si = cells[i, l]
            for j in range(i + 1, n):
                pj = coords[j, l]
                sj = cells[j, l]
                dp = (pj > pi) - (pj < pi)
                ds = (sj > si) - (sj < si)
                c1 += dp != ds
                c2 += dp * ds < 0
        v1[l] = c1
        v2[l] = c2
    return v1, v2
