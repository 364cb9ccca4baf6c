"""Pure-numpy kernels; same contracts as the compiled ones."""

import numpy as np

GREEDY = 0
ITERATIVE = 1


def choose_dimension(g, mode, prefs, start, depth):
    k = len(g)
    if mode == GREEDY:
        best = -1
        for d in prefs:
            if g[d] > 1 and (best < 0 or g[d] > g[best]):
                best = d
        return best
    for j in range(k):
        d = (start + depth + j) % k
        if g[d] > 1:
            return d
    return -1


def split_diffuse(ranks, extents, mode, prefs, start):
    k, n = ranks.shape
    cells = np.empty((n, k), dtype=np.int64)
    prefs = [int(p) for p in prefs]
    stack = [(np.arange(n), tuple(int(e) for e in extents), (0,) * k, 0)]
    while stack:
        members, g, c, depth = stack.pop()
        if len(members) == 1:
            cells[members[0]] = c
            continue
        a = choose_dimension(g, mode, prefs, start, depth)
        wl = g[a] // 2
        m = wl * (len(members) // g[a])
        # ranks are unique per dimension, so the partition is exact
        part = members[np.argpartition(ranks[a, members], m - 1)]
        gl = g[:a] + (wl,) + g[a + 1:]
        gr = g[:a] + (g[a] - wl,) + g[a + 1:]
        cr = c[:a] + (c[a] + wl,) + c[a + 1:]
        stack.append((part[m:], gr, cr, depth + 1))
        stack.append((part[:m], gl, c, depth + 1))
    return cells


def pair_violations(coords, cells, block=256):
    n, k = coords.shape
    v1 = np.zeros(k, dtype=np.int64)
    v2 = np.zeros(k, dtype=np.int64)
    cells = np.asarray(cells, dtype=np.int64)
    for l in range(k):
        p = coords[:, l]
        s = cells[:, l]
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            # upper triangle only: j > i
            dp = np.sign(p[None, :] - p[lo:hi, None]).astype(np.int8)
            ds = np.sign(s[None, :] - s[lo:hi, None]).astype(np.int8)
            upper = np.arange(n)[None, :] > np.arange(lo, hi)[:, None]
            v1[l] += np.count_nonzero((dp != ds) & upper)
            v2[l] += np.count_nonzero((dp * ds < 0) & upper)
    return v1, v2
