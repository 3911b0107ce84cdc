"""Compiled per-pair counting engines.

Each function takes the 1-based rank matrices rx (n×p) and ry (n×q) and
returns an integer count matrix (p×q, int64); the callers in
:mod:`rankindep.paircorr` turn counts into statistics with a single
division. Everything here is integer arithmetic, so results are exact
and independent of evaluation order, thread count, and BLAS build.

The counting formulas are derived identities, certified against the
brute-force oracle in the test suite — see tests/test_paircorr.py.
Shared geometry: for one column pair, let sigma be the joint permutation
(sigma[k] = y-rank of the sample whose x-rank is k+1, 0-based k) and
J[a][b] = #{samples with x-rank <= a and y-rank <= b} its cumulative
dominance grid.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _fill_joint(rx, ry, i, j, xinv, joint):
    n = rx.shape[0]
    for k in range(n):
        xinv[rx[k, i] - 1] = k
    for r in range(n):
        joint[r] = ry[xinv[r], j]


@njit(cache=True)
def _count_inversions(a, buf):
    """Bottom-up merge sort; returns the number of inversions. Mutates a."""
    n = a.size
    inv = 0
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[k] = a[i]
                    i += 1
                else:
                    buf[k] = a[j]
                    j += 1
                    inv += mid - i
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            lo += 2 * width
        for t in range(n):
            a[t] = buf[t]
        width *= 2
    return inv


@njit(cache=True)
def kendall_inversion_matrix(rx, ry):
    """Per-pair inversion counts of the joint permutation."""
    n, p = rx.shape
    q = ry.shape[1]
    out = np.empty((p, q), np.int64)
    xinv = np.empty(n, np.int64)
    joint = np.empty(n, np.int64)
    buf = np.empty(n, np.int64)
    for i in range(p):
        for k in range(n):
            xinv[rx[k, i] - 1] = k
        for j in range(q):
            for r in range(n):
                joint[r] = ry[xinv[r], j]
            out[i, j] = _count_inversions(joint, buf)
    return out


@njit(cache=True)
def _pivot_poly(a, u, v, big_k):
    """Sum of bracket products over ordered distinct 4-tuples around a pivot.

    Among the big_k non-pivot samples, a sit strictly below the pivot in
    both axes, u strictly below in x only as well (u counts all x-below),
    v likewise in y. Classifying each sample by its (below-x, below-y)
    flags gives counts n11=a, n10=u-a, n01=v-a, n00=big_k-u-v+a, and the
    inclusion-exclusion over index collisions collapses to this cubic.
    """
    n11 = a
    n10 = u - a
    n01 = v - a
    n00 = big_k - u - v + a
    prod_same = n11 * n00
    prod_cross = n10 * n01
    s_same = n11 + n00
    s_cross = n10 + n01
    d = prod_same - prod_cross
    return 4 * (d * d - prod_same * (s_same - 1) - prod_cross * (s_cross - 1))


@njit(cache=True)
def hoeffding_numer_matrix(rx, ry):
    """Per-pair numerators of the 5-point double-bracket statistic.

    Statistic value = numer / (16 * C(n, 5)). Uses a Fenwick tree to
    stream the strict-southwest counts c_k while scanning x-rank order.
    """
    n, p = rx.shape
    q = ry.shape[1]
    out = np.empty((p, q), np.int64)
    xinv = np.empty(n, np.int64)
    joint = np.empty(n, np.int64)
    tree = np.zeros(n + 1, np.int64)
    big_k = n - 1
    for i in range(p):
        for k in range(n):
            xinv[rx[k, i] - 1] = k
        for j in range(q):
            for r in range(n):
                joint[r] = ry[xinv[r], j]
            for t in range(n + 1):
                tree[t] = 0
            total = np.int64(0)
            for k in range(n):
                s = joint[k]
                a = np.int64(0)
                idx = s - 1
                while idx > 0:
                    a += tree[idx]
                    idx -= idx & (-idx)
                idx = s
                while idx <= n:
                    tree[idx] += 1
                    idx += idx & (-idx)
                total += _pivot_poly(a, k, s - 1, big_k)
            out[i, j] = total
    return out


@njit(cache=True)
def _fill_grid(joint, grid):
    """Cumulative dominance grid: grid[a][b] = #{k <= a, sigma(k) <= b}."""
    n = joint.size
    for b in range(n + 1):
        grid[0, b] = 0
    for a in range(1, n + 1):
        s = joint[a - 1]
        row = grid[a]
        prev = grid[a - 1]
        for b in range(n + 1):
            row[b] = prev[b]
        for b in range(s, n + 1):
            row[b] += 1
    return grid


@njit(cache=True)
def bkr_numer_matrix(rx, ry):
    """Per-pair numerators of the 6-point two-pivot statistic.

    Statistic value = numer / (32 * C(n, 6)). Pivot pairs are indexed by
    (x-rank alpha of the x-pivot, y-rank beta of the y-pivot); the two
    pivots must be different samples, which excludes beta = sigma(alpha).
    """
    n, p = rx.shape
    q = ry.shape[1]
    out = np.empty((p, q), np.int64)
    xinv = np.empty(n, np.int64)
    joint = np.empty(n, np.int64)
    sinv = np.empty(n + 1, np.int64)
    grid = np.zeros((n + 1, n + 1), np.int64)
    big_k = n - 2
    for i in range(p):
        for k in range(n):
            xinv[rx[k, i] - 1] = k
        for j in range(q):
            for r in range(n):
                joint[r] = ry[xinv[r], j]
            for r in range(n):
                sinv[joint[r]] = r + 1
            _fill_grid(joint, grid)
            total = np.int64(0)
            for alpha in range(1, n + 1):
                sig_a = joint[alpha - 1]
                row = grid[alpha - 1]
                for beta in range(1, n + 1):
                    if beta == sig_a:
                        continue
                    a = row[beta - 1]
                    u = alpha - 1
                    if sinv[beta] < alpha:
                        u -= 1
                    v = beta - 1
                    if sig_a < beta:
                        v -= 1
                    total += _pivot_poly(a, u, v, big_k)
            out[i, j] = total
    return out


@njit(cache=True)
def taustar_match_matrix(rx, ry):
    """Per-pair counts of matched 4-subsets.

    A 4-subset is matched when its two x-top samples are also the two
    y-top samples (concordant block) or the two y-bottom samples
    (discordant block). Enumerates the candidate top pair (k1 < k2 in
    x-rank) and counts completions among points southwest / northwest of
    the pair's min corner. Statistic value =
    (3 * match - C(n, 4)) / (3 * C(n, 4)).
    """
    n, p = rx.shape
    q = ry.shape[1]
    out = np.empty((p, q), np.int64)
    xinv = np.empty(n, np.int64)
    joint = np.empty(n, np.int64)
    grid = np.zeros((n + 1, n + 1), np.int64)
    for i in range(p):
        for k in range(n):
            xinv[rx[k, i] - 1] = k
        for j in range(q):
            for r in range(n):
                joint[r] = ry[xinv[r], j]
            _fill_grid(joint, grid)
            match = np.int64(0)
            for k1 in range(1, n + 1):
                s1 = joint[k1 - 1]
                row = grid[k1 - 1]
                for k2 in range(k1 + 1, n + 1):
                    s2 = joint[k2 - 1]
                    if s1 < s2:
                        lo = s1
                        hi = s2
                    else:
                        lo = s2
                        hi = s1
                    m_same = row[lo - 1]
                    match += m_same * (m_same - 1) // 2
                    m_opp = (k1 - 1) - row[hi]
                    match += m_opp * (m_opp - 1) // 2
            out[i, j] = match
    return out
