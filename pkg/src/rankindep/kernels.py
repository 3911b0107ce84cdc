"""Brute-force kernel evaluation and exhaustive U-statistics on tiny samples.

This module is the ground-truth oracle for the fast counting formulas in
:mod:`rankindep.paircorr`. It is deliberately slow and exact: kernel
values are integer numerators over fixed denominators, assembled by
enumerating every permutation the kernel definitions sum over, and
U-statistics average those rationals over every size-m subset. Nothing
here is approximated, so any disagreement with the fast path is a bug in
the fast path.
"""

import math
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

from .errors import (
    ArityMismatch,
    SampleSmallerThanArity,
    SampleTooLarge,
    TiedCoordinates,
)

#: Hard ceiling for brute_ustat; C(10,6)*6! kernel terms is already ~0.15M.
MAX_BRUTE_N = 10


class KernelKind(Enum):
    """The four U-statistic kernels (the fifth statistic, the linear rank
    statistic, is not a U-statistic and has no kernel here)."""

    KENDALL_TAU = "kendall"
    HOEFFDING_D = "hoeffding"
    BKR_R = "bkr"
    BDY_TAU_STAR = "taustar"


ARITY = {
    KernelKind.KENDALL_TAU: 2,
    KernelKind.HOEFFDING_D: 5,
    KernelKind.BKR_R: 6,
    KernelKind.BDY_TAU_STAR: 4,
}

# Fixed denominators of the symmetrized kernels: value = numerator / denom.
_DENOM = {
    KernelKind.KENDALL_TAU: 1,
    KernelKind.HOEFFDING_D: 16,
    KernelKind.BKR_R: 32,
    KernelKind.BDY_TAU_STAR: 24,
}


def _ranks_of(values):
    """1-based ranks of a sequence of distinct values (O(m²), m ≤ 6)."""
    return tuple(1 + sum(w < v for w in values) for v in values)


@lru_cache(maxsize=None)
def _kendall_numer(pattern):
    # pattern = y-ranks in x-order; exactly one pair, sign of its y step
    a, b = pattern
    return 1 if b > a else -1


@lru_cache(maxsize=None)
def _hoeffding_numer(pattern):
    """Sum over all 5! orderings of the double-bracket product.

    Points are in x-order, so the x-rank of point i is i+1 and its y-rank
    is pattern[i]. The bracket for axis r and pivot π₅ is
    (I[r(π₁) ≤ r(π₅)] − I[r(π₂) ≤ r(π₅)]) · (I[r(π₃) ≤ r(π₅)] − I[r(π₄) ≤ r(π₅)]);
    indices are distinct so ≤ never meets equality.
    """
    xr = (1, 2, 3, 4, 5)
    yr = pattern
    total = 0
    for p1, p2, p3, p4, p5 in permutations(range(5)):
        ax = (xr[p1] <= xr[p5]) - (xr[p2] <= xr[p5])
        if ax == 0:
            continue
        ax *= (xr[p3] <= xr[p5]) - (xr[p4] <= xr[p5])
        if ax == 0:
            continue
        ay = (yr[p1] <= yr[p5]) - (yr[p2] <= yr[p5])
        if ay == 0:
            continue
        ay *= (yr[p3] <= yr[p5]) - (yr[p4] <= yr[p5])
        total += ax * ay
    return total


@lru_cache(maxsize=None)
def _bkr_numer(pattern):
    """Sum over all 6! orderings; x-brackets pivot on π₅, y-brackets on π₆."""
    xr = (1, 2, 3, 4, 5, 6)
    yr = pattern
    total = 0
    for p1, p2, p3, p4, p5, p6 in permutations(range(6)):
        ax = (xr[p1] <= xr[p5]) - (xr[p2] <= xr[p5])
        if ax == 0:
            continue
        ax *= (xr[p3] <= xr[p5]) - (xr[p4] <= xr[p5])
        if ax == 0:
            continue
        ay = (yr[p1] <= yr[p6]) - (yr[p2] <= yr[p6])
        if ay == 0:
            continue
        ay *= (yr[p3] <= yr[p6]) - (yr[p4] <= yr[p6])
        total += ax * ay
    return total


def _four_below(a, c, b, d):
    # indicator that both of (a, c) are strictly below both of (b, d)
    return 1 if (a < b and a < d and c < b and c < d) else 0


def _g_term(r, p1, p2, p3, p4):
    return (
        _four_below(r[p1], r[p3], r[p2], r[p4])
        + _four_below(r[p2], r[p4], r[p1], r[p3])
        - _four_below(r[p1], r[p4], r[p2], r[p3])
        - _four_below(r[p2], r[p3], r[p1], r[p4])
    )


@lru_cache(maxsize=None)
def _taustar_numer(pattern):
    """Sum over all 4! orderings of G(x-ranks)·G(y-ranks)."""
    xr = (1, 2, 3, 4)
    yr = pattern
    total = 0
    for p1, p2, p3, p4 in permutations(range(4)):
        gx = _g_term(xr, p1, p2, p3, p4)
        if gx == 0:
            continue
        total += gx * _g_term(yr, p1, p2, p3, p4)
    return total


_NUMER = {
    KernelKind.KENDALL_TAU: _kendall_numer,
    KernelKind.HOEFFDING_D: _hoeffding_numer,
    KernelKind.BKR_R: _bkr_numer,
    KernelKind.BDY_TAU_STAR: _taustar_numer,
}


def kernel_pattern_value(kind, pattern):
    """Exact kernel value for a canonical rank pattern.

    ``pattern`` is the tuple of y-ranks of the m points sorted by x; this
    pins the kernel value completely because every kernel is rank-based.
    """
    return Fraction(_NUMER[kind](tuple(pattern)), _DENOM[kind])


def eval_kernel(kind, points):
    """Exact symmetrized kernel value on m (x, y) points.

    Averages/sums over all m! orderings exactly as the kernel definitions
    do, in integer arithmetic, and returns a Fraction. Coordinates must
    be distinct along each axis.
    """
    kind = KernelKind(kind)
    m = ARITY[kind]
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) != m:
        raise ArityMismatch(f"{kind.value} kernel takes {m} points, got {len(pts)}")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if len(set(xs)) != m or len(set(ys)) != m:
        raise TiedCoordinates("kernel oracle requires distinct coordinates per axis")
    pts.sort(key=lambda p: p[0])
    pattern = _ranks_of([p[1] for p in pts])
    return kernel_pattern_value(kind, pattern)


def brute_ustat_exact(kind, x_col, y_col):
    """Exact U-statistic: average of eval_kernel over all C(n, m) subsets."""
    kind = KernelKind(kind)
    m = ARITY[kind]
    xs = [float(v) for v in x_col]
    ys = [float(v) for v in y_col]
    n = len(xs)
    if len(ys) != n:
        raise ArityMismatch("x_col and y_col have different lengths")
    if n < m:
        raise SampleSmallerThanArity(f"{kind.value} needs n >= {m}, got {n}")
    if n > MAX_BRUTE_N:
        raise SampleTooLarge(f"brute_ustat is capped at n = {MAX_BRUTE_N}")
    if len(set(xs)) != n or len(set(ys)) != n:
        raise TiedCoordinates("brute_ustat requires distinct values per axis")

    # sort samples by x once; any subset drawn in index order is x-sorted
    order = sorted(range(n), key=lambda k: xs[k])
    y_sorted = [ys[k] for k in order]
    numer_fn = _NUMER[kind]
    total = 0
    for subset in combinations(range(n), m):
        sub_y = [y_sorted[k] for k in subset]
        total += numer_fn(_ranks_of(sub_y))
    return Fraction(total, _DENOM[kind] * math.comb(n, m))


def brute_ustat(kind, x_col, y_col):
    """float version of :func:`brute_ustat_exact` (the documented oracle API)."""
    return float(brute_ustat_exact(kind, x_col, y_col))
