"""Per-pair rank correlation statistics and the full p×q statistic matrix.

Five statistics share one input convention: 1-based within-column ranks.
Each is an exact integer count divided once at the end, so the scalar
helpers, the grid evaluator, and any parallel caller produce bit-identical
floats. The counting identities behind the U-statistic kinds are derived,
not transcribed, and are certified against the brute-force oracle
(:mod:`rankindep.kernels`) by the test suite.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _engines
from .errors import RowCountMismatch, SampleSmallerThanArity
from .ranks import RankedPair, check_permutation, joint_rank_sequence


class CorrelationKind(Enum):
    SPEARMAN_RHO = "spearman"
    KENDALL_TAU = "kendall"
    HOEFFDING_D = "hoeffding"
    BKR_R = "bkr"
    BDY_TAU_STAR = "taustar"


#: Smallest sample size for which each statistic is defined.
MIN_N = {
    CorrelationKind.SPEARMAN_RHO: 2,
    CorrelationKind.KENDALL_TAU: 2,
    CorrelationKind.HOEFFDING_D: 5,
    CorrelationKind.BKR_R: 6,
    CorrelationKind.BDY_TAU_STAR: 4,
}


@dataclass(frozen=True)
class PairStatMatrix:
    """One correlation statistic evaluated on every (x column, y column) pair."""

    kind: CorrelationKind
    values: np.ndarray
    n: int

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("values must be a p×q matrix")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def p(self):
        return self.values.shape[0]

    @property
    def q(self):
        return self.values.shape[1]


def _require_n(kind, n):
    if n < MIN_N[kind]:
        raise SampleSmallerThanArity(
            f"{kind.value} needs n >= {MIN_N[kind]}, got {n}"
        )


def spearman_pair(joint):
    """Spearman's rho from a joint rank sequence.

    Equals 12/(n(n²−1)) · Σ_k (k − (n+1)/2)(joint[k] − (n+1)/2), computed
    as an integer numerator over n(n²−1).
    """
    j = check_permutation(joint, "joint")
    n = j.size
    _require_n(CorrelationKind.SPEARMAN_RHO, n)
    s = int(np.dot(np.arange(1, n + 1, dtype=np.int64), j))
    return (12 * s - 3 * n * (n + 1) ** 2) / (n * (n * n - 1))


def generic_linear_rank_pair(joint, f, g):
    """Linear rank statistic n⁻¹ Σ_k f(k/(n+1)) · g(joint[k]/(n+1)).

    With the centered linear scores f(u) = g(u) = u − 1/2 this equals
    spearman_pair · (n−1) / (12(n+1)); the test suite pins that relation.
    """
    j = check_permutation(joint, "joint")
    n = j.size
    den = n + 1
    return math.fsum(f(k / den) * g(int(j[k - 1]) / den) for k in range(1, n + 1)) / n


def _pair_via_engine(engine, x_ranks, y_ranks, kind):
    rx = check_permutation(x_ranks, "x_ranks").reshape(-1, 1)
    ry = check_permutation(y_ranks, "y_ranks").reshape(-1, 1)
    if rx.shape[0] != ry.shape[0]:
        raise RowCountMismatch("rank vectors have different lengths")
    _require_n(kind, rx.shape[0])
    counts = engine(np.ascontiguousarray(rx), np.ascontiguousarray(ry))
    return int(counts[0, 0]), rx.shape[0]


def kendall_pair(x_ranks, y_ranks):
    """Kendall's tau via O(n log n) merge-sort inversion counting."""
    inv, n = _pair_via_engine(
        _engines.kendall_inversion_matrix, x_ranks, y_ranks, CorrelationKind.KENDALL_TAU
    )
    nn = n * (n - 1)
    return (nn - 4 * inv) / nn


def hoeffding_d_pair(x_ranks, y_ranks):
    """The 5-point double-bracket statistic (O(n log n) per pair)."""
    numer, n = _pair_via_engine(
        _engines.hoeffding_numer_matrix, x_ranks, y_ranks, CorrelationKind.HOEFFDING_D
    )
    return numer / (16 * math.comb(n, 5))


def bkr_r_pair(x_ranks, y_ranks):
    """The 6-point two-pivot statistic (O(n²) per pair)."""
    numer, n = _pair_via_engine(
        _engines.bkr_numer_matrix, x_ranks, y_ranks, CorrelationKind.BKR_R
    )
    return numer / (32 * math.comb(n, 6))


def bdy_taustar_pair(x_ranks, y_ranks):
    """The 4-point concordance-block statistic (O(n²) per pair)."""
    match, n = _pair_via_engine(
        _engines.taustar_match_matrix, x_ranks, y_ranks, CorrelationKind.BDY_TAU_STAR
    )
    c4 = math.comb(n, 4)
    return (3 * match - c4) / (3 * c4)


def _spearman_matrix_values(rx, ry, n):
    # every partial sum of the rank GEMM is an integer < 2^53, so the
    # float64 matmul is exact regardless of the BLAS reduction order
    s = rx.astype(np.float64).T @ ry.astype(np.float64)
    return (12.0 * s - float(3 * n * (n + 1) ** 2)) / float(n * (n * n - 1))


def stat_matrix(ranked, kind):
    """Evaluate one correlation statistic on every column pair.

    Deterministic regardless of evaluation order or thread count: each
    entry is an exact integer count divided by a fixed denominator.
    """
    if not isinstance(ranked, RankedPair):
        raise TypeError("stat_matrix expects a RankedPair")
    kind = CorrelationKind(kind)
    n = ranked.n
    _require_n(kind, n)
    rx = ranked.rx
    ry = ranked.ry
    if kind is CorrelationKind.SPEARMAN_RHO:
        values = _spearman_matrix_values(rx, ry, n)
    elif kind is CorrelationKind.KENDALL_TAU:
        inv = _engines.kendall_inversion_matrix(rx, ry)
        nn = n * (n - 1)
        values = (nn - 4 * inv).astype(np.float64) / float(nn)
    elif kind is CorrelationKind.HOEFFDING_D:
        numer = _engines.hoeffding_numer_matrix(rx, ry)
        values = numer.astype(np.float64) / float(16 * math.comb(n, 5))
    elif kind is CorrelationKind.BKR_R:
        numer = _engines.bkr_numer_matrix(rx, ry)
        values = numer.astype(np.float64) / float(32 * math.comb(n, 6))
    else:
        match = _engines.taustar_match_matrix(rx, ry)
        c4 = math.comb(n, 4)
        values = (3 * match - c4).astype(np.float64) / float(3 * c4)
    return PairStatMatrix(kind=kind, values=values, n=n)


#: Map from U-statistic correlation kinds to their oracle kernel kinds.
def oracle_kernel_kind(kind):
    from .kernels import KernelKind

    mapping = {
        CorrelationKind.KENDALL_TAU: KernelKind.KENDALL_TAU,
        CorrelationKind.HOEFFDING_D: KernelKind.HOEFFDING_D,
        CorrelationKind.BKR_R: KernelKind.BKR_R,
        CorrelationKind.BDY_TAU_STAR: KernelKind.BDY_TAU_STAR,
    }
    if kind not in mapping:
        raise KeyError(f"{kind} is not a U-statistic kind")
    return mapping[kind]


__all__ = [
    "CorrelationKind",
    "MIN_N",
    "PairStatMatrix",
    "spearman_pair",
    "generic_linear_rank_pair",
    "kendall_pair",
    "hoeffding_d_pair",
    "bkr_r_pair",
    "bdy_taustar_pair",
    "stat_matrix",
    "oracle_kernel_kind",
    "joint_rank_sequence",
]
