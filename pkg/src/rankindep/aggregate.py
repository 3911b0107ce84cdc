"""Exact null moments and the two aggregate statistics.

For each correlation kind this module supplies E[stat^2] under
independence as an exact rational in n, the max-type aggregate L (with
its Gumbel-scale standardization), and the centered sum-type aggregate
S. The closed-form moment expressions are the published ones; the test
suite re-derives each at small n by exact enumeration over all pairings,
so a transcription slip cannot survive.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionTooSmall, EmptyMatrix, KindMismatch, SampleTooSmall
from .nulldist import DEGENERATE_KINDS, KAPPA_PRINTED
from .paircorr import MIN_N, CorrelationKind, PairStatMatrix

_PI4 = math.pi**4

#: Coefficient of (n-1) * L in the degenerate-kind standardization.
DEGENERATE_MULTIPLIER = {
    CorrelationKind.HOEFFDING_D: _PI4 / 30.0,
    CorrelationKind.BKR_R: _PI4 / 90.0,
    CorrelationKind.BDY_TAU_STAR: _PI4 / 36.0,
}

#: Additive constant in the same standardization (equal for all three).
DEGENERATE_OFFSET = _PI4 / 36.0


@dataclass(frozen=True)
class GaussianLimitParams:
    """Limit bookkeeping for the linear-rank kinds (max of |entries|)."""

    var_l: float


@dataclass(frozen=True)
class DegenerateLimitParams:
    """Limit bookkeeping for the degenerate kinds (max of signed entries).

    Standardized statistic = multiplier * (n-1) * L - 2 log N
    + log log N + offset, whose tail law is the kappa-parametrized
    Gumbel variant. mu1 is the top-eigenvalue multiplicity (1 for every
    kernel here, which is why log log N enters with coefficient +1).
    """

    multiplier: float
    offset: float
    kappa: float
    mu1: int


@dataclass(frozen=True)
class NullMoments:
    kind: CorrelationKind
    n: int
    var_l: float
    e2: float
    limit: object

    def __post_init__(self):
        if not (self.var_l > 0.0 and self.e2 > 0.0):
            raise ValueError("null moments must be positive")


def _e2_fraction(kind, n):
    if kind is CorrelationKind.SPEARMAN_RHO:
        return Fraction(1, n - 1)
    if kind is CorrelationKind.KENDALL_TAU:
        return Fraction(2 * (2 * n + 5), 9 * n * (n - 1))
    if kind is CorrelationKind.HOEFFDING_D:
        return Fraction(
            2 * (n * n + 5 * n - 32), 9 * n * (n - 1) * (n - 3) * (n - 4)
        )
    if kind is CorrelationKind.BKR_R:
        return Fraction(
            2 * (n**3 - 3 * n * n - 6 * n + 10),
            n * (n - 1) * (n - 2) * (n - 3) * (n - 4),
        )
    return Fraction(
        8 * (3 * n * n + 5 * n - 18), 75 * n * (n - 1) * (n - 2) * (n - 3)
    )


def null_moments(kind, n, kappa=None):
    """Closed-form E[stat^2] (and var of each entry) under independence.

    All five statistics have exact mean zero under independence, so the
    entry variance equals the second moment.
    """
    kind = CorrelationKind(kind)
    n = int(n)
    if n < MIN_N[kind]:
        raise SampleTooSmall(
            f"{kind.value} moments need n >= {MIN_N[kind]}, got {n}"
        )
    e2 = float(_e2_fraction(kind, n))
    if kind in DEGENERATE_KINDS:
        limit = DegenerateLimitParams(
            multiplier=DEGENERATE_MULTIPLIER[kind],
            offset=DEGENERATE_OFFSET,
            kappa=KAPPA_PRINTED if kappa is None else float(kappa),
            mu1=1,
        )
    else:
        limit = GaussianLimitParams(var_l=e2)
    return NullMoments(kind=kind, n=n, var_l=e2, e2=e2, limit=limit)


def max_stat(mat):
    """The max aggregate: max |entry| for linear-rank kinds, max signed
    entry for the degenerate kinds (whose population value is maximized
    at zero dependence from below)."""
    if not isinstance(mat, PairStatMatrix):
        raise TypeError("max_stat expects a PairStatMatrix")
    if mat.values.size == 0:
        raise EmptyMatrix("max_stat needs at least one entry")
    if mat.kind in DEGENERATE_KINDS:
        return float(mat.values.max())
    return float(np.abs(mat.values).max())


def _check_match(mat, mom):
    if mom.kind is not mat.kind:
        raise KindMismatch(
            f"moments are for {mom.kind.value}, matrix is {mat.kind.value}"
        )
    if mom.n != mat.n:
        raise KindMismatch(
            f"moments are for n={mom.n}, matrix has n={mat.n}"
        )


def standardized_max(mat, mom):
    """Shift the max statistic onto its limit law's scale.

    Linear-rank kinds: L^2 / var - 2 log N + log log N. Degenerate
    kinds: multiplier * (n-1) * L - 2 log N + log log N + offset. N is
    the number of matrix entries and must be at least 2 for the log log
    term to exist.
    """
    _check_match(mat, mom)
    n_entries = mat.values.size
    if n_entries < 2:
        raise DimensionTooSmall("standardized max needs at least 2 entries")
    logs = -2.0 * math.log(n_entries) + math.log(math.log(n_entries))
    big_l = max_stat(mat)
    if mat.kind in DEGENERATE_KINDS:
        lim = mom.limit
        return lim.multiplier * (mom.n - 1) * big_l + logs + lim.offset
    return big_l * big_l / mom.var_l + logs


def sum_stat(mat, mom):
    """Sum of (entry^2 - E[entry^2]) in row-major order.

    math.fsum keeps the accumulation exact regardless of entry count, so
    the result does not depend on how callers might tile the matrix.
    """
    _check_match(mat, mom)
    e2 = mom.e2
    flat = mat.values.ravel(order="C")
    return math.fsum(v * v - e2 for v in flat.tolist())


__all__ = [
    "DEGENERATE_MULTIPLIER",
    "DEGENERATE_OFFSET",
    "GaussianLimitParams",
    "DegenerateLimitParams",
    "NullMoments",
    "null_moments",
    "max_stat",
    "standardized_max",
    "sum_stat",
]
