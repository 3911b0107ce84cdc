"""Permutation-based variance estimation for the sum statistic.

The sum statistic's null variance has no usable closed form at finite n,
so it is estimated by breaking the X/Y pairing: draw B uniformly random
row permutations of the X ranks (Y fixed), recompute the sum statistic
for each, and take the unbiased sample standard deviation. Draw b uses
its own counter-derived substream, so results are bit-identical for a
given (seed, b_count, data) no matter how draws are scheduled.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._rng import TAG_PERMUTE, substream
from .aggregate import null_moments, sum_stat
from .errors import DegenerateVariance, ZeroSigma
from .paircorr import CorrelationKind, stat_matrix
from .ranks import RankedPair

#: Documented generator identity: Philox 4x64 keyed by a splitmix64 hash
#: of (seed, stream tag, draw index). Recorded on every plan so reports
#: can state exactly how their randomness was produced.
RNG_TAG = "philox4x64/splitmix64-substreams"


@dataclass(frozen=True)
class PermutationPlan:
    """How to randomize: number of draws and the seed of the substreams."""

    b_count: int = 50
    seed: int = 0
    rng_tag: str = RNG_TAG

    def __post_init__(self):
        if self.b_count < 2:
            raise ValueError("sample variance needs b_count >= 2")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class PermutationEstimate:
    sigma_hat: float
    draws: tuple
    plan: PermutationPlan


def permutation_for_draw(plan, b, n):
    """The b-th row permutation (0-based draw index, 0-based rows)."""
    return substream(plan.seed, TAG_PERMUTE, b).permutation(n)


def permuted_sum_draws(ranked, kind, plan):
    """Estimate sigma of the sum statistic under broken pairing.

    Marginal ranks are reused across draws — only the row order of the
    X side changes, which is exactly the relative-pairing randomization
    the permutation null calls for.
    """
    kind = CorrelationKind(kind)
    mom = null_moments(kind, ranked.n)
    draws = []
    for b in range(plan.b_count):
        perm = permutation_for_draw(plan, b, ranked.n)
        shuffled = RankedPair(
            np.ascontiguousarray(ranked.rx[perm]),
            ranked.ry,
            ranked.x_tie_flags,
            ranked.y_tie_flags,
        )
        draws.append(sum_stat(stat_matrix(shuffled, kind), mom))
    mean = math.fsum(draws) / plan.b_count
    var = math.fsum((d - mean) ** 2 for d in draws) / (plan.b_count - 1)
    if not var > 0.0:
        raise DegenerateVariance(
            "all permutation draws are numerically equal; the input has no "
            "usable variation (constant columns that slipped past tie checks?)"
        )
    return PermutationEstimate(sigma_hat=math.sqrt(var), draws=tuple(draws), plan=plan)


def sum_pvalue(s, est, adjusted, n):
    """One-sided p-value 1 - Phi(s / sigma_hat).

    With adjusted=True the divisor inflates to sigma_hat * (1 + 2/sqrt(n)),
    the finite-sample correction applied to the degenerate kinds.
    """
    from .nulldist import normal_sf

    if not est.sigma_hat > 0.0:
        raise ZeroSigma("sigma_hat must be positive")
    divisor = est.sigma_hat * (1.0 + 2.0 / math.sqrt(n)) if adjusted else est.sigma_hat
    return normal_sf(s / divisor)


__all__ = [
    "RNG_TAG",
    "PermutationPlan",
    "PermutationEstimate",
    "permutation_for_draw",
    "permuted_sum_draws",
    "sum_pvalue",
]
