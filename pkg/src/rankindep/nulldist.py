"""Limit-law mathematics: tail CDFs, critical values, and p-values.

Two Gumbel-type laws drive the max tests — one for the linear-rank
statistics (Spearman/Kendall scale) and one, with a kernel-specific
constant kappa, for the degenerate kinds — plus the standard normal for
the sum test and chi-square with 4 degrees of freedom for the combined
test. Everything is closed-form or bisection on a closed form, so the
module has no numerical dependencies beyond the math stdlib.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import AlphaOutOfRange
from .paircorr import CorrelationKind

#: The degenerate-limit constant printed for all three non-linear kernels.
#: Callers holding a higher-precision value may override it everywhere a
#: ``kappa`` keyword is accepted.
KAPPA_PRINTED = 2.467

_SQRT_PI = math.sqrt(math.pi)

#: Kinds whose max statistic follows the kappa-parametrized law.
DEGENERATE_KINDS = frozenset(
    {
        CorrelationKind.HOEFFDING_D,
        CorrelationKind.BKR_R,
        CorrelationKind.BDY_TAU_STAR,
    }
)


class LawFamily(Enum):
    GUMBEL_PI = "gumbel-pi"
    GUMBEL_KAPPA = "gumbel-kappa"
    STD_NORMAL = "std-normal"
    CHI_SQ_4 = "chisq4"


@dataclass(frozen=True)
class TailLaw:
    """A tail law; ``kappa`` is meaningful only for GUMBEL_KAPPA."""

    family: LawFamily
    kappa: float = math.nan

    def __post_init__(self):
        if self.family is LawFamily.GUMBEL_KAPPA:
            if not (self.kappa > 0):
                raise ValueError("gumbel-kappa law needs kappa > 0")
        # non-kappa laws carry NaN so accidental use is loud


GUMBEL_PI = TailLaw(LawFamily.GUMBEL_PI)
STD_NORMAL = TailLaw(LawFamily.STD_NORMAL)
CHI_SQ_4 = TailLaw(LawFamily.CHI_SQ_4)


def gumbel_kappa(kappa=KAPPA_PRINTED):
    return TailLaw(LawFamily.GUMBEL_KAPPA, float(kappa))


def _double_exponential(y, scale):
    """exp(-scale * exp(-y/2)) with explicit under/overflow clamps."""
    t = -0.5 * y
    if t > 700.0:  # exp would overflow; the CDF is 0 to double precision
        return 0.0
    arg = scale * math.exp(t)
    if arg > 745.0:
        return 0.0
    return math.exp(-arg)


def normal_cdf(x):
    """Standard normal CDF via the complementary error function.

    math.erfc is correctly rounded, far inside the documented 1e-12
    accuracy budget, and keeps the module dependency-free.
    """
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x):
    """P(Z > x): the upper tail, accurate far beyond where 1 - cdf dies."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def cdf(law, y):
    """Evaluate a TailLaw CDF at y. Always in [0, 1]."""
    fam = law.family
    if fam is LawFamily.GUMBEL_PI:
        return _double_exponential(y, 1.0 / _SQRT_PI)
    if fam is LawFamily.GUMBEL_KAPPA:
        return _double_exponential(y, law.kappa / _SQRT_PI)
    if fam is LawFamily.STD_NORMAL:
        return normal_cdf(y)
    if fam is LawFamily.CHI_SQ_4:
        if y <= 0.0:
            return 0.0
        return -math.expm1(-0.5 * y) - 0.5 * y * math.exp(-0.5 * y)
    raise ValueError(f"unknown tail law {law!r}")


def survival(law, y):
    """1 - cdf(law, y), evaluated without upper-tail cancellation.

    The max and combined tests feed their p-values into -2 log p, so the
    tails must stay meaningful well below double-precision epsilon of 1.
    """
    fam = law.family
    if fam is LawFamily.GUMBEL_PI or fam is LawFamily.GUMBEL_KAPPA:
        scale = 1.0 / _SQRT_PI if fam is LawFamily.GUMBEL_PI else law.kappa / _SQRT_PI
        t = -0.5 * y
        if t > 700.0:
            return 1.0
        arg = scale * math.exp(t)
        return 1.0 if arg > 745.0 else -math.expm1(-arg)
    if fam is LawFamily.STD_NORMAL:
        return normal_sf(y)
    if fam is LawFamily.CHI_SQ_4:
        if y <= 0.0:
            return 1.0
        return math.exp(-0.5 * y) * (1.0 + 0.5 * y)
    raise ValueError(f"unknown tail law {law!r}")


def law_for_kind(kind, kappa=None):
    """The max-statistic tail law used by each correlation kind."""
    kind = CorrelationKind(kind)
    if kind in DEGENERATE_KINDS:
        return gumbel_kappa(KAPPA_PRINTED if kappa is None else kappa)
    return GUMBEL_PI


def max_pvalue(kind, std_max, kappa=None):
    """p-value of the standardized max statistic under its limit law."""
    return survival(law_for_kind(kind, kappa), std_max)


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def max_critical(kind, alpha, kappa=None):
    """Upper alpha-quantile of the max statistic's limit law.

    Linear-rank kinds: -log(pi) - 2 log log (1-alpha)^-1. Degenerate
    kinds: log(kappa^2 / pi) - 2 log log (1-alpha)^-1 (the multiplicity-1
    case, where the gamma factor is Gamma(1/2) = sqrt(pi)).
    """
    alpha = _check_alpha(alpha)
    tail = -2.0 * math.log(math.log(1.0 / (1.0 - alpha)))
    kind = CorrelationKind(kind)
    if kind in DEGENERATE_KINDS:
        k = KAPPA_PRINTED if kappa is None else float(kappa)
        return math.log(k * k / math.pi) + tail
    return -math.log(math.pi) + tail


def _bisect_upper_quantile(law, alpha, lo, hi, tol):
    """Solve survival(law, w) = alpha for w on a fixed bracket."""
    while survival(law, hi) > alpha:
        lo = hi
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if survival(law, mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chi4_upper_quantile(alpha):
    """w solving P(chi-square_4 > w) = alpha, bisected to 1e-10."""
    alpha = _check_alpha(alpha)
    return _bisect_upper_quantile(CHI_SQ_4, alpha, 0.0, 16.0, 1e-10)


def normal_upper_quantile(alpha):
    """z solving P(Z > z) = alpha for standard normal Z, to 1e-9."""
    alpha = _check_alpha(alpha)
    lo, hi = -40.0, 40.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if normal_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


__all__ = [
    "KAPPA_PRINTED",
    "DEGENERATE_KINDS",
    "LawFamily",
    "TailLaw",
    "GUMBEL_PI",
    "STD_NORMAL",
    "CHI_SQ_4",
    "gumbel_kappa",
    "normal_cdf",
    "normal_sf",
    "cdf",
    "survival",
    "law_for_kind",
    "max_pvalue",
    "max_critical",
    "chi4_upper_quantile",
    "normal_upper_quantile",
]
