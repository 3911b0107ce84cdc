"""The three test families per correlation kind, and the battery runner.

Max-type tests compare the standardized max statistic to its Gumbel-law
critical value; sum-type tests compare S over its permutation-estimated
sigma to a normal quantile; the combined ("max-sum") test Fisher-merges
the two component p-values into -2 log P_S - 2 log P_L, referred to a
chi-square(4) tail. The "adjusted" switch applies the finite-sample
corrections used for the degenerate kinds: the sum z-score divisor
inflates by 1 + 2/sqrt(n) (D, R, tau*), and the standardized max for D
additionally deflates by 1 + 2/log(n*p).

A battery evaluates one PairStatMatrix and one permutation estimate per
kind and reuses them across families, so a max-sum report's components
are bit-identical to the standalone max/sum reports with the same plan.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .aggregate import max_stat, null_moments, standardized_max, sum_stat
from .errors import AlphaOutOfRange, RankIndepError
from .nulldist import (
    DEGENERATE_KINDS,
    CHI_SQ_4,
    chi4_upper_quantile,
    max_critical,
    max_pvalue,
    normal_upper_quantile,
    survival,
)
from .paircorr import CorrelationKind, stat_matrix
from .permute import PermutationPlan, permuted_sum_draws, sum_pvalue
from .ranks import DataPair, RankedPair, TiePolicy, rank_columns

#: p-values are clamped here before entering -2 log p.
PVALUE_FLOOR = 1e-300


class TestFamily(Enum):
    __test__ = False  # not a pytest class

    MAX = "max"
    SUM = "sum"
    MAXSUM = "maxsum"


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # keep pytest from collecting this as a test class

    kind: CorrelationKind
    family: TestFamily
    alpha: float = 0.05
    adjusted: bool = False
    plan: PermutationPlan = PermutationPlan()

    def __post_init__(self):
        object.__setattr__(self, "kind", CorrelationKind(self.kind))
        object.__setattr__(self, "family", TestFamily(self.family))
        if not (0.0 < self.alpha < 1.0):
            raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.adjusted:
            if self.kind not in DEGENERATE_KINDS:
                raise ValueError(
                    f"adjusted tests exist only for the degenerate kinds, "
                    f"not {self.kind.value}"
                )
            if (
                self.family is TestFamily.MAX
                and self.kind is not CorrelationKind.HOEFFDING_D
            ):
                raise ValueError(
                    "the adjusted max rule is defined only for hoeffding"
                )

    @property
    def label(self):
        base = f"{self.kind.value}-{self.family.value}"
        return base + "-adj" if self.adjusted else base


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    spec: TestSpec
    statistic: float
    standardized: float
    p_value: float
    reject: bool
    components: tuple
    n: int
    p: int
    q: int


@dataclass(frozen=True)
class BatteryFailure:
    """A battery entry that raised instead of producing a report."""

    spec: TestSpec
    error: str


class _Caches:
    """Per-dataset memo: one matrix/moments/estimate per kind (and plan)."""

    def __init__(self, ranked):
        self.ranked = ranked
        self._mats = {}
        self._moms = {}
        self._ests = {}

    def mom(self, kind):
        if kind not in self._moms:
            self._moms[kind] = null_moments(kind, self.ranked.n)
        return self._moms[kind]

    def mat(self, kind):
        if kind not in self._mats:
            self._mats[kind] = stat_matrix(self.ranked, kind)
        return self._mats[kind]

    def est(self, kind, plan):
        key = (kind, plan)
        if key not in self._ests:
            self._ests[key] = permuted_sum_draws(self.ranked, kind, plan)
        return self._ests[key]


def _max_parts(caches, spec):
    """(L, standardized-after-adjustment, p_value, reject)."""
    mat = caches.mat(spec.kind)
    mom = caches.mom(spec.kind)
    big_l = max_stat(mat)
    std = standardized_max(mat, mom)
    if spec.adjusted and spec.kind is CorrelationKind.HOEFFDING_D:
        std = std / (1.0 + 2.0 / math.log(caches.ranked.n * caches.ranked.p))
    p_val = max_pvalue(spec.kind, std)
    reject = std >= max_critical(spec.kind, spec.alpha)
    return big_l, std, p_val, reject


def _sum_parts(caches, spec):
    """(S, z-score, p_value, reject)."""
    mat = caches.mat(spec.kind)
    mom = caches.mom(spec.kind)
    est = caches.est(spec.kind, spec.plan)
    s = sum_stat(mat, mom)
    divisor = est.sigma_hat
    if spec.adjusted:
        divisor = divisor * (1.0 + 2.0 / math.sqrt(caches.ranked.n))
    z = s / divisor
    p_val = sum_pvalue(s, est, spec.adjusted, caches.ranked.n)
    reject = z >= normal_upper_quantile(spec.alpha)
    return s, z, p_val, reject


def _report(spec, statistic, standardized, p_value, reject, caches, components=()):
    r = caches.ranked
    return TestReport(
        spec=spec,
        statistic=statistic,
        standardized=standardized,
        p_value=p_value,
        reject=reject,
        components=components,
        n=r.n,
        p=r.p,
        q=r.q,
    )


def fisher_combination(p_max, p_sum):
    """Combine the two component p-values: -2 log p_sum - 2 log p_max.

    Under independent uniform components the result is chi-square with 4
    degrees of freedom. Inputs are floored at PVALUE_FLOOR so a component
    that underflowed to exactly zero still yields a finite statistic.
    """
    return -2.0 * math.log(max(p_sum, PVALUE_FLOOR)) - 2.0 * math.log(
        max(p_max, PVALUE_FLOOR)
    )


def _eval_one(caches, spec):
    if spec.family is TestFamily.MAX:
        big_l, std, p_val, reject = _max_parts(caches, spec)
        return _report(spec, big_l, std, p_val, reject, caches)
    if spec.family is TestFamily.SUM:
        s, z, p_val, reject = _sum_parts(caches, spec)
        return _report(spec, s, z, p_val, reject, caches)
    # max-sum: components computed exactly as the standalone tests would
    max_adjust = spec.adjusted and spec.kind is CorrelationKind.HOEFFDING_D
    max_spec = TestSpec(spec.kind, TestFamily.MAX, spec.alpha, max_adjust, spec.plan)
    _, _, p_l, _ = _max_parts(caches, max_spec)
    _, _, p_s, _ = _sum_parts(caches, spec)
    t_c = fisher_combination(p_l, p_s)
    p_val = survival(CHI_SQ_4, t_c)
    reject = t_c > chi4_upper_quantile(spec.alpha)
    return _report(spec, t_c, t_c, p_val, reject, caches, components=(p_l, p_s))


def _as_ranked(data, tie_policy):
    if isinstance(data, RankedPair):
        return data
    if not isinstance(data, DataPair):
        data = DataPair(data[0], data[1])
    return rank_columns(data, tie_policy)


def _run_single(data, spec, family, tie_policy):
    if spec.family is not family:
        raise ValueError(f"spec family is {spec.family.value}, expected {family.value}")
    return _eval_one(_Caches(_as_ranked(data, tie_policy)), spec)


def run_max_test(data, spec, tie_policy=TiePolicy.ERROR):
    return _run_single(data, spec, TestFamily.MAX, tie_policy)


def run_sum_test(data, spec, tie_policy=TiePolicy.ERROR):
    return _run_single(data, spec, TestFamily.SUM, tie_policy)


def run_maxsum_test(data, spec, tie_policy=TiePolicy.ERROR):
    return _run_single(data, spec, TestFamily.MAXSUM, tie_policy)


#: The default adjusted flag per (kind, family): D fully primed, R and
#: tau* primed in sum and max-sum only, linear-rank kinds plain.
def default_adjusted(kind, family):
    kind = CorrelationKind(kind)
    family = TestFamily(family)
    if kind not in DEGENERATE_KINDS:
        return False
    if family is TestFamily.MAX:
        return kind is CorrelationKind.HOEFFDING_D
    return True


_KIND_ORDER = list(CorrelationKind)
_FAMILY_ORDER = list(TestFamily)


def evaluate_specs(ranked, specs):
    """Evaluate many specs on one ranked dataset with shared caches.

    Returns one entry per spec, in the given order: TestReport on
    success, BatteryFailure when that entry raised.
    """
    caches = _Caches(ranked)
    out = []
    for spec in specs:
        try:
            out.append(_eval_one(caches, spec))
        except RankIndepError as exc:
            out.append(BatteryFailure(spec=spec, error=f"{type(exc).__name__}: {exc}"))
    return out


def _as_kind_set(kinds):
    if isinstance(kinds, str):
        return set(CorrelationKind) if kinds.lower() == "all" \
            else {CorrelationKind(kinds)}
    return {CorrelationKind(k) for k in kinds}


def _as_family_set(families):
    if isinstance(families, str):
        return set(TestFamily) if families.lower() == "all" \
            else {TestFamily(families)}
    return {TestFamily(f) for f in families}


def battery_specs(kinds, families, alpha=0.05, plan=PermutationPlan()):
    """The deterministic battery roster: kind-major, family-minor.

    ``kinds``/``families`` accept enum members, value strings, iterables
    of either, or the string ``"all"``.
    """
    kinds = _as_kind_set(kinds)
    families = _as_family_set(families)
    if not kinds or not families:
        raise ValueError("kinds and families must be non-empty")
    return [
        TestSpec(k, f, alpha, default_adjusted(k, f), plan)
        for k in _KIND_ORDER
        if k in kinds
        for f in _FAMILY_ORDER
        if f in families
    ]


def run_battery(data, kinds, families, alpha=0.05, plan=PermutationPlan(), tie_policy=TiePolicy.ERROR):
    """Run every (kind, family) combination, sharing work per kind.

    Entries that fail (e.g. a kind whose arity exceeds n) are returned
    as BatteryFailure records; the rest of the battery still runs.
    """
    specs = battery_specs(kinds, families, alpha, plan)
    return evaluate_specs(_as_ranked(data, tie_policy), specs)


__all__ = [
    "PVALUE_FLOOR",
    "TestFamily",
    "TestSpec",
    "TestReport",
    "BatteryFailure",
    "fisher_combination",
    "run_max_test",
    "run_sum_test",
    "run_maxsum_test",
    "default_adjusted",
    "battery_specs",
    "evaluate_specs",
    "run_battery",
]
