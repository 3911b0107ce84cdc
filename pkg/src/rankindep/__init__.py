"""Rank-based independence tests between two high-dimensional vectors.

Given paired samples X (n×p) and Y (n×q), the library computes five
classical rank correlations for every (column of X, column of Y) pair —
Spearman's rho, Kendall's tau, Hoeffding's D, Blum–Kiefer–Rosenblatt's R
and the Bergsma–Dassios–Yanagimoto tau* — and aggregates the p·q values
into max-type, sum-type and combined (Fisher) tests of the hypothesis
that the two vectors are independent.

Quick start::

    from rankindep import DataPair, run_battery

    pair = DataPair(x, y)                     # numpy arrays, rows aligned
    for report in run_battery(pair, kinds="all", families="all"):
        print(report.spec.label, report.p_value, report.reject)

The ``rankindep`` console script exposes the same functionality plus a
simulation harness; see ``rankindep --help``.
"""

from .aggregate import (
    NullMoments,
    max_stat,
    null_moments,
    standardized_max,
    sum_stat,
)
from .dgp import (
    Innovation,
    SettingLabel,
    SimSetting,
    dependent_y_columns,
    gen_alternative,
    gen_null,
    generate,
)
from .errors import (
    DataError,
    NumericError,
    RankIndepError,
)
from .nulldist import (
    LawFamily,
    TailLaw,
    law_for_kind,
    max_critical,
    max_pvalue,
)
from .paircorr import (
    CorrelationKind,
    stat_matrix,
)
from .permute import (
    PermutationEstimate,
    PermutationPlan,
    permuted_sum_draws,
    sum_pvalue,
)
from .ranks import (
    DataPair,
    RankedPair,
    TiePolicy,
    rank_columns,
)
from .sim import (
    CellResult,
    StudyConfig,
    StudyReport,
    power_curve,
    run_study,
    subsample_rejection,
)
from .testsuite import (
    BatteryFailure,
    TestFamily,
    TestReport,
    TestSpec,
    battery_specs,
    run_battery,
    run_max_test,
    run_maxsum_test,
    run_sum_test,
)

__version__ = "0.1.0"

__all__ = [
    "BatteryFailure",
    "CellResult",
    "CorrelationKind",
    "DataError",
    "DataPair",
    "Innovation",
    "LawFamily",
    "NullMoments",
    "NumericError",
    "PermutationEstimate",
    "PermutationPlan",
    "RankIndepError",
    "RankedPair",
    "SettingLabel",
    "SimSetting",
    "StudyConfig",
    "StudyReport",
    "TailLaw",
    "TestFamily",
    "TestReport",
    "TestSpec",
    "TiePolicy",
    "battery_specs",
    "dependent_y_columns",
    "gen_alternative",
    "gen_null",
    "generate",
    "law_for_kind",
    "max_critical",
    "max_pvalue",
    "max_stat",
    "null_moments",
    "permuted_sum_draws",
    "power_curve",
    "rank_columns",
    "run_battery",
    "run_max_test",
    "run_maxsum_test",
    "run_study",
    "run_sum_test",
    "standardized_max",
    "stat_matrix",
    "subsample_rejection",
    "sum_pvalue",
    "sum_stat",
]
