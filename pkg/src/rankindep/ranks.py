"""Column ranking and the joint rank sequence all statistics consume.

Raw data enters the library once, here. Everything downstream works on
1-based within-column ranks, which makes invariance under strictly
increasing per-column transforms true by construction.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    NonFiniteInput,
    NotAPermutation,
    RowCountMismatch,
    TiesPresent,
)


class TiePolicy(Enum):
    """What to do when a column contains duplicate values.

    ERROR aborts (the theory assumes continuous marginals, so ties mean
    the data does not fit the model). AVERAGE_JITTER_FREE breaks ties by
    original row index — stable and deterministic, no randomized jitter —
    and flags the column so reports can surface the warning.
    """

    ERROR = "error"
    AVERAGE_JITTER_FREE = "average-jitter-free"


def _as_matrix(a, name):
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class DataPair:
    """The observed samples: x is n×p, y is n×q, rows aligned."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_matrix(self.x, "x")
        y = _as_matrix(self.y, "y")
        if x.shape[0] != y.shape[0]:
            raise RowCountMismatch(
                f"x has {x.shape[0]} rows but y has {y.shape[0]}"
            )
        if x.shape[0] < 2:
            raise ValueError("need at least 2 rows")
        if not np.isfinite(x).all() or not np.isfinite(y).all():
            raise NonFiniteInput("matrix entries must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]

    @property
    def q(self):
        return self.y.shape[1]


@dataclass(frozen=True)
class RankedPair:
    """Within-column 1-based ranks of a DataPair, plus per-column tie flags."""

    rx: np.ndarray
    ry: np.ndarray
    x_tie_flags: np.ndarray
    y_tie_flags: np.ndarray

    def __post_init__(self):
        for name in ("rx", "ry", "x_tie_flags", "y_tie_flags"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n(self):
        return self.rx.shape[0]

    @property
    def p(self):
        return self.rx.shape[1]

    @property
    def q(self):
        return self.ry.shape[1]

    @property
    def has_ties(self):
        return bool(self.x_tie_flags.any() or self.y_tie_flags.any())


def _rank_block(a, tie_policy, block_name):
    """Rank each column of ``a``; returns (ranks, tie_flags)."""
    n = a.shape[0]
    order = np.argsort(a, axis=0, kind="stable")
    sorted_vals = np.take_along_axis(a, order, axis=0)
    if n > 1:
        tie_flags = (np.diff(sorted_vals, axis=0) == 0.0).any(axis=0)
    else:
        tie_flags = np.zeros(a.shape[1], dtype=bool)
    if tie_policy is TiePolicy.ERROR and tie_flags.any():
        cols = np.flatnonzero(tie_flags)
        raise TiesPresent(
            f"duplicate values in {block_name} column(s) {cols.tolist()}; "
            f"pass tie_policy=TiePolicy.AVERAGE_JITTER_FREE to break ties "
            f"by row index"
        )
    ranks = np.empty_like(order)
    np.put_along_axis(
        ranks, order, np.arange(1, n + 1, dtype=order.dtype)[:, None], axis=0
    )
    return np.ascontiguousarray(ranks, dtype=np.int64), tie_flags


def rank_columns(data, tie_policy=TiePolicy.ERROR):
    """Convert a DataPair to per-column 1-based ranks.

    Under TiePolicy.ERROR any duplicated value within a column raises
    TiesPresent. Under AVERAGE_JITTER_FREE ties are broken by original
    row index (stable sort) and the column's tie flag is set. Either way
    each output column is a permutation of 1..n, so the downstream
    counting statistics stay well defined.
    """
    if not isinstance(data, DataPair):
        data = DataPair(np.asarray(data[0]), np.asarray(data[1]))
    rx, x_flags = _rank_block(data.x, tie_policy, "x")
    ry, y_flags = _rank_block(data.y, tie_policy, "y")
    return RankedPair(rx, ry, x_flags, y_flags)


def check_permutation(vec, name="rank vector"):
    """Validate that ``vec`` is a permutation of 1..n; return it as int64."""
    arr = np.ascontiguousarray(vec, dtype=np.int64)
    if arr.ndim != 1:
        raise NotAPermutation(f"{name} must be 1-d")
    n = arr.size
    if n == 0:
        raise NotAPermutation(f"{name} is empty")
    seen = np.zeros(n, dtype=bool)
    if arr.min() < 1 or arr.max() > n:
        raise NotAPermutation(f"{name} has entries outside 1..{n}")
    seen[arr - 1] = True
    if not seen.all():
        raise NotAPermutation(f"{name} repeats a rank")
    return arr


def joint_rank_sequence(rx_col, ry_col):
    """Reorder Y-ranks by X-rank.

    Position k (1-based) of the result holds the Y-rank of the sample
    whose X-rank is k. Both inputs must be permutations of 1..n.
    """
    rx = check_permutation(rx_col, "rx_col")
    ry = check_permutation(ry_col, "ry_col")
    if rx.size != ry.size:
        raise NotAPermutation("rx_col and ry_col have different lengths")
    out = np.empty_like(ry)
    out[rx - 1] = ry
    return out
