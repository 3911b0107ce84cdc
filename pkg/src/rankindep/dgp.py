"""Synthetic data generators for the simulation study.

One null design and six dependence alternatives, each a pure function of
a :class:`SimSetting` (the seed is part of the setting).  The null design
builds both blocks from independent moving averages; the alternatives
reuse those series (or banded-covariance Gaussians) and wire a known set
of y columns to the x block.  :func:`dependent_y_columns` reports that
wiring so tests can check the sparsity pattern structurally instead of
by Monte Carlo.

Draw-order contract (what makes replays bit-identical): every moving
average design consumes its stream in the fixed order

    sigma_x (m), sigma_y (m), innovations_x (n×(p+m)), innovations_y (n×(q+m))

even when a particular design ends up not using some block.  The banded
Gaussian designs use: x normals, dependent-column noise, remainder
normals.  Changing either order is a breaking change for recorded
results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ._rng import TAG_DGP, substream
from .errors import BadLabel, DimensionTooSmall
from .ranks import DataPair


class SettingLabel(Enum):
    """Names of the data-generating designs."""

    NULL_MA = "null-ma"
    NONSPARSE_1 = "nonsparse-1"
    NONSPARSE_2 = "nonsparse-2"
    SPARSE_1 = "sparse-1"
    SPARSE_2 = "sparse-2"
    VARYING_SPARSITY = "varying-sparsity"
    SIGNED_SPARSE = "signed-sparse"


class Innovation(Enum):
    """Marginal law of the moving-average innovations (standardized)."""

    NORMAL = "normal"
    STD_CHI_SQ_1 = "chisq1"


#: designs whose construction pairs x and y columns one-to-one
_NEEDS_SQUARE = frozenset({
    SettingLabel.NONSPARSE_1,
    SettingLabel.NONSPARSE_2,
    SettingLabel.SPARSE_1,
    SettingLabel.SPARSE_2,
    SettingLabel.SIGNED_SPARSE,
})

#: moving-average designs (the others draw banded Gaussians directly)
_MA_LABELS = frozenset({
    SettingLabel.NULL_MA,
    SettingLabel.NONSPARSE_1,
    SettingLabel.NONSPARSE_2,
    SettingLabel.SPARSE_1,
    SettingLabel.SPARSE_2,
})


@dataclass(frozen=True)
class SimSetting:
    """One simulation design: label, innovation law, shape and seed.

    ``v`` is only meaningful for the varying-sparsity design (it sets the
    number of dependent y columns to ``v**3 // 8``) and must be ``None``
    everywhere else.
    """

    label: SettingLabel
    innovation: Innovation = Innovation.NORMAL
    n: int = 100
    p: int = 50
    q: int = 50
    m: int = 3
    v: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "label", SettingLabel(self.label))
        object.__setattr__(self, "innovation", Innovation(self.innovation))
        for name in ("n", "p", "q", "m", "seed"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.p < 1 or self.q < 1:
            raise ValueError("p and q must be positive")
        if self.m < 1:
            raise ValueError("moving-average order m must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        if self.label in _NEEDS_SQUARE and self.p != self.q:
            raise ValueError(f"design {self.label.value!r} requires p == q")
        if self.label is SettingLabel.VARYING_SPARSITY:
            if self.v is None or not 2 <= int(self.v) <= 7:
                raise ValueError("varying-sparsity requires v in 2..7")
            object.__setattr__(self, "v", int(self.v))
        elif self.v is not None:
            raise ValueError(f"v is only valid for varying-sparsity, got {self.v!r}")

    def to_text(self):
        """Serialize as a plain ``key=value`` block (one field per line)."""
        lines = [
            f"label={self.label.value}",
            f"innovation={self.innovation.value}",
            f"n={self.n}",
            f"p={self.p}",
            f"q={self.q}",
            f"m={self.m}",
            f"v={'none' if self.v is None else self.v}",
            f"seed={self.seed}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        """Parse the :meth:`to_text` format (blank lines and # comments ok)."""
        fields = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {raw!r}")
            fields[key.strip()] = value.strip()
        unknown = set(fields) - {"label", "innovation", "n", "p", "q", "m", "v", "seed"}
        if unknown:
            raise ValueError(f"unknown setting keys: {sorted(unknown)}")
        missing = {"label", "n", "p", "q"} - set(fields)
        if missing:
            raise ValueError(f"missing setting keys: {sorted(missing)}")
        v = fields.get("v", "none")
        return cls(
            label=SettingLabel(fields["label"]),
            innovation=Innovation(fields.get("innovation", "normal")),
            n=int(fields["n"]),
            p=int(fields["p"]),
            q=int(fields["q"]),
            m=int(fields.get("m", "3")),
            v=None if v.lower() == "none" else int(v),
            seed=int(fields.get("seed", "0")),
        )


def standardized_innovations(rng, rows, cols, innovation):
    """Draw a rows×cols matrix of iid mean-0 variance-1 innovations.

    The chi-square variant squares a standard normal (a chi-square with
    one degree of freedom) and standardizes: (z^2 - 1) / sqrt(2).
    """
    innovation = Innovation(innovation)
    z = rng.standard_normal((rows, cols))
    if innovation is Innovation.NORMAL:
        return z
    return (z * z - 1.0) / math.sqrt(2.0)


def moving_average(innov, coeffs):
    """Windowed sums: out[:, i] = sum_t coeffs[t] * innov[:, i + 1 + t].

    ``innov`` has ``width + m`` columns for an output of ``width`` columns
    (coefficient vector of length m).  Column 0 of ``innov`` is never
    consumed; the window for output column i (0-based) is columns
    i+1 .. i+m.  Columns i and j therefore share innovations exactly when
    |i - j| < m.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    m = coeffs.shape[0]
    if innov.shape[1] < m + 1:
        raise ValueError("innovation matrix too narrow for the window")
    windows = sliding_window_view(innov[:, 1:], m, axis=1)
    return np.ascontiguousarray(windows @ coeffs)


def _ma_parts(setting):
    """Draw (sigma_x, sigma_y, e1, e2) in the fixed stream order."""
    rng = substream(setting.seed, TAG_DGP)
    sigma_x = rng.uniform(1.0, 2.0, setting.m)
    sigma_y = rng.uniform(0.5, 1.5, setting.m)
    e1 = standardized_innovations(rng, setting.n, setting.p + setting.m, setting.innovation)
    e2 = standardized_innovations(rng, setting.n, setting.q + setting.m, setting.innovation)
    return sigma_x, sigma_y, e1, e2


def gen_null(setting):
    """Two independent moving-average blocks (the size design).

    x columns are MA(m) series with U(1,2) coefficients, y columns MA(m)
    series with U(0.5,1.5) coefficients, over disjoint innovation
    matrices — so x and y are independent by construction while each
    block is m-dependent across columns.
    """
    if setting.label is not SettingLabel.NULL_MA:
        raise BadLabel(f"gen_null cannot build {setting.label.value!r}")
    sigma_x, sigma_y, e1, e2 = _ma_parts(setting)
    x = moving_average(e1, sigma_x)
    y = moving_average(e2, sigma_y)
    return DataPair(x, y)


@lru_cache(maxsize=None)
def _banded_cholesky(dim):
    """Lower Cholesky factor of the banded covariance, cached per dim.

    Diagonal sqrt(s) for 1-based index s; off-diagonal 0.3*(s*t)**0.25
    inside the |s-t| <= 3 band, zero outside.
    """
    idx = np.arange(1, dim + 1, dtype=np.float64)
    root = idx ** 0.25
    sigma = 0.3 * np.outer(root, root)
    lag = np.abs(np.subtract.outer(idx, idx))
    sigma[lag > 3] = 0.0
    np.fill_diagonal(sigma, np.sqrt(idx))
    factor = np.linalg.cholesky(sigma)
    factor.setflags(write=False)
    return factor


def _banded_normal(rng, n, dim):
    """n iid rows from N(0, banded sigma) of the given dimension."""
    if dim == 0:
        return np.empty((n, 0))
    return rng.standard_normal((n, dim)) @ _banded_cholesky(dim).T


def dependent_column_count(setting):
    """Number of y columns wired to x under this setting's design."""
    label = setting.label
    if label is SettingLabel.NULL_MA:
        return 0
    if label in (SettingLabel.NONSPARSE_1, SettingLabel.NONSPARSE_2):
        return setting.q
    if label in (SettingLabel.SPARSE_1, SettingLabel.SPARSE_2):
        return 3
    if label is SettingLabel.VARYING_SPARSITY:
        return setting.v ** 3 // 8  # floor((v/2)^3), exact in integers
    return setting.p // 9


def dependent_y_columns(setting):
    """0-based indices of the y columns that consume x values."""
    return tuple(range(dependent_column_count(setting)))


def _check_dims(setting, needed_p, needed_q):
    if setting.p < needed_p or setting.q < needed_q:
        raise DimensionTooSmall(
            f"design {setting.label.value!r} needs p >= {needed_p} and "
            f"q >= {needed_q}, got p={setting.p}, q={setting.q}"
        )


def gen_alternative(setting):
    """Generate one replicate of a dependence alternative.

    Moving-average designs (labels nonsparse-*/sparse-*): draw the null
    stream, form z = cos(x-side MA) and z* = sin(y-side MA), then

    * nonsparse-1: x = 0.2 cos(z), y = 0.2 sin(z) — every y column is
      driven by the same latent series as the matching x column;
    * nonsparse-2: x = z, y_j = 0.01 log(|x_j|^3) — noiseless;
    * sparse-1: x = z, y_j = 0.2 x_j - 0.4 x_{j+1} + 0.6 x_{j-1} + z*_j
      for j <= 3 (the j-1 term is dropped at j = 1 where it is
      undefined), y_j = z*_j otherwise;
    * sparse-2: x = z, y_j = 0.5 exp(x_j) + z*_j for j <= 3, z*_j after.

    Banded Gaussian designs: x rows iid N(0, banded sigma of dim p);
    the first d y columns are a*x_j^2 (varying-sparsity, d = v^3 // 8,
    a = 6.8 / {(log v)^0.4 sqrt(log(pq)/n)}) or 2*(-1)^j*x_j^2
    (signed-sparse, d = floor(p/9)) plus independent N(0, j^2) noise;
    the remaining q-d columns are an independent banded Gaussian block,
    elementwise squared for varying-sparsity and left as drawn for
    signed-sparse.
    """
    label = setting.label
    if label is SettingLabel.NULL_MA:
        raise BadLabel("gen_alternative cannot build the null design")

    if label in _MA_LABELS:
        sigma_x, sigma_y, e1, e2 = _ma_parts(setting)
        z = np.cos(moving_average(e1, sigma_x))
        zstar = np.sin(moving_average(e2, sigma_y))
        if label is SettingLabel.NONSPARSE_1:
            return DataPair(0.2 * np.cos(z), 0.2 * np.sin(z))
        if label is SettingLabel.NONSPARSE_2:
            x = z
            return DataPair(x, 0.01 * np.log(np.abs(x) ** 3))
        _check_dims(setting, 4, 4)
        x = z
        y = zstar.copy()
        if label is SettingLabel.SPARSE_1:
            y[:, 0] += 0.2 * x[:, 0] - 0.4 * x[:, 1]
            y[:, 1] += 0.2 * x[:, 1] - 0.4 * x[:, 2] + 0.6 * x[:, 0]
            y[:, 2] += 0.2 * x[:, 2] - 0.4 * x[:, 3] + 0.6 * x[:, 1]
        else:
            y[:, :3] += 0.5 * np.exp(x[:, :3])
        return DataPair(x, y)

    d = dependent_column_count(setting)
    if d < 1:
        raise DimensionTooSmall(
            f"design {setting.label.value!r} has no dependent columns at "
            f"p={setting.p} (needs p >= 9)"
        )
    if d > setting.p or d > setting.q:
        raise DimensionTooSmall(
            f"design needs {d} dependent columns but p={setting.p}, q={setting.q}"
        )
    rng = substream(setting.seed, TAG_DGP)
    x = _banded_normal(rng, setting.n, setting.p)
    noise = rng.standard_normal((setting.n, d)) * np.arange(1, d + 1)
    if label is SettingLabel.VARYING_SPARSITY:
        amp = 6.8 / (
            math.log(setting.v) ** 0.4
            * math.sqrt(math.log(setting.p * setting.q) / setting.n)
        )
        dep = amp * x[:, :d] ** 2 + noise
    else:
        signs = np.where(np.arange(1, d + 1) % 2 == 0, 2.0, -2.0)
        dep = signs * x[:, :d] ** 2 + noise
    rest = _banded_normal(rng, setting.n, setting.q - d)
    if label is SettingLabel.VARYING_SPARSITY:
        rest = rest ** 2
    return DataPair(x, np.hstack([dep, rest]))


def generate(setting):
    """Build the dataset for any setting label."""
    if setting.label is SettingLabel.NULL_MA:
        return gen_null(setting)
    return gen_alternative(setting)


__all__ = [
    "Innovation",
    "SettingLabel",
    "SimSetting",
    "dependent_column_count",
    "dependent_y_columns",
    "gen_alternative",
    "gen_null",
    "generate",
    "moving_average",
    "standardized_innovations",
]
