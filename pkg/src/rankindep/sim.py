"""Monte Carlo study runner: size/power tables, power curves, subsampling.

A study is a grid (settings × specs × replications).  Every replication
cell derives its data seed as ``mix64(base_seed, setting_index, rep)``
and its permutation-plan seed as ``mix64(cell_seed, plan_tag)``, so a
cell's outcome is a pure function of the study config — cells can run
in any order, on any number of workers, and the report comes out
byte-identical.

Runtime is recorded per cell but excluded from serialization by default
(``to_json(include_timing=True)`` opts in), because wall-clock time is
the one field that would break replay byte-identity.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, replace
from multiprocessing import get_context

from ._rng import TAG_PLAN, TAG_SUBSAMPLE, mix64, substream
from .dgp import SettingLabel, SimSetting, generate
from .errors import BadLabel, RankIndepError, SubsampleTooLarge
from .ranks import DataPair, TiePolicy, rank_columns
from .testsuite import BatteryFailure, TestSpec, evaluate_specs

#: environment variable that overrides ``StudyConfig.worker_hint``
WORKER_ENV = "RANK_INDEP_THREADS"

_SCHEMA_VERSION = 1


def _setting_display(setting):
    """TSV/JSON label for a setting (v spelled out so curves stay distinct)."""
    if setting.label is SettingLabel.VARYING_SPARSITY:
        return f"{setting.label.value}-v{setting.v}"
    return setting.label.value


@dataclass(frozen=True)
class StudyConfig:
    """A full study: which designs, which tests, how many replications."""

    settings: tuple
    specs: tuple
    replications: int = 500
    base_seed: int = 0
    worker_hint: int = 1

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(self.settings))
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.settings:
            raise ValueError("a study needs at least one setting")
        if not self.specs:
            raise ValueError("a study needs at least one test spec")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not 0 <= int(self.base_seed) < 2 ** 64:
            raise ValueError("base_seed must fit in 64 bits")
        if self.worker_hint < 1:
            raise ValueError("worker_hint must be >= 1")

    def config_hash(self):
        """sha256 over the result-determining fields (worker_hint excluded)."""
        payload = {
            "base_seed": self.base_seed,
            "replications": self.replications,
            "settings": [s.to_text() for s in self.settings],
            "specs": [
                {"label": sp.label, "alpha": sp.alpha, "b": sp.plan.b_count}
                for sp in self.specs
            ],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CellResult:
    """Tally for one setting × spec pair across all replications."""

    setting: str
    spec: str
    rejections: int
    failures: int
    replications: int
    mean_runtime: float

    @property
    def rate(self):
        return self.rejections / self.replications


@dataclass(frozen=True)
class StudyReport:
    """Study output: one CellResult per setting × spec, plus provenance."""

    cells: tuple
    config_hash: str
    base_seed: int
    replications: int

    def to_tsv(self):
        """One row per setting × spec; floats in shortest repr form."""
        lines = ["setting\tspec\trate\treps"]
        for cell in self.cells:
            lines.append(
                f"{cell.setting}\t{cell.spec}\t{cell.rate!r}\t{cell.replications}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self, include_timing=False):
        """Canonical JSON: sorted keys, 2-space indent, trailing newline.

        Timing is opt-in so that default output is byte-identical across
        reruns and worker counts.
        """
        cells = []
        for cell in self.cells:
            entry = {
                "setting": cell.setting,
                "spec": cell.spec,
                "rate": cell.rate,
                "rejections": cell.rejections,
                "failures": cell.failures,
                "replications": cell.replications,
            }
            if include_timing:
                entry["mean_runtime"] = cell.mean_runtime
            cells.append(entry)
        doc = {
            "schema_version": _SCHEMA_VERSION,
            "base_seed": self.base_seed,
            "replications": self.replications,
            "config_hash": self.config_hash,
            "cells": cells,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def rate_of(self, setting_label, spec_label):
        """Lookup helper for tests and tables."""
        for cell in self.cells:
            if cell.setting == setting_label and cell.spec == spec_label:
                return cell.rate
        raise KeyError(f"no cell ({setting_label!r}, {spec_label!r})")


def resolve_workers(worker_hint):
    """Worker count: the env override wins over the config hint."""
    raw = os.environ.get(WORKER_ENV)
    if raw is None:
        return int(worker_hint)
    value = int(raw)
    if value < 1:
        raise ValueError(f"{WORKER_ENV} must be a positive integer, got {raw!r}")
    return value


def _run_cell(task):
    """Evaluate every spec (and plugin) on one replication's dataset.

    Returns plain picklable tuples so worker results can be reduced
    deterministically: (setting_idx, rep_idx, outcomes, elapsed) where
    outcomes is a list of (rejected, error-or-None) aligned with
    specs + plugins.
    """
    setting_idx, setting, specs, plugins, rep_idx, cell_seed = task
    started = time.perf_counter()
    outcomes = []
    try:
        data = generate(replace(setting, seed=cell_seed))
        ranked = rank_columns(data, TiePolicy.ERROR)
    except RankIndepError as exc:
        message = f"{type(exc).__name__}: {exc}"
        outcomes = [(False, message)] * (len(specs) + len(plugins))
        return setting_idx, rep_idx, outcomes, time.perf_counter() - started

    plan_seed = mix64(cell_seed, TAG_PLAN)
    cell_specs = [
        replace(spec, plan=replace(spec.plan, seed=plan_seed)) for spec in specs
    ]
    for result in evaluate_specs(ranked, cell_specs):
        if isinstance(result, BatteryFailure):
            outcomes.append((False, result.error))
        else:
            outcomes.append((bool(result.reject), None))
    for _, test_fn in plugins:
        try:
            outcomes.append((bool(test_fn(data)), None))
        except RankIndepError as exc:
            outcomes.append((False, f"{type(exc).__name__}: {exc}"))
    return setting_idx, rep_idx, outcomes, time.perf_counter() - started


def run_study(cfg, external_tests=()):
    """Run the full grid and tally rejections per setting × spec.

    ``external_tests`` is the plug-in point for tests that are not part
    of this library: an iterable of (label, callable) where the callable
    maps a DataPair to a reject/accept bool.  Callables must be
    picklable (module-level functions) when more than one worker is
    used.  Per-cell errors are recorded as failures and the study
    continues.
    """
    plugins = tuple(external_tests)
    tasks = [
        (si, setting, cfg.specs, plugins, ri, mix64(cfg.base_seed, si, ri))
        for si, setting in enumerate(cfg.settings)
        for ri in range(cfg.replications)
    ]
    workers = resolve_workers(cfg.worker_hint)
    if workers == 1:
        raw = [_run_cell(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with get_context("spawn").Pool(workers) as pool:
            raw = pool.map(_run_cell, tasks, chunksize=chunk)

    labels = [sp.label for sp in cfg.specs] + [name for name, _ in plugins]
    n_set = len(cfg.settings)
    reject_counts = [[0] * len(labels) for _ in range(n_set)]
    fails = [[0] * len(labels) for _ in range(n_set)]
    elapsed = [0.0] * n_set
    for setting_idx, _rep_idx, outcomes, seconds in sorted(raw, key=lambda t: t[:2]):
        elapsed[setting_idx] += seconds
        for col, (rejected, error) in enumerate(outcomes):
            if error is not None:
                fails[setting_idx][col] += 1
            elif rejected:
                reject_counts[setting_idx][col] += 1

    cells = []
    for si, setting in enumerate(cfg.settings):
        mean_runtime = elapsed[si] / cfg.replications
        for col, label in enumerate(labels):
            cells.append(
                CellResult(
                    setting=_setting_display(setting),
                    spec=label,
                    rejections=reject_counts[si][col],
                    failures=fails[si][col],
                    replications=cfg.replications,
                    mean_runtime=mean_runtime,
                )
            )
    return StudyReport(
        cells=tuple(cells),
        config_hash=cfg.config_hash(),
        base_seed=cfg.base_seed,
        replications=cfg.replications,
    )


def power_curve(base, specs, v_grid, replications, worker_hint=1, base_seed=None):
    """One study per v of the varying-sparsity design, long-format output.

    Rows are labeled ``varying-sparsity-v{v}`` so the table plots
    directly as rate against the number of dependent columns.
    """
    if base.label is not SettingLabel.VARYING_SPARSITY:
        raise BadLabel("power_curve needs a varying-sparsity base setting")
    v_list = sorted({int(v) for v in v_grid})
    if not v_list:
        raise ValueError("v_grid must not be empty")
    settings = [replace(base, v=v) for v in v_list]
    cfg = StudyConfig(
        settings=settings,
        specs=specs,
        replications=replications,
        base_seed=base.seed if base_seed is None else base_seed,
        worker_hint=worker_hint,
    )
    return run_study(cfg)


def subsample_rejection(data, n_primes, repeats, specs, seed=0,
                        tie_policy=TiePolicy.ERROR):
    """Rejection fractions over random row subsamples of a fixed dataset.

    For repeat r the row subset is the first n' entries of
    ``substream(seed, subsample_tag, r).permutation(n)`` — the same
    permutation serves every n', so subsets are nested within a repeat
    and n' = n reproduces the full dataset exactly.  Specs run with
    their own permutation plans unchanged (the seed here only drives row
    selection), so decisions at n' = n are identical across repeats.
    """
    n_list = [int(v) for v in n_primes]
    if not n_list:
        raise ValueError("n_primes must not be empty")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    specs = tuple(specs)
    if not specs:
        raise ValueError("subsample run needs at least one test spec")
    for n_prime in n_list:
        if n_prime > data.n:
            raise SubsampleTooLarge(
                f"requested n'={n_prime} from only {data.n} rows"
            )
        if n_prime < 2:
            raise ValueError("subsample size must be >= 2")

    perms = [
        substream(seed, TAG_SUBSAMPLE, r).permutation(data.n)
        for r in range(repeats)
    ]
    cells = []
    for n_prime in n_list:
        tallies = [[0, 0] for _ in specs]  # [rejections, failures]
        started = time.perf_counter()
        for perm in perms:
            rows = perm[:n_prime]
            subset = DataPair(data.x[rows], data.y[rows])
            ranked = rank_columns(subset, tie_policy)
            for col, result in enumerate(evaluate_specs(ranked, specs)):
                if isinstance(result, BatteryFailure):
                    tallies[col][1] += 1
                elif result.reject:
                    tallies[col][0] += 1
        mean_runtime = (time.perf_counter() - started) / repeats
        for col, spec in enumerate(specs):
            cells.append(
                CellResult(
                    setting=f"subsample-n{n_prime}",
                    spec=spec.label,
                    rejections=tallies[col][0],
                    failures=tallies[col][1],
                    replications=repeats,
                    mean_runtime=mean_runtime,
                )
            )
    payload = {
        "kind": "subsample",
        "data_sha": hashlib.sha256(
            data.x.tobytes() + data.y.tobytes()
        ).hexdigest(),
        "n_primes": n_list,
        "repeats": repeats,
        "seed": seed,
        "specs": [
            {"label": sp.label, "alpha": sp.alpha, "b": sp.plan.b_count}
            for sp in specs
        ],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return StudyReport(
        cells=tuple(cells),
        config_hash=hashlib.sha256(blob.encode("utf-8")).hexdigest(),
        base_seed=seed,
        replications=repeats,
    )


__all__ = [
    "CellResult",
    "StudyConfig",
    "StudyReport",
    "WORKER_ENV",
    "power_curve",
    "resolve_workers",
    "run_study",
    "subsample_rejection",
]
