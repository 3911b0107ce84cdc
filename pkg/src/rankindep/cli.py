"""Command-line driver: ingest tables, run tests and studies, emit reports.

Six subcommands:

* ``test``       — one correlation kind + family on a CSV/TSV pair
* ``battery``    — the full kind × family roster on a CSV/TSV pair
* ``simulate``   — size/power study for a named synthetic design
* ``curve``      — power against the number of dependent columns
* ``subsample``  — rejection rates over random row subsamples
* ``oracle-check`` — fast statistics vs. brute-force U-statistic oracle

Exit codes: 0 success, 2 usage error, 3 data error (parse failures, shape
mismatches, ties, ...), 4 numeric error (degenerate permutation variance)
or an oracle-check failure.

All machine output is canonical: JSON with sorted keys, two-space indent,
shortest round-trip floats and a trailing newline; TSV with repr floats.
Identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from io import StringIO

import numpy as np

from . import __version__
from ._rng import TAG_ORACLE, substream
from .errors import (
    DataError,
    EmptyFile,
    NumericError,
    ParseError,
)
from .kernels import ARITY, KernelKind, brute_ustat_exact
from .paircorr import (
    CorrelationKind,
    bdy_taustar_pair,
    bkr_r_pair,
    hoeffding_d_pair,
    kendall_pair,
)
from .permute import PermutationPlan
from .dgp import SimSetting
from .ranks import DataPair, TiePolicy, rank_columns
from .sim import StudyConfig, power_curve, run_study, subsample_rejection
from .testsuite import (
    BatteryFailure,
    TestFamily,
    TestSpec,
    battery_specs,
    evaluate_specs,
    run_max_test,
    run_maxsum_test,
    run_sum_test,
)

_SCHEMA_VERSION = 1

#: short aliases accepted anywhere a correlation kind is named
KIND_ALIASES = {
    "rho": "spearman",
    "tau": "kendall",
    "d": "hoeffding",
    "r": "bkr",
    "tau*": "taustar",
}


def parse_kind(token):
    name = token.strip().lower()
    name = KIND_ALIASES.get(name, name)
    try:
        return CorrelationKind(name)
    except ValueError:
        valid = sorted({k.value for k in CorrelationKind} | set(KIND_ALIASES))
        raise ValueError(f"unknown kind {token!r}; choose from {valid}") from None


def parse_kind_list(tokens):
    if tokens.strip().lower() == "all":
        return tuple(CorrelationKind)
    kinds = tuple(parse_kind(t) for t in tokens.split(",") if t.strip())
    if not kinds:
        raise ValueError("empty kind list")
    return kinds


def parse_family_list(tokens):
    if tokens.strip().lower() == "all":
        return tuple(TestFamily)
    fams = tuple(TestFamily(t.strip().lower())
                 for t in tokens.split(",") if t.strip())
    if not fams:
        raise ValueError("empty family list")
    return fams


def parse_int_list(tokens, what):
    values = [int(t) for t in tokens.split(",") if t.strip()]
    if not values:
        raise ValueError(f"empty {what} list")
    return values


# --- table ingestion --------------------------------------------------------

def _split_line(line, delim):
    # csv module handles quoting; our tables are plain, but be tolerant
    return next(csv.reader(StringIO(line), delimiter=delim))


def _looks_like_header(cells):
    """Header iff no cell parses as a float (NaN and inf do parse)."""
    for cell in cells:
        try:
            float(cell)
            return False
        except ValueError:
            continue
    return True


def read_named_matrix(path, delimiter="auto", header="auto", block="x"):
    """Parse one delimited text file into (matrix, column names).

    Delimiter 'auto' picks tab when the first line contains one, else
    comma. Header 'auto' treats the first row as names exactly when none
    of its cells parses as a float. Every data cell must be a finite
    number; offenders raise ParseError with 1-based line and column.
    """
    with open(path, "r", encoding="utf-8") as handle:
        raw_lines = handle.read().splitlines()
    lines = [(i + 1, line) for i, line in enumerate(raw_lines) if line.strip()]
    if not lines:
        raise EmptyFile(f"{path}: no rows")

    if delimiter == "auto":
        delim = "\t" if "\t" in lines[0][1] else ","
    elif delimiter in ("comma", ","):
        delim = ","
    elif delimiter in ("tab", "\t"):
        delim = "\t"
    else:
        raise ValueError(f"unknown delimiter choice {delimiter!r}")

    rows = [(lineno, _split_line(text, delim)) for lineno, text in lines]
    first_cells = [c.strip() for c in rows[0][1]]
    if header == "auto":
        has_header = _looks_like_header(first_cells)
    elif header in ("yes", True):
        has_header = True
    elif header in ("no", False):
        has_header = False
    else:
        raise ValueError(f"unknown header choice {header!r}")

    if has_header:
        names = first_cells
        data_rows = rows[1:]
    else:
        names = None
        data_rows = rows

    if not data_rows:
        raise EmptyFile(f"{path}: header but no data rows")
    width = len(data_rows[0][1])
    matrix = np.empty((len(data_rows), width))
    for r, (lineno, cells) in enumerate(data_rows):
        if len(cells) != width:
            raise ParseError(
                f"{path}: row has {len(cells)} cells, expected {width}",
                line=lineno,
                col=min(len(cells), width) + 1,
            )
        for c, cell in enumerate(cells):
            text = cell.strip()
            try:
                value = float(text)
            except ValueError:
                raise ParseError(
                    f"{path}: not a number: {text!r}", line=lineno, col=c + 1
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"{path}: non-finite value {text!r}", line=lineno, col=c + 1
                )
            matrix[r, c] = value
    if names is None:
        names = [f"{block}{j + 1}" for j in range(width)]
    if len(names) != width:
        raise ParseError(
            f"{path}: header has {len(names)} names for {width} columns",
            line=rows[0][0],
            col=width,
        )
    return matrix, names


def ingest_csv_named(path_x, path_y, delimiter="auto", header="auto"):
    """Two files → (DataPair, x names, y names)."""
    x, x_names = read_named_matrix(path_x, delimiter, header, block="x")
    y, y_names = read_named_matrix(path_y, delimiter, header, block="y")
    return DataPair(x, y), x_names, y_names


def ingest_csv(path_x, path_y, delimiter="auto", header="auto"):
    """Two files → DataPair (row counts must agree)."""
    return ingest_csv_named(path_x, path_y, delimiter, header)[0]


# --- output helpers ---------------------------------------------------------

def canonical_json(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _invocation_hash(payload):
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _report_entry(report):
    entry = {
        "spec": report.spec.label,
        "statistic": report.statistic,
        "standardized": report.standardized,
        "p_value": report.p_value,
        "reject": report.reject,
    }
    if report.components:
        entry["component_p_values"] = {
            "max": report.components[0],
            "sum": report.components[1],
        }
    return entry


def _pretty_float(v):
    return f"{v:.4f}"


def _pretty_report(report):
    lines = [
        f"{report.spec.label}  (n={report.n}, p={report.p}, q={report.q})",
        f"  statistic     {_pretty_float(report.statistic)}",
        f"  standardized  {_pretty_float(report.standardized)}",
        f"  p-value       {_pretty_float(report.p_value)}",
        f"  reject        {'yes' if report.reject else 'no'}",
    ]
    if report.components:
        lines.insert(4, f"  p-max/p-sum   {_pretty_float(report.components[0])}"
                        f" / {_pretty_float(report.components[1])}")
    return "\n".join(lines) + "\n"


def _battery_tsv(results):
    lines = ["spec\tstatistic\tstandardized\tp_value\treject"]
    for item in results:
        if isinstance(item, BatteryFailure):
            lines.append(f"{item.spec.label}\tFAILED\tFAILED\tFAILED\t{item.error}")
        else:
            lines.append(
                f"{item.spec.label}\t{item.statistic!r}\t{item.standardized!r}"
                f"\t{item.p_value!r}\t{int(item.reject)}"
            )
    return "\n".join(lines) + "\n"


def _study_pretty(report):
    lines = [f"{'setting':24} {'spec':22} {'rate':>8} {'reps':>6}"]
    for cell in report.cells:
        lines.append(
            f"{cell.setting:24} {cell.spec:22} {_pretty_float(cell.rate):>8}"
            f" {cell.replications:>6}"
        )
    return "\n".join(lines) + "\n"


def _emit_study(report, fmt):
    if fmt == "json":
        return report.to_json()
    if fmt == "pretty":
        return _study_pretty(report)
    return report.to_tsv()


# --- subcommand implementations ---------------------------------------------

def _common_provenance(args, extra):
    payload = {
        "library_version": __version__,
        "command": args.command,
        "tie_policy": args.tie_policy,
        **extra,
    }
    payload["config_hash"] = _invocation_hash(payload)
    return payload


def _data_block(pair, x_names, y_names):
    return {
        "n": pair.n,
        "p": pair.p,
        "q": pair.q,
        "columns_x": list(x_names),
        "columns_y": list(y_names),
    }


def _cmd_test(args):
    pair, x_names, y_names = ingest_csv_named(
        args.x, args.y, args.delimiter, args.header
    )
    kind = parse_kind(args.kind)
    family = TestFamily(args.family)
    spec = TestSpec(
        kind=kind,
        family=family,
        alpha=args.alpha,
        adjusted=args.adjusted,
        plan=PermutationPlan(b_count=args.b, seed=args.seed),
    )
    runner = {
        TestFamily.MAX: run_max_test,
        TestFamily.SUM: run_sum_test,
        TestFamily.MAXSUM: run_maxsum_test,
    }[family]
    report = runner(pair, spec, TiePolicy(args.tie_policy))
    if args.format == "pretty":
        return _pretty_report(report), 0
    if args.format == "tsv":
        return _battery_tsv([report]), 0
    doc = {
        "schema_version": _SCHEMA_VERSION,
        "provenance": _common_provenance(args, {
            "kind": kind.value,
            "family": family.value,
            "alpha": args.alpha,
            "b": args.b,
            "seed": args.seed,
            "adjusted": args.adjusted,
        }),
        "data": _data_block(pair, x_names, y_names),
        "result": _report_entry(report),
    }
    return canonical_json(doc), 0


def _cmd_battery(args):
    pair, x_names, y_names = ingest_csv_named(
        args.x, args.y, args.delimiter, args.header
    )
    kinds = parse_kind_list(args.kinds)
    families = parse_family_list(args.families)
    specs = battery_specs(
        kinds, families, alpha=args.alpha,
        plan=PermutationPlan(b_count=args.b, seed=args.seed),
    )
    ranked = rank_columns(pair, TiePolicy(args.tie_policy))
    results = evaluate_specs(ranked, specs)
    if args.format == "tsv":
        return _battery_tsv(results), 0
    if args.format == "pretty":
        parts = []
        for item in results:
            if isinstance(item, BatteryFailure):
                parts.append(f"{item.spec.label}  FAILED: {item.error}\n")
            else:
                parts.append(_pretty_report(item))
        return "".join(parts), 0
    entries, failures = [], []
    for item in results:
        if isinstance(item, BatteryFailure):
            failures.append({"spec": item.spec.label, "error": item.error})
        else:
            entries.append(_report_entry(item))
    doc = {
        "schema_version": _SCHEMA_VERSION,
        "provenance": _common_provenance(args, {
            "kinds": [k.value for k in kinds],
            "families": [f.value for f in families],
            "alpha": args.alpha,
            "b": args.b,
            "seed": args.seed,
        }),
        "data": _data_block(pair, x_names, y_names),
        "results": entries,
        "failures": failures,
    }
    return canonical_json(doc), 0


def _study_specs(args):
    kinds = parse_kind_list(args.kinds)
    families = parse_family_list(args.families)
    return battery_specs(
        kinds, families, alpha=args.alpha,
        plan=PermutationPlan(b_count=args.b, seed=0),
    )


def _cmd_simulate(args):
    setting = SimSetting(
        label=args.setting,
        innovation=args.innovation,
        n=args.n,
        p=args.p,
        q=args.q,
        m=args.m,
        v=args.v,
    )
    cfg = StudyConfig(
        settings=(setting,),
        specs=_study_specs(args),
        replications=args.reps,
        base_seed=args.seed,
        worker_hint=args.workers,
    )
    return _emit_study(run_study(cfg), args.format), 0


def _cmd_curve(args):
    v_grid = parse_int_list(args.v_grid, "v-grid")
    base = SimSetting(
        label="varying-sparsity",
        innovation=args.innovation,
        n=args.n,
        p=args.p,
        q=args.q,
        m=args.m,
        v=v_grid[0],
    )
    report = power_curve(
        base,
        _study_specs(args),
        v_grid=v_grid,
        replications=args.reps,
        worker_hint=args.workers,
        base_seed=args.seed,
    )
    return _emit_study(report, args.format), 0


def _cmd_subsample(args):
    pair, _, _ = ingest_csv_named(args.x, args.y, args.delimiter, args.header)
    report = subsample_rejection(
        pair,
        parse_int_list(args.n_primes, "n-primes"),
        repeats=args.repeats,
        specs=_study_specs(args),
        seed=args.seed,
        tie_policy=TiePolicy(args.tie_policy),
    )
    return _emit_study(report, args.format), 0


_ORACLE_PAIR_FN = {
    KernelKind.KENDALL_TAU: kendall_pair,
    KernelKind.HOEFFDING_D: hoeffding_d_pair,
    KernelKind.BKR_R: bkr_r_pair,
    KernelKind.BDY_TAU_STAR: bdy_taustar_pair,
}


def _cmd_oracle_check(args):
    """Compare each fast pair statistic against exact brute-force values."""
    lines = []
    all_ok = True
    for kind in KernelKind:
        arity = ARITY[kind]
        worst = 0.0
        checked = 0
        for n in range(arity, args.max_n + 1):
            rng = substream(args.seed, TAG_ORACLE, n)
            for _ in range(args.pairs):
                rx = rng.permutation(n) + 1
                ry = rng.permutation(n) + 1
                fast = _ORACLE_PAIR_FN[kind](rx, ry)
                exact = float(brute_ustat_exact(kind, rx, ry))
                worst = max(worst, abs(fast - exact))
                checked += 1
        ok = worst <= args.tol
        all_ok = all_ok and ok
        lines.append(
            f"{kind.value}: {'PASS' if ok else 'FAIL'}"
            f" max|diff|={worst:.3e} over {checked} pairs"
            f" (n={arity}..{args.max_n})"
        )
    lines.append(f"oracle check: {'PASS' if all_ok else 'FAIL'}")
    return "\n".join(lines) + "\n", 0 if all_ok else 4


# --- argument parsing --------------------------------------------------------

def _add_io_flags(sub):
    sub.add_argument("--x", required=True, help="path to the first block (n×p)")
    sub.add_argument("--y", required=True, help="path to the second block (n×q)")
    sub.add_argument("--delimiter", choices=["auto", "comma", "tab"],
                     default="auto")
    sub.add_argument("--header", choices=["auto", "yes", "no"], default="auto")


def _add_common_flags(sub, default_format):
    sub.add_argument("--alpha", type=float, default=0.05,
                     help="significance level (default 0.05)")
    sub.add_argument("--b", type=int, default=50,
                     help="permutation draws for sum-type scale (default 50)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tie-policy", choices=[t.value for t in TiePolicy],
                     default="error")
    sub.add_argument("--format", choices=["json", "tsv", "pretty"],
                     default=default_format)
    sub.add_argument("--output", default=None,
                     help="write the report here instead of stdout")


def _add_roster_flags(sub):
    sub.add_argument("--kinds", default="all",
                     help="comma list of correlation kinds (default all)")
    sub.add_argument("--families", default="all",
                     help="comma list of test families (default all)")


def _add_design_flags(sub):
    sub.add_argument("--innovation", choices=["normal", "chisq1"],
                     default="normal")
    sub.add_argument("--n", type=int, default=100)
    sub.add_argument("--p", type=int, default=50)
    sub.add_argument("--q", type=int, default=50)
    sub.add_argument("--m", type=int, default=3)
    sub.add_argument("--reps", type=int, default=500)
    sub.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rankindep",
        description="Rank-based independence tests between two random vectors.",
    )
    parser.add_argument("--version", action="version",
                        version=f"rankindep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run one test on a CSV/TSV pair")
    _add_io_flags(t)
    t.add_argument("--kind", required=True,
                   help="spearman|kendall|hoeffding|bkr|taustar "
                        "(aliases: rho, tau, d, r, tau*)")
    t.add_argument("--family", required=True,
                   choices=[f.value for f in TestFamily])
    t.add_argument("--adjusted", action="store_true",
                   help="apply the finite-sample adjustment")
    _add_common_flags(t, "json")

    b = sub.add_parser("battery", help="run the kind × family roster")
    _add_io_flags(b)
    _add_roster_flags(b)
    _add_common_flags(b, "json")

    s = sub.add_parser("simulate", help="size/power study on a synthetic design")
    s.add_argument("--setting", required=True,
                   choices=["null-ma", "nonsparse-1", "nonsparse-2",
                            "sparse-1", "sparse-2", "varying-sparsity",
                            "signed-sparse"])
    s.add_argument("--v", type=int, default=None,
                   help="dependent-column knob (varying-sparsity only)")
    _add_design_flags(s)
    _add_roster_flags(s)
    _add_common_flags(s, "tsv")

    c = sub.add_parser("curve", help="power curve over the sparsity knob v")
    c.add_argument("--v-grid", default="2,3,4,5,6,7")
    _add_design_flags(c)
    _add_roster_flags(c)
    _add_common_flags(c, "tsv")

    u = sub.add_parser("subsample", help="rejection rates over row subsamples")
    _add_io_flags(u)
    u.add_argument("--n-primes", required=True,
                   help="comma list of subsample sizes")
    u.add_argument("--repeats", type=int, default=200)
    _add_roster_flags(u)
    _add_common_flags(u, "tsv")

    o = sub.add_parser("oracle-check",
                       help="verify fast statistics against the exact oracle")
    o.add_argument("--pairs", type=int, default=25,
                   help="random rank pairs per sample size (default 25)")
    o.add_argument("--max-n", type=int, default=7)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--tol", type=float, default=1e-12)
    o.add_argument("--output", default=None)
    return parser


_DISPATCH = {
    "test": _cmd_test,
    "battery": _cmd_battery,
    "simulate": _cmd_simulate,
    "curve": _cmd_curve,
    "subsample": _cmd_subsample,
    "oracle-check": _cmd_oracle_check,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if getattr(args, "alpha", None) is not None:
            if not 0.0 < args.alpha < 1.0:
                raise ValueError("--alpha must lie strictly between 0 and 1")
        text, code = _DISPATCH[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    output = getattr(args, "output", None)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
