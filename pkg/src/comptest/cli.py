"""
Command-line interface.

Subcommands::

    comptest test     run the four tests on two groups of count data
    comptest simulate run a size/power grid from a JSON config
    comptest permute  empirical size under random relabelling
    comptest filter   drop low-count taxa from a count table

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure (including failed simulation replications).
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .combine import CombinationWeights, run_all_tests
from .composition import clr_transform, filter_low_counts, impute_pseudo_count, to_relative_abundance
from .config import ConfigError, bundled_configs, load_config
from .distributions import RngStream
from .harness import default_threads, permutation_size_study, run_grid
from .maxtest import pooled_variances
from .tables import CountTable, DataError, align_columns, file_digest, read_count_csv, write_count_csv
from .twosample import METHODS, DegenerateColumnError, DegenerateVarianceError, TwoSampleClr

logger = logging.getLogger("comptest")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
REPORT_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunReport:
    """Everything needed to interpret and rerun one CLI invocation."""

    command: str
    params: dict
    results: list
    preprocessing: dict = field(default_factory=dict)
    seed: int = None
    inputs: dict = field(default_factory=dict)
    version: int = REPORT_VERSION
    software_version: str = __version__

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


# -- data loading ------------------------------------------------------------

def _load_groups(args):
    """Return (table1, table2, inputs) from two files or one file + labels."""
    inputs = {str(p): file_digest(p) for p in args.data}
    if len(args.data) == 2:
        if args.label_column:
            raise UsageError("--label-column needs a single input file")
        t1, _ = read_count_csv(args.data[0], args.transpose)
        t2, _ = read_count_csv(args.data[1], args.transpose)
        return t1, align_columns(t1, t2), inputs
    if len(args.data) != 1:
        raise UsageError("give two group files, or one file with --label-column")
    if not args.label_column:
        raise UsageError("a single input file needs --label-column")
    table, labels = read_count_csv(args.data[0], args.transpose, args.label_column)
    levels = args.groups.split(",") if args.groups else sorted(set(labels))
    if len(levels) != 2:
        raise DataError(f"need exactly two groups, found labels {sorted(set(labels))[:10]}"
                        if not args.groups else f"--groups needs two labels, got {args.groups!r}")
    labels = np.asarray(labels)
    for lv in levels:
        if not np.any(labels == lv):
            raise DataError(f"no sample has label {lv!r}")
    return table.select_rows(labels == levels[0]), table.select_rows(labels == levels[1]), inputs


def _preprocess(t1, t2, args):
    """Filter, impute, close and CLR-transform both groups with shared columns."""
    log = {"pseudo_count": args.pseudo_count, "min_count": args.min_count,
           "n_taxa_input": len(t1.col_ids), "dropped_low_count": [],
           "dropped_degenerate": []}
    col_ids = list(t1.col_ids)
    counts = np.vstack([t1.values, t2.values])
    if args.min_count:
        counts, kept = filter_low_counts(counts, args.min_count)
        log["dropped_low_count"] = [c for i, c in enumerate(col_ids) if i not in set(kept)]
        col_ids = [col_ids[i] for i in kept]
    clr = clr_transform(to_relative_abundance(impute_pseudo_count(counts, args.pseudo_count)))
    n1 = t1.values.shape[0]
    data = TwoSampleClr(clr[:n1], clr[n1:])
    if args.drop_degenerate:
        try:
            pooled_variances(data)
        except DegenerateColumnError as exc:
            keep = np.setdiff1d(np.arange(data.p), exc.columns)
            log["dropped_degenerate"] = [col_ids[i] for i in exc.columns]
            logger.warning("dropping %d zero-variance taxa: %s", len(exc.columns),
                           log["dropped_degenerate"][:10])
            col_ids = [col_ids[i] for i in keep]
            data = TwoSampleClr(data.x[:, keep], data.y[:, keep])
    log["n_taxa_tested"] = len(col_ids)
    log["n1"], log["n2"] = data.n1, data.n2
    return data, col_ids, log


def _weights(text):
    try:
        return CombinationWeights.parse(text)
    except ValueError as exc:
        raise UsageError(f"--weights: {exc}") from None


def _methods(selected):
    if not selected or "all" in selected:
        return METHODS
    return tuple(m for m in METHODS if m in selected)


# -- subcommands -------------------------------------------------------------

def cmd_test(args):
    t1, t2, inputs = _load_groups(args)
    data, col_ids, prep = _preprocess(t1, t2, args)
    weights = _weights(args.weights)
    results = run_all_tests(data, args.alpha, weights, _methods(args.test))
    if "max" in results:
        prep["max_argmax_taxon"] = col_ids[results["max"].info["argmax"]]
    report = RunReport(
        command="test",
        params=_params(args),
        results=[r.as_dict() for r in results.values()],
        preprocessing=prep,
        seed=args.seed,
        inputs=inputs,
    )
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    if args.json:
        print(report.to_json())
    else:
        print(f"n1={data.n1} n2={data.n2} p={data.p} alpha={args.alpha}")
        print(f"{'method':<8} {'statistic':>14} {'p_value':>12}  reject")
        for r in results.values():
            print(f"{r.method:<8} {r.statistic:>14.6g} {r.p_value:>12.4g}  {int(r.reject)}")
        if "max_argmax_taxon" in prep:
            print(f"largest standardized difference: {prep['max_argmax_taxon']}")
    return report


def cmd_simulate(args):
    cfgs = load_config(args.config, args.replications, args.seed)
    table = run_grid(cfgs, threads=args.threads)
    prefix = Path(args.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    Path(f"{prefix}.csv").write_text(table.to_csv(), encoding="utf-8")
    Path(f"{prefix}.json").write_text(table.to_json() + "\n", encoding="utf-8")
    for rec in table.records():
        cells = " ".join(f"{m}={rec[m]:.3f}" for m in table.methods)
        print(f"{rec['cov_family']:<12} {rec['framework']:<8} ({rec['n1']},{rec['n2']},{rec['p']}) "
              f"s={rec['sparsity_fraction']:<5} {cells}")
    if table.n_errors:
        logger.error("%d replication(s) failed", table.n_errors)
    return table


def cmd_permute(args):
    t1, t2, inputs = _load_groups(args)
    data, _, prep = _preprocess(t1, t2, args)
    n = data.n1 + data.n2
    splits = args.split or [f"{data.n1}:{data.n2}"]
    weights = _weights(args.weights)
    studies = []
    for text in splits:
        try:
            n1, n2 = (int(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"--split must look like n1:n2, got {text!r}") from None
        if n1 < 4 or n2 < 4 or n1 + n2 != n:
            raise UsageError(f"--split {text}: need n1, n2 >= 4 with n1 + n2 = {n}")
        rng = RngStream(args.seed).derive("permute", n1, n2)
        study = permutation_size_study(data, n1, n2, args.permutations, args.alpha, rng,
                                       weights, args.threads)
        studies.append(study)
        cells = " ".join(f"{m}={v:.3f}" for m, v in study.rates.items())
        print(f"({n1},{n2}) perms={args.permutations} {cells}")
    report = RunReport(command="permute", params=_params(args),
                       results=[s.to_dict() for s in studies], preprocessing=prep,
                       seed=args.seed, inputs=inputs)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n", encoding="utf-8")
    if any(s.errors for s in studies):
        logger.error("%d permutation(s) failed", sum(len(s.errors) for s in studies))
    return report


def cmd_filter(args):
    table, _ = read_count_csv(args.data, args.transpose)
    values, kept = filter_low_counts(table.values, args.min_count)
    dropped = [c for i, c in enumerate(table.col_ids) if i not in set(kept)]
    logger.info("kept %d of %d taxa with total count >= %g", len(kept), len(table.col_ids),
                args.min_count)
    if dropped:
        logger.info("dropped: %s", ", ".join(map(str, dropped)))
    out = CountTable(values, table.row_ids, [table.col_ids[i] for i in kept])
    if args.output in (None, "-"):
        write_count_csv(out, sys.stdout)
    else:
        write_count_csv(out, args.output)
    return out


# -- argument parsing --------------------------------------------------------

_REPLAY_SKIP = {"func", "command", "json", "report", "verbose"}


def _params(args):
    return {k: v for k, v in vars(args).items() if k not in _REPLAY_SKIP}


def argv_from_report(report):
    """Command line that reruns a recorded ``test`` or ``permute`` invocation."""
    p = report.params
    argv = [report.command, *p["data"]]
    flags = {"alpha": "--alpha", "pseudo_count": "--pseudo-count", "weights": "--weights",
             "min_count": "--min-count", "label_column": "--label-column",
             "groups": "--groups", "seed": "--seed", "permutations": "--permutations"}
    for key, flag in flags.items():
        if p.get(key) is not None:
            argv += [flag, str(p[key])]
    for key, flag in (("transpose", "--transpose"), ("drop_degenerate", "--drop-degenerate")):
        if p.get(key):
            argv.append(flag)
    for t in p.get("test") or []:
        argv += ["--test", t]
    for s in p.get("split") or []:
        argv += ["--split", s]
    return argv


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _alpha(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _add_data_args(sp):
    sp.add_argument("data", nargs="+", help="group-1 and group-2 CSV files, or one CSV "
                    "with --label-column")
    sp.add_argument("--label-column", help="column holding group labels (single-file input)")
    sp.add_argument("--groups", help="the two label values to compare, as 'A,B'")
    sp.add_argument("--transpose", action="store_true", help="input has taxa in rows")
    sp.add_argument("--pseudo-count", type=float, default=0.5)
    sp.add_argument("--min-count", type=float, default=0,
                    help="drop taxa whose pooled total count is below this")
    sp.add_argument("--drop-degenerate", action="store_true",
                    help="drop zero-variance taxa instead of failing")
    sp.add_argument("--alpha", type=_alpha, default=0.05)
    sp.add_argument("--weights", default="0.5:0.5", help="Cauchy weights wM:wQ")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report", help="write the JSON run report here")


def build_parser():
    parser = _Parser(prog="comptest", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("test", help="two-sample mean tests on count data")
    _add_data_args(sp)
    sp.add_argument("--test", action="append", choices=[*METHODS, "all"],
                    help="method to report (repeatable, default all)")
    sp.add_argument("--json", action="store_true", help="print the report as JSON")
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("simulate", help="Monte Carlo size/power table")
    sp.add_argument("config", help=f"JSON config path or bundled name ({', '.join(bundled_configs())})")
    sp.add_argument("-o", "--output", default="rejection_table",
                    help="output prefix; writes PREFIX.csv and PREFIX.json")
    sp.add_argument("--replications", type=_positive_int)
    sp.add_argument("--seed", type=int, help="override the master seed")
    sp.add_argument("--threads", type=_positive_int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("permute", help="empirical size by label permutation")
    _add_data_args(sp)
    sp.add_argument("--permutations", type=int, default=1000)
    sp.add_argument("--split", action="append", help="group sizes n1:n2 (repeatable)")
    sp.add_argument("--threads", type=_positive_int)
    sp.set_defaults(func=cmd_permute)

    sp = sub.add_parser("filter", help="drop low-count taxa")
    sp.add_argument("data")
    sp.add_argument("--min-count", type=float, default=10)
    sp.add_argument("--transpose", action="store_true")
    sp.add_argument("-o", "--output", help="output CSV (default stdout)")
    sp.set_defaults(func=cmd_filter)
    return parser


def main(argv=None):
    logging.basicConfig(format="comptest: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
        logger.setLevel(logging.INFO if args.verbose or args.command == "filter" else logging.WARNING)
        if getattr(args, "threads", "unset") is None:
            args.threads = default_threads()
        if args.command == "permute" and args.permutations < 1:
            raise UsageError(f"--permutations must be >= 1, got {args.permutations}")
        result = args.func(args)
    except UsageError as exc:
        print(f"comptest: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"comptest: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateColumnError as exc:
        print(f"comptest: data error: {exc} (use --drop-degenerate to remove them)",
              file=sys.stderr)
        return EXIT_DATA
    except DegenerateVarianceError as exc:
        print(f"comptest: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ValueError, OSError) as exc:
        print(f"comptest: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.command == "simulate" and result.n_errors:
        return EXIT_NUMERIC
    if args.command == "permute" and any(s["errors"] for s in result.results):
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
