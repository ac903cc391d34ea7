"""Command-line entry point.

Subcommands::

    featurize   profile one dataset (15 features, JSON or CSV)
    gen-corpus  write the 12-dataset synthetic demonstration corpus
    run         execute a (datasets x grid) campaign into an experiment table
    recommend   rank classifiers for a new dataset from an experiment table
    evaluate    leave-one-dataset-out quality report for both strategies
    agreement   3x3 F-score / p-value agreement matrix of a table

Exit codes: 0 success, 1 domain failure (empty table, duplicate keys, ...),
2 usage or I/O failure.  Human-readable output goes to stdout, diagnostics
to stderr.  ``METAREC_SEED`` provides the seed when ``--seed`` is omitted.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .classifiers import default_grid, load_grid
from .corpus import generate_corpus
from .data import DatasetError, load_dataset, split_one_vs_one
from .evaluate import BANDS, agreement_matrix, leave_one_dataset_out
from .features import FEATURE_NAMES, featurize
from .recommend import recommend
from .significance import DEFAULT_K
from .store import TableFormatError, load_table, run_experiments, save_report, save_table

logger = logging.getLogger("metarec")

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_SEED = 7


def _seed_default(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("METAREC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SystemExit(f"METAREC_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metarec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"metarec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="profile one dataset")
    p.add_argument("dataset", help="CSV path (a .json manifest sidecar is honored)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, help="write to file instead of stdout")

    p = sub.add_parser("gen-corpus", help="write the synthetic corpus")
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("run", help="run a benchmark campaign")
    p.add_argument("manifests", nargs="+", help="dataset CSV paths (multiclass inputs are split one-vs-one)")
    p.add_argument("--out", type=Path, required=True, help="experiment table CSV to write or append to")
    p.add_argument("--grid", type=Path, help="JSON grid file; default: the shipped grid")
    p.add_argument("--k", type=int, default=DEFAULT_K, help="permutation replicates (default %(default)s)")
    p.add_argument("--seed", type=int, default=None, help="campaign seed (default METAREC_SEED or 7)")
    p.add_argument("--jobs", type=int, default=1, help="parallel pair evaluations")
    p.add_argument("--report", type=Path, help="write the JSON run report here")
    p.add_argument(
        "--keep-null-distribution",
        action="store_true",
        help="retain permuted error vectors in the run report",
    )

    p = sub.add_parser("recommend", help="rank classifiers for a new dataset")
    p.add_argument("dataset", help="CSV path of the dataset to be classified")
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--strategy", choices=("fscore", "pvalue"), default="pvalue")
    p.add_argument("--neighbors", type=int, default=5)
    p.add_argument("--top-per-neighbor", type=int, default=2)
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("evaluate", help="leave-one-dataset-out quality report")
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--strategy", choices=("fscore", "pvalue", "both"), default="both")
    p.add_argument("--neighbors", type=int, default=5)
    p.add_argument("--top-per-neighbor", type=int, default=2)
    p.add_argument("--out-dir", type=Path, help="write report JSON and plot-ready CSV series here")
    p.add_argument("--json", action="store_true", help="print the report as JSON")

    p = sub.add_parser("agreement", help="F-score vs p-value agreement matrix")
    p.add_argument("--table", type=Path, required=True)
    p.add_argument("--json", action="store_true")

    return parser


def _cmd_featurize(args) -> int:
    try:
        vector = featurize(load_dataset(args.dataset))
    except DatasetError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    if args.format == "json":
        text = json.dumps(vector.to_dict(), indent=2) + "\n"
    else:
        values = vector.to_dict()
        text = ",".join(FEATURE_NAMES) + "\n" + ",".join(repr(values[n]) for n in FEATURE_NAMES) + "\n"
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_gen_corpus(args) -> int:
    paths = generate_corpus(args.out_dir, seed=_seed_default(args.seed))
    for path in paths:
        print(path)
    return EXIT_OK


def _load_campaign_datasets(manifests: list[str]):
    datasets = []
    for manifest in manifests:
        ds = load_dataset(manifest)
        if ds.is_binary():
            datasets.append(ds)
        else:
            children = split_one_vs_one(ds)
            logger.info("split %s into %d binary datasets", ds.id, len(children))
            datasets.extend(children)
    return datasets


def _cmd_run(args) -> int:
    seed = _seed_default(args.seed)
    try:
        datasets = _load_campaign_datasets(args.manifests)
        grid = load_grid(args.grid) if args.grid else default_grid()
        table, report = run_experiments(
            datasets,
            grid,
            k=args.k,
            seed=seed,
            jobs=args.jobs,
            keep_null=args.keep_null_distribution,
        )
    except (DatasetError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    if not table.rows:
        logger.error("campaign produced zero rows (%d skipped)", len(report.skipped))
        return EXIT_DOMAIN
    try:
        save_table(table, args.out, append=args.out.exists())
    except TableFormatError as exc:
        logger.error("%s", exc)
        return EXIT_DOMAIN
    if args.report:
        save_report(report, args.report)
    print(f"wrote {len(table.rows)} rows to {args.out} ({len(report.skipped)} pairs skipped)")
    return EXIT_OK


def _cmd_recommend(args) -> int:
    try:
        table = load_table(args.table)
        ds = load_dataset(args.dataset)
    except (TableFormatError, DatasetError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    if not table.rows:
        logger.error("experiment table %s is empty", args.table)
        return EXIT_DOMAIN
    rec = recommend(
        table,
        featurize(ds),
        strategy=args.strategy,
        neighbors=args.neighbors,
        top_per_neighbor=args.top_per_neighbor,
        exclude_id=ds.id,
    )
    if args.json:
        print(json.dumps(rec.to_json_dict(), indent=2))
        return EXIT_OK
    print(f"strategy: {rec.strategy}")
    print("neighbors:")
    for dataset_id, distance in rec.neighbors:
        print(f"  {dataset_id}  (distance {distance:.4f})")
    print("ranking:")
    for position, (classifier_id, score) in enumerate(rec.ranked, start=1):
        print(f"  {position:2d}. {classifier_id}  score={score:.4f}")
    return EXIT_OK


def _write_eval_series(report, out_dir: Path) -> None:
    prefix = out_dir / f"lodo_{report.strategy}"
    with open(f"{prefix}_histogram.csv", "w", encoding="utf-8") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, count in report.histogram:
            fh.write(f"{lo!r},{hi!r},{count}\n")
    with open(f"{prefix}_cdf.csv", "w", encoding="utf-8") as fh:
        fh.write("nrank,cum_fraction\n")
        for x, y in report.cdf:
            fh.write(f"{x!r},{y!r}\n")


def _print_agreement(matrix) -> None:
    print("agreement matrix (rows: F-score band, columns: p-value band)")
    header = "          " + "".join(f"{band:>18s}" for band in BANDS)
    print(header)
    for f_band in BANDS:
        cells = "".join(
            f"{matrix.counts[(f_band, p_band)]:>8d} ({matrix.percentages[(f_band, p_band)]:4.1f}%)"
            for p_band in BANDS
        )
        print(f"{f_band:>8s}  {cells}")


def _cmd_evaluate(args) -> int:
    try:
        table = load_table(args.table)
    except TableFormatError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    if len(table.dataset_ids()) < 2:
        logger.error("evaluation needs at least 2 datasets in the table")
        return EXIT_DOMAIN
    strategies = ("fscore", "pvalue") if args.strategy == "both" else (args.strategy,)
    reports = [
        leave_one_dataset_out(table, s, neighbors=args.neighbors, top_per_neighbor=args.top_per_neighbor)
        for s in strategies
    ]
    matrix = agreement_matrix(table)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "strategies": {r.strategy: r.to_json_dict() for r in reports},
            "agreement": matrix.to_json_dict(),
        }
        (args.out_dir / "eval_report.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        for report in reports:
            _write_eval_series(report, args.out_dir)
    if args.json:
        print(
            json.dumps(
                {
                    "strategies": {r.strategy: r.to_json_dict() for r in reports},
                    "agreement": matrix.to_json_dict(),
                },
                indent=2,
            )
        )
        return EXIT_OK
    for report in reports:
        print(f"strategy={report.strategy}: AUC={report.auc:.4f} mean_nrank={report.mean_nrank:.4f} "
              f"({len(report.records)} datasets)")
    _print_agreement(matrix)
    return EXIT_OK


def _cmd_agreement(args) -> int:
    try:
        table = load_table(args.table)
    except TableFormatError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    matrix = agreement_matrix(table)
    if args.json:
        print(json.dumps(matrix.to_json_dict(), indent=2))
    else:
        _print_agreement(matrix)
    return EXIT_OK


_COMMANDS = {
    "featurize": _cmd_featurize,
    "gen-corpus": _cmd_gen_corpus,
    "run": _cmd_run,
    "recommend": _cmd_recommend,
    "evaluate": _cmd_evaluate,
    "agreement": _cmd_agreement,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
