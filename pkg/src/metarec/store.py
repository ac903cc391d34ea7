"""The experiment table: build, persist, and query prior-run records.

One row per (dataset, classifier config) execution: the dataset's 15
features, the classifier id, and the measured F-score / permutation p-value.
The on-disk format is a single CSV file whose header is a stability
contract::

    dataset_id,<15 feature names>,classifier_id,f_score,p_value,
    error_original,k_permutations,seed,timestamp,toolkit_version

Campaigns are reproducible end to end: each (dataset, classifier) pair gets
a seed derived by hashing (dataset_id, classifier_id, campaign seed), rows
are merged in sorted order regardless of worker scheduling, and the stamped
timestamp is itself derived from the campaign seed so identical campaigns
produce byte-identical files (pass ``run_timestamp`` to record wall-clock
time instead, at the cost of rerun identity).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from . import __version__
from .classifiers import ClassifierConfig
from .data import Dataset
from .features import FEATURE_NAMES, MetaFeatureVector, featurize
from .significance import DEFAULT_K, default_protocol, permutation_test, positive_class_of

TABLE_HEADER: tuple[str, ...] = (
    ("dataset_id",) + FEATURE_NAMES + (
        "classifier_id",
        "f_score",
        "p_value",
        "error_original",
        "k_permutations",
        "seed",
        "timestamp",
        "toolkit_version",
    )
)

_TIMESTAMP_EPOCH = datetime(2000, 1, 1, tzinfo=timezone.utc)


class TableFormatError(ValueError):
    """Raised when an experiment-table file violates the schema."""


@dataclass(frozen=True)
class ExperimentRow:
    dataset_id: str
    meta_features: MetaFeatureVector
    classifier_id: str
    f_score: float
    p_value: float
    error_original: float
    k_permutations: int
    seed: int
    timestamp: str
    toolkit_version: str

    def __post_init__(self) -> None:
        if not (math.isfinite(self.f_score) and 0.0 <= self.f_score <= 1.0):
            raise TableFormatError(f"f_score out of range: {self.f_score!r}")
        if not (math.isfinite(self.p_value) and 0.0 < self.p_value <= 1.0):
            raise TableFormatError(f"p_value out of (0,1]: {self.p_value!r}")
        if not (math.isfinite(self.error_original) and 0.0 <= self.error_original <= 1.0):
            raise TableFormatError(f"error_original out of range: {self.error_original!r}")
        if self.k_permutations < 1:
            raise TableFormatError(f"k_permutations must be >= 1: {self.k_permutations}")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.dataset_id, self.classifier_id, self.seed)


@dataclass(frozen=True)
class ExperimentTable:
    rows: tuple[ExperimentRow, ...]
    feature_order: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self) -> None:
        if self.feature_order != FEATURE_NAMES:
            raise TableFormatError(f"unsupported feature order: {self.feature_order}")
        seen: dict[tuple, int] = {}
        per_dataset: dict[str, MetaFeatureVector] = {}
        for i, row in enumerate(self.rows):
            if row.key in seen:
                raise TableFormatError(f"duplicate experiment key {row.key}")
            seen[row.key] = i
            existing = per_dataset.get(row.dataset_id)
            if existing is None:
                per_dataset[row.dataset_id] = row.meta_features
            elif existing != row.meta_features:
                raise TableFormatError(f"dataset {row.dataset_id!r} carries conflicting meta-features")

    def dataset_ids(self) -> list[str]:
        return sorted({row.dataset_id for row in self.rows})

    def features_of(self, dataset_id: str) -> MetaFeatureVector:
        for row in self.rows:
            if row.dataset_id == dataset_id:
                return row.meta_features
        raise KeyError(dataset_id)

    def without_dataset(self, dataset_id: str) -> "ExperimentTable":
        return ExperimentTable(rows=tuple(r for r in self.rows if r.dataset_id != dataset_id))


def rows_for_dataset(table: ExperimentTable, dataset_id: str) -> list[ExperimentRow]:
    """All rows for one dataset in stable (classifier_id, seed) order."""
    rows = [r for r in table.rows if r.dataset_id == dataset_id]
    rows.sort(key=lambda r: (r.classifier_id, r.seed))
    return rows


@dataclass
class RunReport:
    """Machine-readable campaign summary: what ran, what was skipped."""

    campaign_seed: int
    k_permutations: int
    grid_ids: list[str]
    datasets: list[dict] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    rows_written: int = 0
    null_distributions: dict[str, list[float]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "campaign_seed": self.campaign_seed,
            "k_permutations": self.k_permutations,
            "grid_ids": self.grid_ids,
            "datasets": self.datasets,
            "skipped": self.skipped,
            "rows_written": self.rows_written,
        }
        if self.null_distributions:
            out["null_distributions"] = self.null_distributions
        return out


def pair_seed(dataset_id: str, classifier_id: str, campaign_seed: int) -> int:
    """Per-pair seed from a stable hash of (dataset_id, classifier_id, seed)."""
    digest = hashlib.sha256(f"{dataset_id}\x1f{classifier_id}\x1f{campaign_seed}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def campaign_timestamp(campaign_seed: int) -> str:
    """Deterministic UTC stamp derived from the campaign seed.

    A wall-clock stamp would make identical campaigns produce different
    files; this keeps the reproducibility contract while remaining a valid
    instant.
    """
    instant = _TIMESTAMP_EPOCH + timedelta(seconds=campaign_seed % (400 * 365 * 86400))
    return instant.strftime("%Y-%m-%dT%H:%M:%SZ")


def run_experiments(
    datasets: list[Dataset],
    grid: list[ClassifierConfig],
    k: int = DEFAULT_K,
    seed: int = 7,
    jobs: int = 1,
    run_timestamp: str | None = None,
    keep_null: bool = False,
) -> tuple[ExperimentTable, RunReport]:
    """Run the full (dataset x config) campaign and collect the table.

    Per-pair failures are isolated: they appear in the report's ``skipped``
    list and never abort the run.  Results are merged in sorted
    (dataset_id, classifier_id) order, so the output is independent of
    ``jobs``.
    """
    if not datasets or not grid:
        raise ValueError("need at least one dataset and one grid entry")
    ids = [ds.id for ds in datasets]
    if len(set(ids)) != len(ids):
        raise ValueError("dataset ids must be distinct")
    for ds in datasets:
        if not ds.is_binary():
            raise ValueError(f"dataset {ds.id!r} is not binary; split it first")

    timestamp = run_timestamp if run_timestamp is not None else campaign_timestamp(seed)
    report = RunReport(campaign_seed=seed, k_permutations=k, grid_ids=[c.id for c in grid])

    features: dict[str, MetaFeatureVector] = {}
    ordered = sorted(datasets, key=lambda d: d.id)
    for ds in ordered:
        features[ds.id] = featurize(ds)
        report.datasets.append(
            {
                "dataset_id": ds.id,
                "n": ds.n,
                "m": ds.m,
                "classes": list(ds.class_values),
                "positive_class": positive_class_of(ds),
                "protocol": "loocv" if ds.n <= 200 else "kfold10",
            }
        )

    tasks = []
    for ds in ordered:
        for config in grid:
            if config.requires_all_numeric and ds.has_categorical():
                report.skipped.append(
                    {"dataset_id": ds.id, "classifier_id": config.id, "reason": "requires_all_numeric"}
                )
                continue
            tasks.append((ds, config, k, pair_seed(ds.id, config.id, seed), keep_null))

    if jobs <= 1:
        outcomes = [_run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=1))

    rows = []
    for (ds_id, config_id, pair_seed_value), result in outcomes:
        if isinstance(result, str):
            report.skipped.append({"dataset_id": ds_id, "classifier_id": config_id, "reason": result})
            continue
        if keep_null and result.permuted_errors is not None:
            report.null_distributions[f"{ds_id}|{config_id}"] = list(result.permuted_errors)
        rows.append(
            ExperimentRow(
                dataset_id=ds_id,
                meta_features=features[ds_id],
                classifier_id=config_id,
                f_score=result.f_score,
                p_value=result.p_value,
                error_original=result.error_original,
                k_permutations=result.k_permutations,
                seed=pair_seed_value,
                timestamp=timestamp,
                toolkit_version=__version__,
            )
        )
    rows.sort(key=lambda r: (r.dataset_id, r.classifier_id, r.seed))
    report.skipped.sort(key=lambda s: (s["dataset_id"], s["classifier_id"]))
    report.rows_written = len(rows)
    return ExperimentTable(rows=tuple(rows)), report


def _run_task(task):
    ds, config, k, seed, keep_null = task
    key = (ds.id, config.id, seed)
    try:
        protocol = default_protocol(ds.n, seed)
        result = permutation_test(config, ds, k=k, seed=seed, protocol=protocol, keep_null=keep_null)
        return key, result
    except Exception as exc:  # isolate per-pair failures
        return key, f"{type(exc).__name__}: {exc}"


def _format_float(value: float) -> str:
    return repr(float(value))


def save_table(table: ExperimentTable, path: str | Path, append: bool = False) -> None:
    """Write the table as CSV; ``append`` adds rows to an existing file.

    Appending refuses keys already present (append-only semantics) and never
    rewrites existing bytes.
    """
    path = Path(path)
    if append and path.exists():
        existing = load_table(path)
        old_keys = {r.key for r in existing.rows}
        clashes = [r.key for r in table.rows if r.key in old_keys]
        if clashes:
            raise TableFormatError(f"refusing to append {len(clashes)} duplicate keys, e.g. {clashes[0]}")
        merged_ids = {r.dataset_id: r.meta_features for r in existing.rows}
        for r in table.rows:
            if r.dataset_id in merged_ids and merged_ids[r.dataset_id] != r.meta_features:
                raise TableFormatError(f"dataset {r.dataset_id!r} meta-features disagree with stored rows")
        with open(path, "a", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for row in table.rows:
                writer.writerow(_row_cells(row))
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for row in table.rows:
            writer.writerow(_row_cells(row))


def _row_cells(row: ExperimentRow) -> list[str]:
    cells = [row.dataset_id]
    feature_values = row.meta_features.to_dict()
    for name in FEATURE_NAMES:
        cells.append(_format_float(feature_values[name]))
    cells.extend(
        [
            row.classifier_id,
            _format_float(row.f_score),
            _format_float(row.p_value),
            _format_float(row.error_original),
            str(row.k_permutations),
            str(row.seed),
            row.timestamp,
            row.toolkit_version,
        ]
    )
    return cells


def load_table(path: str | Path) -> ExperimentTable:
    """Read and fully validate an experiment-table CSV."""
    path = Path(path)
    if not path.exists():
        raise TableFormatError(f"experiment table not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        lines = list(reader)
    if not lines:
        raise TableFormatError(f"{path} is empty")
    header = tuple(lines[0])
    if header != TABLE_HEADER:
        raise TableFormatError(f"{path}: header does not match the table schema")
    rows = []
    n_features = len(FEATURE_NAMES)
    for lineno, cells in enumerate(lines[1:], start=2):
        if len(cells) != len(TABLE_HEADER):
            raise TableFormatError(f"{path} line {lineno}: {len(cells)} cells, expected {len(TABLE_HEADER)}")
        try:
            feature_map = {name: float(cells[1 + i]) for i, name in enumerate(FEATURE_NAMES)}
            meta = MetaFeatureVector.from_mapping(feature_map)
            rows.append(
                ExperimentRow(
                    dataset_id=cells[0],
                    meta_features=meta,
                    classifier_id=cells[1 + n_features],
                    f_score=float(cells[2 + n_features]),
                    p_value=float(cells[3 + n_features]),
                    error_original=float(cells[4 + n_features]),
                    k_permutations=int(cells[5 + n_features]),
                    seed=int(cells[6 + n_features]),
                    timestamp=cells[7 + n_features],
                    toolkit_version=cells[8 + n_features],
                )
            )
        except (ValueError, TableFormatError) as exc:
            raise TableFormatError(f"{path} line {lineno}: {exc}") from exc
    return ExperimentTable(rows=tuple(rows))


def save_report(report: RunReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
