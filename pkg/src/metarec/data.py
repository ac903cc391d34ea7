"""Tabular classification datasets: loading, validation, and transforms.

A dataset is a column-oriented table of numeric and categorical attributes
plus a class label per row.  Numeric columns are float64 arrays with NaN
marking missing cells; categorical columns are object arrays of strings with
None marking missing cells.  The loader reads plain CSV files with a header
row and an optional JSON sidecar manifest describing the class column,
per-column kind overrides, and the positive class.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MISSING_TOKENS = ("", "?")

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DatasetError(ValueError):
    """Raised when a dataset file or constructed dataset is invalid."""


@dataclass(frozen=True)
class DatasetManifest:
    """Loading instructions for one CSV dataset.

    ``class_column`` may be a header name or a 0-based column index; when
    None, a column named ``class`` is used if present, otherwise the last
    column.  ``declared_kinds`` overrides the numeric/categorical inference
    per column name.
    """

    path: Path
    class_column: str | int | None = None
    declared_kinds: dict[str, str] | None = None
    positive_class: str | None = None

    @classmethod
    def for_csv(cls, csv_path: str | Path) -> "DatasetManifest":
        """Build a manifest for ``csv_path``, honoring a ``.json`` sidecar.

        The sidecar lives next to the CSV with the same stem (``data.csv`` ->
        ``data.json``) and may define ``class_column``, ``kinds``, and
        ``positive_class``.  A missing sidecar yields default settings.
        """
        csv_path = Path(csv_path)
        sidecar = csv_path.with_suffix(".json")
        if not sidecar.exists():
            return cls(path=csv_path)
        try:
            raw = json.loads(sidecar.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DatasetError(f"manifest sidecar {sidecar} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise DatasetError(f"manifest sidecar {sidecar} must hold a JSON object")
        return cls(
            path=csv_path,
            class_column=raw.get("class_column"),
            declared_kinds=raw.get("kinds"),
            positive_class=raw.get("positive_class"),
        )


@dataclass(frozen=True)
class Dataset:
    """An immutable binary- or multi-class tabular dataset.

    ``columns[j]`` holds attribute j for all rows: float64 with NaN for
    missing when ``attribute_kinds[j] == "numeric"``, else an object array of
    str with None for missing.  ``class_values`` lists the distinct label
    tokens in lexicographic order.
    """

    id: str
    columns: tuple[np.ndarray, ...]
    column_names: tuple[str, ...]
    attribute_kinds: tuple[str, ...]
    labels: np.ndarray
    class_values: tuple[str, ...]
    positive_class: str | None = None

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n < 2:
            raise DatasetError(f"dataset {self.id!r} has {n} rows; need at least 2")
        if len(self.columns) != len(self.attribute_kinds) or len(self.columns) != len(self.column_names):
            raise DatasetError(f"dataset {self.id!r}: column/kind/name counts disagree")
        if len(self.class_values) < 2:
            raise DatasetError(f"dataset {self.id!r} has a single class {self.class_values}")
        present = set(str(v) for v in self.labels)
        if not present.issubset(set(self.class_values)):
            raise DatasetError(f"dataset {self.id!r}: labels outside class_values")
        for j, (col, kind) in enumerate(zip(self.columns, self.attribute_kinds)):
            if len(col) != n:
                raise DatasetError(f"dataset {self.id!r}: column {j} has {len(col)} cells, expected {n}")
            if kind == NUMERIC:
                if col.dtype != np.float64:
                    raise DatasetError(f"dataset {self.id!r}: numeric column {j} must be float64")
            elif kind == CATEGORICAL:
                if col.dtype != object:
                    raise DatasetError(f"dataset {self.id!r}: categorical column {j} must be object dtype")
            else:
                raise DatasetError(f"dataset {self.id!r}: unknown attribute kind {kind!r}")
        if self.positive_class is not None and self.positive_class not in self.class_values:
            raise DatasetError(
                f"dataset {self.id!r}: positive class {self.positive_class!r} not among {self.class_values}"
            )
        for col in self.columns:
            col.flags.writeable = False
        self.labels.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def n_classes(self) -> int:
        return len(self.class_values)

    def is_binary(self) -> bool:
        return self.n_classes == 2

    def has_missing(self) -> bool:
        return any(_missing_mask(col, kind).any() for col, kind in zip(self.columns, self.attribute_kinds))

    def has_categorical(self) -> bool:
        return CATEGORICAL in self.attribute_kinds

    def take_rows(self, indices: np.ndarray, new_id: str) -> "Dataset":
        """Row subset with the same columns; class set is recomputed."""
        labels = self.labels[indices].copy()
        return Dataset(
            id=new_id,
            columns=tuple(col[indices].copy() for col in self.columns),
            column_names=self.column_names,
            attribute_kinds=self.attribute_kinds,
            labels=labels,
            class_values=tuple(sorted(set(str(v) for v in labels))),
            positive_class=None,
        )


@dataclass(frozen=True)
class EncodedData:
    """Fully numeric view of a dataset produced by :func:`impute_and_encode`.

    ``encoded_names[p]`` documents column p of ``matrix``: the source column
    name for numeric attributes, ``name=value`` for one-hot indicators.
    """

    matrix: np.ndarray
    labels: np.ndarray
    encoded_names: tuple[str, ...]

    def __post_init__(self) -> None:
        self.matrix.flags.writeable = False
        self.labels.flags.writeable = False


def _missing_mask(col: np.ndarray, kind: str) -> np.ndarray:
    if kind == NUMERIC:
        return np.isnan(col)
    return np.array([v is None for v in col], dtype=bool)


def _parse_numeric(token: str) -> float | None:
    """Finite float value of ``token``, or None when it does not qualify."""
    try:
        value = float(token)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_dataset(source: DatasetManifest | str | Path) -> Dataset:
    """Load and validate a CSV dataset.

    Cells equal to the empty string or ``?`` (after stripping surrounding
    whitespace) are missing.  A column is numeric iff every non-missing cell
    parses as a finite number, unless the manifest overrides its kind.
    """
    manifest = source if isinstance(source, DatasetManifest) else DatasetManifest.for_csv(source)
    path = Path(manifest.path)
    if not path.exists():
        raise DatasetError(f"dataset file not found: {path}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except (OSError, csv.Error, UnicodeDecodeError) as exc:
        raise DatasetError(f"cannot parse {path}: {exc}") from exc
    if not rows:
        raise DatasetError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if len(body) < 2:
        raise DatasetError(f"{path} has {len(body)} data rows; need at least 2")
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise DatasetError(f"{path} row {i + 2} has {len(row)} cells, expected {width}")

    class_idx = _resolve_class_column(manifest.class_column, header, path)
    attr_idx = [j for j in range(width) if j != class_idx]

    labels_raw = [row[class_idx].strip() for row in body]
    if any(tok in MISSING_TOKENS for tok in labels_raw):
        raise DatasetError(f"{path}: missing value in class column")
    class_values = tuple(sorted(set(labels_raw)))
    if len(class_values) < 2:
        raise DatasetError(f"{path}: only one class present ({class_values[0]!r})")

    declared = dict(manifest.declared_kinds or {})
    unknown = set(declared) - set(header[j] for j in attr_idx)
    if unknown:
        raise DatasetError(f"{path}: declared kinds for unknown columns {sorted(unknown)}")

    columns: list[np.ndarray] = []
    kinds: list[str] = []
    for j in attr_idx:
        name = header[j]
        cells = [row[j].strip() for row in body]
        missing = [tok in MISSING_TOKENS for tok in cells]
        if all(missing):
            raise DatasetError(f"{path}: column {name!r} has all cells missing")
        kind = declared.get(name)
        if kind is None:
            parsed = [None if miss else _parse_numeric(tok) for tok, miss in zip(cells, missing)]
            kind = NUMERIC if all(v is not None for v, miss in zip(parsed, missing) if not miss) else CATEGORICAL
        elif kind not in (NUMERIC, CATEGORICAL):
            raise DatasetError(f"{path}: column {name!r} declared with unknown kind {kind!r}")
        if kind == NUMERIC:
            values = np.empty(len(cells), dtype=np.float64)
            for i, (tok, miss) in enumerate(zip(cells, missing)):
                if miss:
                    values[i] = np.nan
                else:
                    parsed_value = _parse_numeric(tok)
                    if parsed_value is None:
                        raise DatasetError(f"{path}: column {name!r} declared numeric but cell {tok!r} is not")
                    values[i] = parsed_value
        else:
            values = np.array([None if miss else tok for tok, miss in zip(cells, missing)], dtype=object)
        columns.append(values)
        kinds.append(kind)

    return Dataset(
        id=path.stem,
        columns=tuple(columns),
        column_names=tuple(header[j] for j in attr_idx),
        attribute_kinds=tuple(kinds),
        labels=np.array(labels_raw, dtype=object),
        class_values=class_values,
        positive_class=manifest.positive_class,
    )


def _resolve_class_column(spec: str | int | None, header: list[str], path: Path) -> int:
    if spec is None:
        return header.index("class") if "class" in header else len(header) - 1
    if isinstance(spec, int):
        if not 0 <= spec < len(header):
            raise DatasetError(f"{path}: class column index {spec} out of range")
        return spec
    matches = [j for j, name in enumerate(header) if name == spec]
    if len(matches) != 1:
        raise DatasetError(f"{path}: class column {spec!r} matches {len(matches)} columns")
    return matches[0]


def split_one_vs_one(ds: Dataset) -> list[Dataset]:
    """Reduce a multiclass dataset to disjoint binary class-pair datasets.

    Classes are sorted lexicographically and paired in order ((1st,2nd),
    (3rd,4th), ...); each class appears in at most one child, and an odd
    leftover class is dropped.  Child ids are ``{parent}__{a}_vs_{b}``.
    """
    classes = sorted(ds.class_values)
    if len(classes) < 2:
        raise DatasetError(f"dataset {ds.id!r} has fewer than 2 classes")
    children: list[Dataset] = []
    for i in range(0, len(classes) - 1, 2):
        a, b = classes[i], classes[i + 1]
        mask = np.array([str(v) in (a, b) for v in ds.labels], dtype=bool)
        child = ds.take_rows(np.flatnonzero(mask), new_id=f"{ds.id}__{a}_vs_{b}")
        children.append(child)
    return children


def impute_and_encode(ds: Dataset) -> EncodedData:
    """Produce a fully numeric matrix: mean/mode imputation plus one-hot.

    Missing numeric cells take the column mean over non-missing cells;
    missing categorical cells take the column mode (ties broken toward the
    lexicographically smallest value).  Each categorical column expands into
    one indicator column per distinct imputed value, in lexicographic value
    order.  Source-column order is preserved.
    """
    pieces: list[np.ndarray] = []
    names: list[str] = []
    for col, kind, name in zip(ds.columns, ds.attribute_kinds, ds.column_names):
        if kind == NUMERIC:
            missing = np.isnan(col)
            values = col.astype(np.float64, copy=True)
            if missing.any():
                observed = values[~missing]
                # A constructed dataset may have an all-missing column; the
                # loader rejects those, so fall back to 0 only defensively.
                fill = float(np.mean(observed)) if observed.size else 0.0
                values[missing] = fill
            pieces.append(values.reshape(-1, 1))
            names.append(name)
        else:
            tokens = [v for v in col]
            observed = [t for t in tokens if t is not None]
            if observed:
                counts: dict[str, int] = {}
                for t in observed:
                    counts[t] = counts.get(t, 0) + 1
                best = max(counts.values())
                mode = min(t for t, c in counts.items() if c == best)
            else:
                mode = ""
            tokens = [mode if t is None else t for t in tokens]
            for value in sorted(set(tokens)):
                indicator = np.array([1.0 if t == value else 0.0 for t in tokens], dtype=np.float64)
                pieces.append(indicator.reshape(-1, 1))
                names.append(f"{name}={value}")
    matrix = np.hstack(pieces) if pieces else np.empty((ds.n, 0), dtype=np.float64)
    return EncodedData(matrix=matrix, labels=ds.labels.copy(), encoded_names=tuple(names))


def dataset_from_arrays(
    id: str,
    columns: list[np.ndarray],
    kinds: list[str],
    labels: list[str] | np.ndarray,
    column_names: list[str] | None = None,
    positive_class: str | None = None,
) -> Dataset:
    """Convenience constructor used by generators and tests."""
    names = column_names if column_names is not None else [f"a{j + 1}" for j in range(len(columns))]
    prepared = []
    for col, kind in zip(columns, kinds):
        arr = np.asarray(col, dtype=np.float64 if kind == NUMERIC else object)
        prepared.append(arr.copy())
    label_arr = np.array([str(v) for v in labels], dtype=object)
    return Dataset(
        id=id,
        columns=tuple(prepared),
        column_names=tuple(names),
        attribute_kinds=tuple(kinds),
        labels=label_arr,
        class_values=tuple(sorted(set(str(v) for v in labels))),
        positive_class=positive_class,
    )
