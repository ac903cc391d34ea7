"""Synthetic demonstration corpus: 12 small binary datasets in 3 families.

The families are built so that datasets with similar characterizations have
stable best classifiers, which is what makes nearest-neighbor recommendation
meaningful on the corpus:

* ``lin_*``  -- numeric attributes with a diagonal class margin plus skewed
  nuisance dimensions; linear separators excel, trees and knn lag.
* ``ring_*`` -- two numeric attributes, classes in concentric radial bands;
  local methods (knn, forests) excel and linear separators fail.
* ``mix_*``  -- categorical attributes where agreement of a token pair
  decides the class, with sprinkled missing cells; rule learners (trees,
  forests) excel while marginal methods see little signal.  These datasets
  come from generating 4- and 5-class parents and reducing them one-vs-one
  (the odd fifth class is dropped), so their ids carry a ``__a_vs_b``
  suffix.

Every dataset gets a ``.json`` manifest sidecar next to its ``.csv``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .data import CATEGORICAL, NUMERIC, Dataset, dataset_from_arrays, split_one_vs_one

CORPUS_SIZE = 12

_CAT_TOKENS = ("blue", "green", "red")
_CAT_NOISE_TOKENS = ("low", "mid", "high")


def _linear_dataset(id: str, n: int, m: int, rng: np.random.Generator) -> Dataset:
    half = n // 2
    n = 2 * half
    # diagonal margin across the first two dimensions: linear separators
    # excel, axis-aligned trees and nuisance-diluted knn lag behind
    shift = np.zeros(m)
    shift[0] = 1.4
    shift[1] = 1.4
    X = rng.standard_normal((n, m))
    # skewed nuisance dimensions: a family trait visible in the features
    for j in range(2, m):
        X[:, j] = rng.exponential(1.0, n) - 1.0
    X[:half] += shift
    X[half:] -= shift
    labels = np.array(["up"] * half + ["down"] * half, dtype=object)
    flips = rng.random(n) < 0.06
    labels[flips] = np.where(labels[flips] == "up", "down", "up")
    order = rng.permutation(n)
    return dataset_from_arrays(id, [X[order, j] for j in range(m)], [NUMERIC] * m, labels[order])


def _ring_dataset(id: str, n: int, rng: np.random.Generator) -> Dataset:
    half = n // 2
    n = 2 * half
    radius = np.concatenate([rng.uniform(0.0, 1.0, half), rng.uniform(1.4, 2.4, half)])
    angle = rng.uniform(0.0, 2.0 * math.pi, n)
    x = radius * np.cos(angle)
    y = radius * np.sin(angle)
    labels = np.array(["inner"] * half + ["outer"] * half, dtype=object)
    flips = rng.random(n) < 0.07
    labels[flips] = np.where(labels[flips] == "inner", "outer", "inner")
    order = rng.permutation(n)
    return dataset_from_arrays(id, [x[order], y[order]], [NUMERIC] * 2, labels[order])


def _categorical_columns(n: int, rng: np.random.Generator) -> tuple[list, np.ndarray]:
    """Three categorical columns plus one numeric noise column.

    The first column drives the label (blue/red -> "yes", green -> "no");
    the second column carries ~5% missing cells, the numeric one ~4%.
    """
    c1 = rng.choice(_CAT_TOKENS, n)
    c2 = rng.choice(_CAT_NOISE_TOKENS, n)
    c3 = rng.choice(("north", "south"), n)
    noise = rng.standard_normal(n) * 2.0
    col1 = np.array([str(v) for v in c1], dtype=object)
    col2 = np.array([str(v) for v in c2], dtype=object)
    col3 = np.array([str(v) for v in c3], dtype=object)
    for i in np.flatnonzero(rng.random(n) < 0.05):
        col2[i] = None
    numeric = noise.copy()
    for i in np.flatnonzero(rng.random(n) < 0.04):
        numeric[i] = np.nan
    wants_yes = np.array([t != "green" for t in col1])
    return [col1, col2, col3, numeric], wants_yes


def _categorical_dataset(id: str, n: int, rng: np.random.Generator) -> Dataset:
    columns, wants_yes = _categorical_columns(n, rng)
    labels = np.where(wants_yes, "yes", "no").astype(object)
    flips = rng.random(n) < 0.10
    labels[flips] = np.where(labels[flips] == "yes", "no", "yes")
    return dataset_from_arrays(
        id, columns, [CATEGORICAL, CATEGORICAL, CATEGORICAL, NUMERIC], labels,
        column_names=["shade", "volume", "region", "drift"],
    )


def _multiclass_parent(id: str, n_classes: int, per_class: int, rng: np.random.Generator) -> Dataset:
    """A multiclass dataset whose one-vs-one children are category-pair
    puzzles.

    Class pair (c1, c2) is decided by agreement of the shade and band
    columns, pair (c3, c4) by agreement of region and volume; attribute
    values alone carry almost no signal, so rule learners (trees, forests)
    dominate marginal ones.  A possible odd last class is undistinguished
    noise (its rows are dropped by the reduction anyway)."""
    n = n_classes * per_class
    class_names = [f"c{i + 1}" for i in range(n_classes)]
    labels = np.empty(n, dtype=object)
    shade = np.empty(n, dtype=object)
    band = np.empty(n, dtype=object)
    region = np.empty(n, dtype=object)
    volume = np.empty(n, dtype=object)
    drift = rng.standard_normal(n) * 1.5
    pair_columns = (
        (shade, band, ("blue", "red"), ("b1", "b2")),
        (region, volume, ("east", "west"), ("hi", "lo")),
    )
    for i in range(n):
        cls = i // per_class
        pair_id = cls // 2
        in_pair = cls ^ 1 < n_classes and pair_id < len(pair_columns)
        for p, (u_col, v_col, u_tokens, v_tokens) in enumerate(pair_columns):
            u = int(rng.integers(0, 2))
            if in_pair and p == pair_id:
                # agreement of the two tokens encodes pair membership
                v = u if cls % 2 == 0 else 1 - u
            else:
                v = int(rng.integers(0, 2))
            u_col[i] = u_tokens[u]
            v_col[i] = v_tokens[v]
        labels[i] = class_names[cls]
        if in_pair and rng.random() < 0.08:
            labels[i] = class_names[cls ^ 1]
    for i in np.flatnonzero(rng.random(n) < 0.05):
        band[i] = None
    for i in np.flatnonzero(rng.random(n) < 0.04):
        drift[i] = np.nan
    order = rng.permutation(n)
    return dataset_from_arrays(
        id,
        [shade[order], band[order], region[order], volume[order], drift[order]],
        [CATEGORICAL, CATEGORICAL, CATEGORICAL, CATEGORICAL, NUMERIC],
        labels[order],
        column_names=["shade", "band", "region", "volume", "drift"],
    )


def build_corpus(seed: int = 7) -> list[Dataset]:
    """The 12 in-memory corpus datasets, deterministic in ``seed``."""
    root = np.random.SeedSequence(seed)
    streams = [np.random.default_rng(s) for s in root.spawn(10)]
    datasets = [
        _linear_dataset("lin_a", 32, 6, streams[0]),
        _linear_dataset("lin_b", 26, 5, streams[1]),
        _linear_dataset("lin_c", 40, 7, streams[2]),
        _linear_dataset("lin_d", 28, 6, streams[3]),
        _ring_dataset("ring_a", 36, streams[4]),
        _ring_dataset("ring_b", 28, streams[5]),
        _ring_dataset("ring_c", 32, streams[6]),
        _ring_dataset("ring_d", 24, streams[7]),
    ]
    datasets.extend(split_one_vs_one(_multiclass_parent("mix_p1", 4, 13, streams[8])))
    datasets.extend(split_one_vs_one(_multiclass_parent("mix_p2", 5, 13, streams[9])))
    assert len(datasets) == CORPUS_SIZE
    return datasets


def write_dataset(ds: Dataset, out_dir: Path) -> Path:
    """Write one dataset as CSV plus its JSON manifest sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{ds.id}.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(ds.column_names) + ["class"])
        for i in range(ds.n):
            cells = []
            for col, kind in zip(ds.columns, ds.attribute_kinds):
                if kind == NUMERIC:
                    cells.append("" if np.isnan(col[i]) else repr(float(col[i])))
                else:
                    cells.append("?" if col[i] is None else str(col[i]))
            cells.append(str(ds.labels[i]))
            writer.writerow(cells)
    manifest = {
        "class_column": "class",
        "kinds": {name: kind for name, kind in zip(ds.column_names, ds.attribute_kinds)},
    }
    (out_dir / f"{ds.id}.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path


def generate_corpus(out_dir: str | Path, seed: int = 7) -> list[Path]:
    """Write the 12-dataset corpus into ``out_dir``; returns the CSV paths."""
    return [write_dataset(ds, Path(out_dir)) for ds in build_corpus(seed)]
