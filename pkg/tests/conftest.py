from __future__ import annotations

import numpy as np
import pytest

from metarec import __version__
from metarec.data import CATEGORICAL, NUMERIC, Dataset, dataset_from_arrays
from metarec.features import FEATURE_NAMES, MetaFeatureVector
from metarec.store import ExperimentRow, ExperimentTable


def make_numeric_dataset(
    id: str,
    X: np.ndarray,
    labels,
    positive_class: str | None = None,
) -> Dataset:
    X = np.asarray(X, dtype=np.float64)
    return dataset_from_arrays(
        id,
        [X[:, j] for j in range(X.shape[1])],
        [NUMERIC] * X.shape[1],
        labels,
        positive_class=positive_class,
    )


def random_mixed_dataset(rng: np.random.Generator, n: int, m: int, id: str = "rand") -> Dataset:
    """A random dataset with numeric and categorical columns and some missing
    cells, for property tests."""
    columns = []
    kinds = []
    for j in range(m):
        if rng.random() < 0.6:
            col = rng.normal(size=n) * rng.uniform(0.5, 3.0)
            if rng.random() < 0.3:
                col = np.round(col)  # encourage repeated values
            col = col.astype(np.float64)
            for i in np.flatnonzero(rng.random(n) < 0.1):
                col[i] = np.nan
            if np.isnan(col).all():
                col[0] = 0.0
            kinds.append(NUMERIC)
        else:
            tokens = rng.choice(["a", "b", "c", "d"][: int(rng.integers(2, 5))], size=n)
            col = np.array([str(t) for t in tokens], dtype=object)
            for i in np.flatnonzero(rng.random(n) < 0.1):
                col[i] = None
            if all(v is None for v in col):
                col[0] = "a"
            kinds.append(CATEGORICAL)
        columns.append(col)
    labels = ["neg", "pos"] + [str(rng.choice(["neg", "pos"])) for _ in range(n - 2)]
    return dataset_from_arrays(id, columns, kinds, labels)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)


def vector_from(values) -> MetaFeatureVector:
    return MetaFeatureVector.from_mapping(dict(zip(FEATURE_NAMES, [float(v) for v in values])))


def simple_vector(tag: float) -> MetaFeatureVector:
    base = [10, 3, 10 / 3, 0, 0.0, 50.0, 0.2, 0.1, -0.5, 0.8, 1.0, 0.5, 0.4, 2.5, 1.5]
    base[6] = tag
    return vector_from(base)


def make_row(
    dataset_id="d1",
    classifier_id="majority()",
    seed=1,
    f=0.5,
    p=0.25,
    vec=None,
) -> ExperimentRow:
    return ExperimentRow(
        dataset_id=dataset_id,
        meta_features=vec if vec is not None else simple_vector(0.2),
        classifier_id=classifier_id,
        f_score=f,
        p_value=p,
        error_original=0.3,
        k_permutations=199,
        seed=seed,
        timestamp="2000-01-01T00:00:07Z",
        toolkit_version=__version__,
    )


def table_of(*rows) -> ExperimentTable:
    return ExperimentTable(rows=tuple(rows))
