"""Eight classifier families behind one train/predict contract.

Families: decision_tree, knn, logistic_regression, majority, naive_bayes,
neural_network, random_forest, svm.  All of them consume the fully numeric
matrix produced by ``impute_and_encode``; knn, svm, logistic_regression and
neural_network additionally standardize columns from training statistics.
Every tie anywhere (votes, equal posteriors, exact decision boundaries)
breaks toward the lexicographically smaller class token.

Deterministic contract: ``fit`` is a pure function of (config, X, y, seed);
stochastic families (neural_network, random_forest, svm) draw exclusively
from the provided seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels

FAMILIES = (
    "decision_tree",
    "knn",
    "logistic_regression",
    "majority",
    "naive_bayes",
    "neural_network",
    "random_forest",
    "svm",
)

# training internals kept out of the parameter grids
LOGISTIC_MAX_ITER = 500
LOGISTIC_TOL = 1e-6
MLP_EPOCHS = 300
MLP_LEARNING_RATE = 0.1
SVM_EPOCHS = 100
SVM_BATCH = 16
TREE_MIN_SPLIT = 2
NB_VARIANCE_FLOOR = 1e-9
SCALE_FLOOR = 1e-12

_PARAM_KEYS = {
    "decision_tree": ("max_depth", "min_leaf"),
    "knn": ("k",),
    "logistic_regression": ("l2",),
    "majority": (),
    "naive_bayes": (),
    "neural_network": ("width",),
    "random_forest": ("max_depth", "trees"),
    "svm": ("c",),
}

_PARAM_DEFAULTS = {
    "decision_tree": {"max_depth": None, "min_leaf": 2},
    "knn": {"k": 5},
    "logistic_regression": {"l2": 1.0},
    "majority": {},
    "naive_bayes": {},
    "neural_network": {"width": 20},
    "random_forest": {"max_depth": 12, "trees": 50},
    "svm": {"c": 1.0},
}

_INT_PARAMS = {"k", "width", "trees", "min_leaf", "max_depth"}


class TrainingError(RuntimeError):
    """A classifier could not be trained on the given data."""


@dataclass(frozen=True)
class ClassifierConfig:
    """A classifier family plus a canonical parameter assignment.

    ``id`` renders as ``family(key=value,...)`` with keys sorted, which is
    the stable identifier stored in experiment tables.  The optional
    ``requires_all_numeric`` capability flag lets a grid declare a family
    inapplicable to datasets containing categorical attributes.
    """

    family: str
    params: tuple[tuple[str, object], ...] = ()
    requires_all_numeric: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown classifier family {self.family!r}")
        allowed = _PARAM_KEYS[self.family]
        keys = [k for k, _ in self.params]
        if keys != sorted(keys):
            raise ValueError(f"params for {self.family} must be key-sorted: {keys}")
        bad = [k for k in keys if k not in allowed]
        if bad:
            raise ValueError(f"invalid params {bad} for family {self.family}")

    @property
    def id(self) -> str:
        rendered = ",".join(f"{k}={_format_value(v)}" for k, v in self.params)
        return f"{self.family}({rendered})"

    def param(self, key: str):
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def make_config(family: str, params: dict | None = None, requires_all_numeric: bool = False) -> ClassifierConfig:
    """Build a config, filling family defaults for omitted parameters."""
    if family not in FAMILIES:
        raise ValueError(f"unknown classifier family {family!r}")
    merged = dict(_PARAM_DEFAULTS[family])
    for key, value in (params or {}).items():
        if key not in _PARAM_KEYS[family]:
            raise ValueError(f"invalid param {key!r} for family {family}")
        merged[key] = value
    normalized = []
    for key in sorted(merged):
        value = merged[key]
        if value is not None:
            value = int(value) if key in _INT_PARAMS else float(value)
        normalized.append((key, value))
    return ClassifierConfig(family=family, params=tuple(normalized), requires_all_numeric=requires_all_numeric)


def default_grid() -> list[ClassifierConfig]:
    """The shipped parameter grid: 15 configs covering all eight families."""
    grid = [
        make_config("decision_tree", {"max_depth": 6, "min_leaf": 2}),
        make_config("decision_tree", {"max_depth": None, "min_leaf": 2}),
        make_config("knn", {"k": 1}),
        make_config("knn", {"k": 5}),
        make_config("knn", {"k": 15}),
        make_config("logistic_regression", {"l2": 0.01}),
        make_config("logistic_regression", {"l2": 1.0}),
        make_config("majority"),
        make_config("naive_bayes"),
        make_config("neural_network", {"width": 5}),
        make_config("neural_network", {"width": 20}),
        make_config("random_forest", {"trees": 10, "max_depth": 12}),
        make_config("random_forest", {"trees": 50, "max_depth": 12}),
        make_config("svm", {"c": 0.1}),
        make_config("svm", {"c": 1.0}),
    ]
    return grid


def load_grid(path: str | Path) -> list[ClassifierConfig]:
    """Read a JSON grid file: a list of {family, params?, requires_all_numeric?}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"grid file {path} must hold a non-empty JSON list")
    grid = []
    for entry in raw:
        if not isinstance(entry, dict) or "family" not in entry:
            raise ValueError(f"grid entries need a 'family' key: {entry!r}")
        grid.append(
            make_config(
                entry["family"],
                entry.get("params"),
                bool(entry.get("requires_all_numeric", False)),
            )
        )
    ids = [c.id for c in grid]
    if len(set(ids)) != len(ids):
        raise ValueError(f"grid file {path} contains duplicate configurations")
    return grid


@dataclass(frozen=True)
class TrainedModel:
    """A fitted classifier: config, class mapping, and opaque family state."""

    config: ClassifierConfig
    classes: tuple[str, ...]
    state: object
    seed: int
    n_features: int


def column_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and inverse deviation for standardization.

    Uses exactly rounded sums so the statistics do not depend on row order.
    Columns with (near-)zero deviation get inverse scale 1.0.
    """
    n, m = X.shape
    mu = np.empty(m)
    inv = np.empty(m)
    for j in range(m):
        col = X[:, j]
        mean = math.fsum(col) / n
        var = math.fsum((float(v) - mean) ** 2 for v in col) / n
        sd = math.sqrt(var)
        mu[j] = mean
        inv[j] = 1.0 / sd if sd > SCALE_FLOOR else 1.0
    return mu, inv


def _vote_with_ties(sorted_d2: np.ndarray, sorted_y: np.ndarray, k: int) -> int:
    """Majority vote over the k nearest points, expanding through distance
    ties at the k-th position; vote ties go to class 0."""
    boundary = sorted_d2[k - 1]
    count = k
    total = len(sorted_d2)
    while count < total and sorted_d2[count] <= boundary:
        count += 1
    ones = int(sorted_y[:count].sum())
    return 1 if 2 * ones > count else 0


# ---------------------------------------------------------------------------
# family implementations (internal {0,1} label space)
# ---------------------------------------------------------------------------

def _fit_majority(config, X, y01, seed):
    ones = int(y01.sum())
    zeros = len(y01) - ones
    return 1 if ones > zeros else 0


def _predict_majority(state, X):
    return np.full(X.shape[0], state, dtype=np.int8)


def _fit_knn(config, X, y01, seed):
    _, inv = column_stats(X)
    return (X.copy(), y01.copy(), inv, int(config.param("k")))


def _predict_knn(state, X):
    Xtr, ytr, inv, k = state
    k_eff = min(k, len(ytr))
    out = np.empty(X.shape[0], dtype=np.int8)
    for i in range(X.shape[0]):
        d2 = (((Xtr - X[i]) * inv) ** 2).sum(axis=1)
        order = np.argsort(d2, kind="stable")
        out[i] = _vote_with_ties(d2[order], ytr[order], k_eff)
    return out


def _fit_naive_bayes(config, X, y01, seed):
    n, m = X.shape
    stats = []
    priors = []
    for cls in (0, 1):
        rows = X[y01 == cls]
        priors.append(len(rows) / n)
        mu = rows.mean(axis=0)
        var = rows.var(axis=0)
        var = np.maximum(var, NB_VARIANCE_FLOOR)
        stats.append((mu, var))
    return (np.log(priors[0]), np.log(priors[1]), stats[0], stats[1])


def _predict_naive_bayes(state, X):
    lp0, lp1, (mu0, var0), (mu1, var1) = state
    ll0 = lp0 - 0.5 * (np.log(2.0 * np.pi * var0) + (X - mu0) ** 2 / var0).sum(axis=1)
    ll1 = lp1 - 0.5 * (np.log(2.0 * np.pi * var1) + (X - mu1) ** 2 / var1).sum(axis=1)
    return (ll1 > ll0).astype(np.int8)


def _fit_logistic(config, X, y01, seed):
    mu, inv = column_stats(X)
    Xs = np.ascontiguousarray((X - mu) * inv)
    w, b = _kernels.logistic_train(Xs, y01.astype(np.float64), float(config.param("l2")), LOGISTIC_MAX_ITER, LOGISTIC_TOL)
    return (mu, inv, w, b)


def _predict_logistic(state, X):
    mu, inv, w, b = state
    z = ((X - mu) * inv) @ w + b
    return (z > 0.0).astype(np.int8)


def _fit_neural_network(config, X, y01, seed):
    mu, inv = column_stats(X)
    Xs = np.ascontiguousarray((X - mu) * inv)
    W1, b1, W2, b2 = _kernels.mlp_train(
        Xs, y01.astype(np.float64), int(config.param("width")), MLP_EPOCHS, MLP_LEARNING_RATE, np.uint32(seed)
    )
    return (mu, inv, W1, b1, W2, b2)


def _predict_neural_network(state, X):
    mu, inv, W1, b1, W2, b2 = state
    o = _kernels.mlp_forward(np.ascontiguousarray((X - mu) * inv), W1, b1, W2, b2)
    return (o > 0.5).astype(np.int8)


def _fit_svm(config, X, y01, seed):
    mu, inv = column_stats(X)
    Xs = np.ascontiguousarray((X - mu) * inv)
    ypm = (2.0 * y01 - 1.0).astype(np.float64)
    lam = 1.0 / (float(config.param("c")) * len(y01))
    w, b = _kernels.svm_train(Xs, ypm, lam, SVM_EPOCHS, SVM_BATCH, np.uint32(seed))
    return (mu, inv, w, b)


def _predict_svm(state, X):
    mu, inv, w, b = state
    z = ((X - mu) * inv) @ w + b
    return (z > 0.0).astype(np.int8)


def _tree_depth_arg(value) -> int:
    return -1 if value is None else int(value)


def _fit_decision_tree(config, X, y01, seed):
    Xc = np.ascontiguousarray(X)
    return _kernels.tree_build(
        Xc,
        y01.astype(np.int64),
        _tree_depth_arg(config.param("max_depth")),
        int(config.param("min_leaf")),
        X.shape[1],
        np.uint32(0),
    )


def _predict_decision_tree(state, X):
    feat, thr, left, right, leaf = state
    return _kernels.tree_predict(feat, thr, left, right, leaf, np.ascontiguousarray(X))


def _fit_random_forest(config, X, y01, seed):
    n, m = X.shape
    trees = int(config.param("trees"))
    depth = _tree_depth_arg(config.param("max_depth"))
    max_features = max(1, int(math.isqrt(m)))
    rng = np.random.default_rng(seed)
    Xc = np.ascontiguousarray(X)
    y64 = y01.astype(np.int64)
    built = []
    for _ in range(trees):
        boot = rng.integers(0, n, size=n)
        tree_seed = np.uint32(rng.integers(0, 2**31 - 1))
        built.append(_kernels.tree_build(np.ascontiguousarray(Xc[boot]), y64[boot], depth, TREE_MIN_SPLIT, max_features, tree_seed))
    return built


def _predict_random_forest(state, X):
    Xc = np.ascontiguousarray(X)
    votes = np.zeros(X.shape[0], dtype=np.int32)
    for feat, thr, left, right, leaf in state:
        votes += _kernels.tree_predict(feat, thr, left, right, leaf, Xc)
    return (2 * votes > len(state)).astype(np.int8)


@dataclass(frozen=True)
class _FamilyOps:
    needs_seed: bool
    fit: object
    predict: object


_OPS = {
    "decision_tree": _FamilyOps(False, _fit_decision_tree, _predict_decision_tree),
    "knn": _FamilyOps(False, _fit_knn, _predict_knn),
    "logistic_regression": _FamilyOps(False, _fit_logistic, _predict_logistic),
    "majority": _FamilyOps(False, _fit_majority, _predict_majority),
    "naive_bayes": _FamilyOps(False, _fit_naive_bayes, _predict_naive_bayes),
    "neural_network": _FamilyOps(True, _fit_neural_network, _predict_neural_network),
    "random_forest": _FamilyOps(True, _fit_random_forest, _predict_random_forest),
    "svm": _FamilyOps(True, _fit_svm, _predict_svm),
}


def family_needs_seed(family: str) -> bool:
    return _OPS[family].needs_seed


def fit_indexed(config: ClassifierConfig, X: np.ndarray, y01: np.ndarray, seed: int):
    """Fit in the internal {0,1} label space; used by the CV engine."""
    return _OPS[config.family].fit(config, X, y01, seed)


def predict_indexed(config: ClassifierConfig, state, X: np.ndarray) -> np.ndarray:
    return _OPS[config.family].predict(state, X)


def fit(config: ClassifierConfig, X: np.ndarray, y, seed: int = 0) -> TrainedModel:
    """Train one classifier on a numeric matrix and token labels."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise TrainingError(f"X must be 2-D, got shape {X.shape}")
    labels = np.asarray([str(v) for v in y], dtype=object)
    if len(labels) != X.shape[0]:
        raise TrainingError(f"row mismatch: X has {X.shape[0]} rows, y has {len(labels)}")
    if X.size and not np.isfinite(X).all():
        raise TrainingError("X contains non-finite cells")
    classes = tuple(sorted(set(labels)))
    if config.family == "majority":
        if len(labels) < 1 or len(classes) > 2:
            raise TrainingError(f"majority requires 1 or 2 classes, got {len(classes)}")
    else:
        if len(labels) < 2:
            raise TrainingError("need at least 2 training rows")
        if len(classes) != 2:
            raise TrainingError(f"{config.family} requires exactly 2 classes, got {len(classes)}")
    y01 = np.array([0 if lbl == classes[0] else 1 for lbl in labels], dtype=np.int8)
    try:
        state = _OPS[config.family].fit(config, X, y01, int(seed))
    except TrainingError:
        raise
    except Exception as exc:  # family-specific numerical failures become typed errors
        raise TrainingError(f"{config.id} failed to train: {exc}") from exc
    return TrainedModel(config=config, classes=classes, state=state, seed=int(seed), n_features=X.shape[1])


def predict(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Predict one label token per row; deterministic given the model."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} columns, got shape {X.shape}")
    if X.shape[0] == 0:
        return np.array([], dtype=object)
    if len(model.classes) == 1:
        return np.full(X.shape[0], model.classes[0], dtype=object)
    pred01 = _OPS[model.config.family].predict(model.state, X)
    classes = np.array(model.classes, dtype=object)
    return classes[pred01.astype(np.int64)]
