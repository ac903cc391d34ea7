"""Classifier performance testing: CV error, F-score, label-permutation p-value.

The test statistic is the cross-validated misclassification rate: exact
leave-one-out for datasets up to :data:`LOOCV_MAX_N` rows, stratified k-fold
beyond that.  The permutation test re-evaluates the identical statistic (same
protocol, same per-fold fit seeds) on ``k`` independently drawn uniform
re-labelings and reports

    p = (#{permuted error <= original error} + 1) / (k + 1),

so p is always in {1/(k+1), ..., 1} and never 0.  A p-value at or below 0.05
is conventionally read as "the classifier genuinely exploited the attributes".

F-scores come from the pooled held-out predictions of the same CV run,
against the dataset's positive class (the manifest's, or the
lexicographically larger token).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import (
    ClassifierConfig,
    column_stats,
    family_needs_seed,
    fit_indexed,
    predict_indexed,
)
from .data import Dataset, impute_and_encode

#: Largest dataset evaluated with exact leave-one-out CV by default.
LOOCV_MAX_N = 200

#: Default number of permutation replicates (p-value quantum 1/200).
DEFAULT_K = 199

#: Conventional significance threshold for the permutation p-value.
SIGNIFICANCE_THRESHOLD = 0.05


@dataclass(frozen=True)
class Loocv:
    """Leave-one-out cross-validation."""


@dataclass(frozen=True)
class Kfold:
    """Stratified k-fold cross-validation; folds are drawn from ``seed``."""

    folds: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ValueError(f"kfold needs folds >= 2, got {self.folds}")


Protocol = Loocv | Kfold


def default_protocol(n: int, seed: int = 0) -> Protocol:
    return Loocv() if n <= LOOCV_MAX_N else Kfold(10, seed)


@dataclass(frozen=True)
class ContingencyTable:
    """Counts relative to a designated positive class."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def error_rate(self) -> float:
        return (self.fp + self.fn) / self.total


def f_score(table: ContingencyTable) -> float:
    """F1 = 2tp / (2tp + fp + fn); defined as 0 when all three are 0."""
    denom = 2 * table.tp + table.fp + table.fn
    return 2 * table.tp / denom if denom else 0.0


def contingency_table(y_true, y_pred, positive) -> ContingencyTable:
    true_pos = np.asarray([v == positive for v in y_true], dtype=bool)
    pred_pos = np.asarray([v == positive for v in y_pred], dtype=bool)
    return ContingencyTable(
        tp=int((true_pos & pred_pos).sum()),
        fp=int((~true_pos & pred_pos).sum()),
        fn=int((true_pos & ~pred_pos).sum()),
        tn=int((~true_pos & ~pred_pos).sum()),
    )


@dataclass(frozen=True)
class CvOutcome:
    """Misclassification rate plus the pooled held-out predictions."""

    error: float
    predictions: np.ndarray
    fallback_folds: int


@dataclass(frozen=True)
class SignificanceResult:
    """Outcome of the permutation test for one (dataset, classifier) pair."""

    error_original: float
    f_score: float
    p_value: float
    k_permutations: int
    seed: int
    fallback_folds: int = 0
    permuted_errors: tuple[float, ...] | None = None

    @property
    def significant(self) -> bool:
        return self.p_value <= SIGNIFICANCE_THRESHOLD

    def to_json_dict(self) -> dict:
        out = {
            "error_original": self.error_original,
            "f_score": self.f_score,
            "p_value": self.p_value,
            "k_permutations": self.k_permutations,
            "seed": self.seed,
            "fallback_folds": self.fallback_folds,
        }
        if self.permuted_errors is not None:
            out["permuted_errors"] = list(self.permuted_errors)
        return out


def fisher_yates_permutation(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniformly permute a copy of ``values`` with an explicit Fisher-Yates."""
    out = values.copy()
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out


class _PairEngine:
    """Evaluates one (classifier config, dataset) pair for arbitrary labelings.

    Encoding, class mapping, per-fold fit seeds, and the label-independent
    parts of the CV plan (for the leave-one-out knn fast path: per-fold
    standardization scales and tie-expanded neighbor lists) are computed once
    and reused across all permutation replicates.
    """

    def __init__(self, config: ClassifierConfig, ds: Dataset, protocol: Protocol | None, seed: int):
        if not ds.is_binary():
            raise ValueError(f"dataset {ds.id!r} is not binary ({ds.n_classes} classes)")
        self.config = config
        self.seed = int(seed)
        enc = impute_and_encode(ds)
        self.X = np.ascontiguousarray(enc.matrix)
        self.classes = tuple(ds.class_values)
        self.y01 = np.array([0 if str(v) == self.classes[0] else 1 for v in enc.labels], dtype=np.int8)
        self.n = ds.n
        self.protocol = protocol if protocol is not None else default_protocol(self.n, seed)
        if isinstance(self.protocol, Kfold) and self.protocol.folds > self.n:
            raise ValueError(f"kfold folds={self.protocol.folds} exceeds n={self.n}")
        self._needs_seed = family_needs_seed(config.family)
        self._fold_seeds: dict[int, int] = {}
        ones = int(self.y01.sum())
        count0, count1 = self.n - ones, ones
        # under LOOCV a single-class training fold occurs exactly when a class
        # has one member and it is held out; this depends only on the label
        # multiset, which permutations preserve
        self._loocv_fallbacks = int(count0 == 1) + int(count1 == 1)
        self._knn_plan = None
        if isinstance(self.protocol, Loocv) and config.family == "knn":
            self._knn_plan = self._build_knn_plan(int(config.param("k")))

    def _fold_seed(self, fold_idx: int) -> int:
        if not self._needs_seed:
            return 0
        cached = self._fold_seeds.get(fold_idx)
        if cached is None:
            cached = int(np.random.SeedSequence((self.seed, fold_idx)).generate_state(1)[0])
            self._fold_seeds[fold_idx] = cached
        return cached

    def _build_knn_plan(self, k: int):
        n, X = self.n, self.X
        flat: list[np.ndarray] = []
        offsets = np.empty(n, dtype=np.int64)
        counts = np.empty(n, dtype=np.int64)
        pos = 0
        k_eff = min(k, n - 1)
        for i in range(n):
            _, inv = column_stats(np.delete(X, i, axis=0))
            d2 = (((X - X[i]) * inv) ** 2).sum(axis=1)
            d2[i] = np.inf
            order = np.argsort(d2, kind="stable")[: n - 1]
            sorted_d2 = d2[order]
            boundary = sorted_d2[k_eff - 1]
            cnt = k_eff
            while cnt < n - 1 and sorted_d2[cnt] <= boundary:
                cnt += 1
            offsets[i] = pos
            counts[i] = cnt
            flat.append(order[:cnt])
            pos += cnt
        return np.concatenate(flat), offsets, counts

    def error_for_labels(self, y01: np.ndarray) -> tuple[float, np.ndarray, int]:
        """(error, pooled predictions in {0,1}, fallback fold count)."""
        if isinstance(self.protocol, Loocv):
            preds, fallbacks = self._loocv(y01)
        else:
            preds, fallbacks = self._kfold(y01)
        mismatches = int((preds != y01).sum())
        return mismatches / self.n, preds, fallbacks

    # -- leave-one-out ------------------------------------------------------

    def _loocv(self, y01: np.ndarray) -> tuple[np.ndarray, int]:
        family = self.config.family
        if family == "majority":
            ones_left = int(y01.sum()) - y01.astype(np.int64)
            zeros_left = (self.n - 1) - ones_left
            return (ones_left > zeros_left).astype(np.int8), 0
        if self._knn_plan is not None:
            flat, offsets, counts = self._knn_plan
            picked = y01.astype(np.int64)[flat]
            ones = np.add.reduceat(picked, offsets)
            return (2 * ones > counts).astype(np.int8), self._loocv_fallbacks
        preds = np.empty(self.n, dtype=np.int8)
        fallbacks = 0
        X = self.X
        for i in range(self.n):
            Xtr = np.delete(X, i, axis=0)
            ytr = np.delete(y01, i)
            ones = int(ytr.sum())
            if ones == 0 or ones == len(ytr):
                preds[i] = 1 if ones else 0
                fallbacks += 1
                continue
            state = fit_indexed(self.config, Xtr, ytr, self._fold_seed(i))
            preds[i] = predict_indexed(self.config, state, X[i : i + 1])[0]
        return preds, fallbacks

    # -- stratified k-fold --------------------------------------------------

    def _fold_assignment(self, y01: np.ndarray) -> np.ndarray:
        assert isinstance(self.protocol, Kfold)
        rng = np.random.default_rng(self.protocol.seed)
        assignment = np.empty(self.n, dtype=np.int64)
        for cls in (0, 1):
            members = np.flatnonzero(y01 == cls)
            members = members[rng.permutation(len(members))]
            assignment[members] = np.arange(len(members)) % self.protocol.folds
        return assignment

    def _kfold(self, y01: np.ndarray) -> tuple[np.ndarray, int]:
        assert isinstance(self.protocol, Kfold)
        assignment = self._fold_assignment(y01)
        preds = np.empty(self.n, dtype=np.int8)
        fallbacks = 0
        for f in range(self.protocol.folds):
            test = assignment == f
            if not test.any():
                continue
            train = ~test
            ytr = y01[train]
            ones = int(ytr.sum())
            if self.config.family != "majority" and (ones == 0 or ones == len(ytr)):
                preds[test] = 1 if ones else 0
                fallbacks += 1
                continue
            if self.config.family == "majority":
                zeros = len(ytr) - ones
                preds[test] = 1 if ones > zeros else 0
                continue
            state = fit_indexed(self.config, self.X[train], ytr, self._fold_seed(f))
            preds[test] = predict_indexed(self.config, state, self.X[test])
        return preds, fallbacks


def cv_error(
    config: ClassifierConfig,
    ds: Dataset,
    protocol: Protocol | None = None,
    seed: int = 0,
) -> CvOutcome:
    """Cross-validated misclassification rate with pooled predictions."""
    engine = _PairEngine(config, ds, protocol, seed)
    error, preds01, fallbacks = engine.error_for_labels(engine.y01)
    classes = np.array(engine.classes, dtype=object)
    return CvOutcome(error=error, predictions=classes[preds01.astype(np.int64)], fallback_folds=fallbacks)


def positive_class_of(ds: Dataset) -> str:
    """The manifest-designated positive class, else the lexicographically larger."""
    return ds.positive_class if ds.positive_class is not None else ds.class_values[-1]


def permutation_test(
    config: ClassifierConfig,
    ds: Dataset,
    k: int = DEFAULT_K,
    seed: int = 0,
    protocol: Protocol | None = None,
    keep_null: bool = False,
) -> SignificanceResult:
    """Permutation-test one classifier on one binary dataset.

    ``k`` independent uniform label permutations are drawn by seeded
    Fisher-Yates (replicate r uses generator seed ``seed + r``); each permuted
    dataset is scored with the identical CV protocol and identical per-fold
    fit seeds as the original.
    """
    if k < 1:
        raise ValueError(f"need k >= 1 permutations, got {k}")
    engine = _PairEngine(config, ds, protocol, seed)
    error0, preds01, fallbacks = engine.error_for_labels(engine.y01)

    positive = positive_class_of(ds)
    pos01 = engine.classes.index(positive)
    true_pos = engine.y01 == pos01
    pred_pos = preds01 == pos01
    table = ContingencyTable(
        tp=int((true_pos & pred_pos).sum()),
        fp=int((~true_pos & pred_pos).sum()),
        fn=int((true_pos & ~pred_pos).sum()),
        tn=int((~true_pos & ~pred_pos).sum()),
    )

    at_most = 0
    kept: list[float] = []
    for r in range(1, k + 1):
        rng = np.random.default_rng(seed + r)
        permuted = fisher_yates_permutation(engine.y01, rng)
        error_r, _, _ = engine.error_for_labels(permuted)
        if error_r <= error0:
            at_most += 1
        if keep_null:
            kept.append(error_r)

    return SignificanceResult(
        error_original=error0,
        f_score=f_score(table),
        p_value=(at_most + 1) / (k + 1),
        k_permutations=k,
        seed=seed,
        fallback_folds=fallbacks,
        permuted_errors=tuple(kept) if keep_null else None,
    )
