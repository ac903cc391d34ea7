"""Classifier recommendation from an experiment table of prior runs.

Given a new dataset's feature vector, the engine finds the most similar
stored datasets (Euclidean distance on min-max-normalized features), takes
each neighbor's best-scoring classifiers, weights them by the inverse squared
neighbor distance, sums the weights of classifiers proposed by several
neighbors, and returns the resulting descending ranking.

Two strategies exist: ``fscore`` prefers a neighbor's highest F-scores with
candidate weight F1 / d^2, while ``pvalue`` prefers its smallest permutation
p-values with weight (1 - p) / d^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .features import MetaFeatureVector
from .store import ExperimentRow, ExperimentTable, rows_for_dataset

logger = logging.getLogger(__name__)

STRATEGIES = ("fscore", "pvalue")

#: Lower clamp applied to neighbor distances before the 1/d^2 weighting.
DISTANCE_FLOOR = 1e-6

DEFAULT_NEIGHBORS = 5
DEFAULT_TOP_PER_NEIGHBOR = 2


@dataclass(frozen=True)
class Recommendation:
    """A ranked list of classifier ids with aggregated scores."""

    strategy: str
    ranked: tuple[tuple[str, float], ...]
    neighbors: tuple[tuple[str, float], ...]

    @property
    def best(self) -> str:
        return self.ranked[0][0]

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "ranked": [{"classifier_id": c, "score": s} for c, s in self.ranked],
            "neighbors": [{"dataset_id": d, "distance": dist} for d, dist in self.neighbors],
        }


def normalize_features(
    table: ExperimentTable, query: MetaFeatureVector, exclude_id: str | None = None
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Min-max normalize stored dataset vectors together with the query.

    Ranges are taken per feature over the table's distinct datasets plus the
    query; a feature constant across all of them maps to 0 everywhere.
    """
    ids = [d for d in table.dataset_ids() if d != exclude_id]
    if not ids:
        raise ValueError("experiment table holds no usable datasets")
    vectors = {d: table.features_of(d).as_array() for d in ids}
    stacked = np.vstack([vectors[d] for d in ids] + [query.as_array()])
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0.0, span, 1.0)

    def norm(vec: np.ndarray) -> np.ndarray:
        out = (vec - lo) / safe
        return np.where(span > 0.0, out, 0.0)

    return {d: norm(v) for d, v in vectors.items()}, norm(query.as_array())


def nearest_datasets(
    table: ExperimentTable,
    query: MetaFeatureVector,
    count: int = DEFAULT_NEIGHBORS,
    exclude_id: str | None = None,
) -> list[tuple[str, float]]:
    """The ``count`` most similar stored datasets with clamped distances.

    Ordering uses the raw Euclidean distance with ties broken by dataset id;
    the reported (and score-ready) distances are clamped below at
    :data:`DISTANCE_FLOOR`.
    """
    normalized, query_vec = normalize_features(table, query, exclude_id)
    scored = []
    for dataset_id in sorted(normalized):
        delta = normalized[dataset_id] - query_vec
        distance = math.sqrt(float(np.dot(delta, delta)))
        scored.append((distance, dataset_id))
    scored.sort(key=lambda t: (t[0], t[1]))
    return [(dataset_id, max(distance, DISTANCE_FLOOR)) for distance, dataset_id in scored[:count]]


def _top_rows(rows: list[ExperimentRow], strategy: str, top: int) -> list[ExperimentRow]:
    """Best ``top`` rows of one neighbor, one per distinct classifier id."""
    if strategy == "fscore":
        ordered = sorted(rows, key=lambda r: (-r.f_score, r.classifier_id))
    else:
        ordered = sorted(rows, key=lambda r: (r.p_value, r.classifier_id))
    picked: list[ExperimentRow] = []
    for row in ordered:
        if all(row.classifier_id != p.classifier_id for p in picked):
            picked.append(row)
        if len(picked) == top:
            break
    return picked


def score_candidates(
    neighbors: list[tuple[str, float]],
    table: ExperimentTable,
    strategy: str,
    top_per_neighbor: int = DEFAULT_TOP_PER_NEIGHBOR,
) -> list[tuple[str, float]]:
    """Aggregate candidate scores across neighbors.

    Each neighbor contributes its top classifiers with weight metric / d^2
    (metric = F1, or 1 - p); repeated classifier ids across neighbors have
    their weights summed.  Returned sorted by score descending, id ascending.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    scores: dict[str, float] = {}
    for dataset_id, distance in neighbors:
        rows = rows_for_dataset(table, dataset_id)
        if not rows:
            logger.warning("neighbor %s has no experiment rows; skipping", dataset_id)
            continue
        for row in _top_rows(rows, strategy, top_per_neighbor):
            metric = row.f_score if strategy == "fscore" else 1.0 - row.p_value
            weight = metric / (distance * distance)
            scores[row.classifier_id] = scores.get(row.classifier_id, 0.0) + weight
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def recommend(
    table: ExperimentTable,
    query: MetaFeatureVector,
    strategy: str = "pvalue",
    neighbors: int = DEFAULT_NEIGHBORS,
    top_per_neighbor: int = DEFAULT_TOP_PER_NEIGHBOR,
    exclude_id: str | None = None,
) -> Recommendation:
    """Full ranking for a new dataset; rank 1 is the headline suggestion."""
    if not table.rows:
        raise ValueError("experiment table is empty")
    near = nearest_datasets(table, query, count=neighbors, exclude_id=exclude_id)
    ranked = score_candidates(near, table, strategy, top_per_neighbor)
    return Recommendation(strategy=strategy, ranked=tuple(ranked), neighbors=tuple(near))
