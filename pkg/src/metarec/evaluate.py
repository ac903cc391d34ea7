"""Recommendation-quality evaluation over an experiment table.

The harness replays the recommender in leave-one-dataset-out fashion: for
each stored dataset it recommends from the remaining rows only, then checks
where the recommended classifier lands among that dataset's own rows sorted
by F-score.  The landing position, normalized by the dataset's row count
(``nrank`` in (0, 1], 0 best), is aggregated into a histogram, an empirical
CDF, and the area under that CDF (1.0 = always recommended the best row).

Also here: the good/neutral/poor discretization of both metrics and the 3x3
agreement matrix between the F-score and p-value readings of the same runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .recommend import DEFAULT_NEIGHBORS, DEFAULT_TOP_PER_NEIGHBOR, recommend
from .store import ExperimentRow, ExperimentTable, rows_for_dataset

logger = logging.getLogger(__name__)

BANDS = ("good", "neutral", "poor")

#: f-score band edges: good [0.9, 1], neutral [0.5, 0.9), poor [0, 0.5)
F_GOOD_LO = 0.9
F_NEUTRAL_LO = 0.5
#: p-value band edges: good [0, 0.045], neutral (0.045, 0.2], poor (0.2, 1]
P_GOOD_HI = 0.045
P_NEUTRAL_HI = 0.2

HISTOGRAM_BINS = 10


def discretize(metric: str, value: float) -> str:
    """Band of one metric value; interval closures follow the band edges above."""
    if metric == "fscore":
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"f-score out of [0,1]: {value!r}")
        if value >= F_GOOD_LO:
            return "good"
        return "neutral" if value >= F_NEUTRAL_LO else "poor"
    if metric == "pvalue":
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"p-value out of [0,1]: {value!r}")
        if value <= P_GOOD_HI:
            return "good"
        return "neutral" if value <= P_NEUTRAL_HI else "poor"
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class AgreementMatrix:
    """Row counts and percentages per (F-band, p-band) cell."""

    counts: dict[tuple[str, str], int]
    percentages: dict[tuple[str, str], float]
    total: int

    def to_json_dict(self) -> dict:
        cells = []
        for f_band in BANDS:
            for p_band in BANDS:
                cells.append(
                    {
                        "f_band": f_band,
                        "p_band": p_band,
                        "count": self.counts[(f_band, p_band)],
                        "percent": self.percentages[(f_band, p_band)],
                    }
                )
        return {"total": self.total, "cells": cells}


def agreement_matrix(table: ExperimentTable) -> AgreementMatrix:
    """How often the two metrics land in each discretized band pair."""
    if not table.rows:
        raise ValueError("experiment table is empty")
    counts = {(f, p): 0 for f in BANDS for p in BANDS}
    for row in table.rows:
        counts[(discretize("fscore", row.f_score), discretize("pvalue", row.p_value))] += 1
    total = len(table.rows)
    percentages = {cell: round(c / total * 100.0, 1) for cell, c in counts.items()}
    return AgreementMatrix(counts=counts, percentages=percentages, total=total)


def rank_of_recommendation(rows: list[ExperimentRow], recommended_id: str) -> tuple[int, int]:
    """(rank, m) of the recommended classifier among a dataset's rows.

    Rows are ranked by F-score descending; the rank is 1 plus the number of
    rows with strictly greater F-score than the recommended classifier's best
    row, so ties share the best position.  A recommendation absent from the
    rows pessimistically ranks last.
    """
    if not rows:
        raise ValueError("no experiment rows for this dataset")
    m = len(rows)
    own = [r.f_score for r in rows if r.classifier_id == recommended_id]
    if not own:
        logger.warning("recommended classifier %s has no rows here; ranking last", recommended_id)
        return m, m
    best = max(own)
    rank = 1 + sum(1 for r in rows if r.f_score > best)
    return rank, m


def cdf_auc(nranks: list[float]) -> float:
    """Area under the empirical CDF of ``nranks`` over [0, 1].

    Integrates the right-continuous step function exactly by summing step
    segments; algebraically this equals 1 - mean(nranks).
    """
    if not nranks:
        raise ValueError("need at least one normalized rank")
    for v in nranks:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"normalized rank out of [0,1]: {v!r}")
    n = len(nranks)
    ordered = sorted(nranks)
    area = 0.0
    prev = 0.0
    seen = 0
    i = 0
    while i < n:
        value = ordered[i]
        j = i
        while j < n and ordered[j] == value:
            j += 1
        area += (value - prev) * (seen / n)
        seen = j
        prev = value
        i = j
    area += (1.0 - prev) * (seen / n)
    return area


@dataclass(frozen=True)
class LodoRecord:
    dataset_id: str
    recommended: str
    rank: int
    m: int
    nrank: float


@dataclass(frozen=True)
class EvalReport:
    """Leave-one-dataset-out outcome for one strategy."""

    strategy: str
    records: tuple[LodoRecord, ...]
    auc: float
    histogram: tuple[tuple[float, float, int], ...]
    cdf: tuple[tuple[float, float], ...]
    skipped: tuple[str, ...] = ()

    @property
    def mean_nrank(self) -> float:
        return math.fsum(r.nrank for r in self.records) / len(self.records)

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "auc": self.auc,
            "mean_nrank": self.mean_nrank,
            "records": [
                {
                    "dataset_id": r.dataset_id,
                    "recommended": r.recommended,
                    "rank": r.rank,
                    "m": r.m,
                    "nrank": r.nrank,
                }
                for r in self.records
            ],
            "histogram": [{"lo": lo, "hi": hi, "count": c} for lo, hi, c in self.histogram],
            "cdf": [{"x": x, "cum_fraction": y} for x, y in self.cdf],
            "skipped": list(self.skipped),
        }


def _histogram(nranks: list[float]) -> tuple[tuple[float, float, int], ...]:
    counts = [0] * HISTOGRAM_BINS
    for v in nranks:
        counts[min(int(v * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)] += 1
    return tuple((b / HISTOGRAM_BINS, (b + 1) / HISTOGRAM_BINS, counts[b]) for b in range(HISTOGRAM_BINS))


def _cdf_points(nranks: list[float]) -> tuple[tuple[float, float], ...]:
    n = len(nranks)
    points = []
    seen = 0
    for value in sorted(set(nranks)):
        seen += sum(1 for v in nranks if v == value)
        points.append((value, seen / n))
    return tuple(points)


def leave_one_dataset_out(
    table: ExperimentTable,
    strategy: str,
    neighbors: int = DEFAULT_NEIGHBORS,
    top_per_neighbor: int = DEFAULT_TOP_PER_NEIGHBOR,
) -> EvalReport:
    """Score every stored dataset's recommendation against its own rows.

    Dataset i's recommendation is computed from a table with all of i's rows
    removed, so the query dataset never influences its own suggestion.
    """
    ids = table.dataset_ids()
    if len(ids) < 2:
        raise ValueError(f"need at least 2 datasets, table has {len(ids)}")
    records = []
    skipped = []
    for dataset_id in ids:
        rest = table.without_dataset(dataset_id)
        if not rest.rows:
            logger.warning("dataset %s has no peers; skipping", dataset_id)
            skipped.append(dataset_id)
            continue
        query = table.features_of(dataset_id)
        rec = recommend(rest, query, strategy=strategy, neighbors=neighbors, top_per_neighbor=top_per_neighbor)
        if not rec.ranked:
            logger.warning("no candidates for dataset %s; skipping", dataset_id)
            skipped.append(dataset_id)
            continue
        own_rows = rows_for_dataset(table, dataset_id)
        rank, m = rank_of_recommendation(own_rows, rec.best)
        records.append(LodoRecord(dataset_id=dataset_id, recommended=rec.best, rank=rank, m=m, nrank=rank / m))
    if not records:
        raise ValueError("every dataset was skipped; cannot evaluate")
    nranks = [r.nrank for r in records]
    return EvalReport(
        strategy=strategy,
        records=tuple(records),
        auc=cdf_auc(nranks),
        histogram=_histogram(nranks),
        cdf=_cdf_points(nranks),
        skipped=tuple(skipped),
    )
