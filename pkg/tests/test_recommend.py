import numpy as np
import pytest

import oracles
from conftest import make_row, simple_vector, table_of, vector_from
from metarec.features import FEATURE_NAMES
from metarec.recommend import (
    DISTANCE_FLOOR,
    nearest_datasets,
    normalize_features,
    recommend,
    score_candidates,
)
from metarec.store import ExperimentTable


def vec_1d(x: float):
    """A vector whose only varying coordinate is linear_correlation_avg."""
    return simple_vector(x)


def one_row_table(entries):
    """entries: (dataset_id, tag, [(classifier_id, f, p), ...])"""
    rows = []
    for dataset_id, tag, row_specs in entries:
        for classifier_id, f, p in row_specs:
            rows.append(make_row(dataset_id=dataset_id, classifier_id=classifier_id, f=f, p=p, vec=vec_1d(tag)))
    return ExperimentTable(rows=tuple(rows))


class TestNormalize:
    def test_min_max_arithmetic(self):
        table = one_row_table(
            [("a", 2.0, [("c()", 0.5, 0.5)]), ("b", 4.0, [("c()", 0.5, 0.5)]), ("c", 6.0, [("c()", 0.5, 0.5)])]
        )
        normalized, query = normalize_features(table, vec_1d(4.0))
        idx = FEATURE_NAMES.index("linear_correlation_avg")
        assert normalized["a"][idx] == 0.0
        assert normalized["b"][idx] == 0.5
        assert normalized["c"][idx] == 1.0
        assert query[idx] == 0.5

    def test_constant_feature_maps_to_zero(self):
        table = one_row_table([("a", 7.0, [("c()", 0.5, 0.5)]), ("b", 7.0, [("c()", 0.5, 0.5)])])
        normalized, query = normalize_features(table, vec_1d(7.0))
        idx = FEATURE_NAMES.index("linear_correlation_avg")
        assert normalized["a"][idx] == 0.0 and normalized["b"][idx] == 0.0 and query[idx] == 0.0

    def test_query_extends_the_range(self):
        table = one_row_table([("a", 0.0, [("c()", 0.5, 0.5)]), ("b", 1.0, [("c()", 0.5, 0.5)])])
        _, query = normalize_features(table, vec_1d(2.0))
        idx = FEATURE_NAMES.index("linear_correlation_avg")
        assert query[idx] == 1.0


class TestNearest:
    def test_zero_distance_clamped(self):
        table = one_row_table([("a", 0.3, [("c()", 0.5, 0.5)]), ("b", 0.9, [("c()", 0.5, 0.5)])])
        near = nearest_datasets(table, vec_1d(0.3))
        assert near[0] == ("a", DISTANCE_FLOOR)

    def test_truncation_to_available(self):
        table = one_row_table([(f"d{i}", i / 10, [("c()", 0.5, 0.5)]) for i in range(3)])
        assert len(nearest_datasets(table, vec_1d(0.0), count=5)) == 3

    def test_hand_computed_order(self):
        table = one_row_table(
            [("lo", 0.0, [("c()", 0.5, 0.5)]), ("mid", 0.5, [("c()", 0.5, 0.5)]), ("hi", 1.0, [("c()", 0.5, 0.5)])]
        )
        near = nearest_datasets(table, vec_1d(0.4))
        assert [d for d, _ in near] == ["mid", "lo", "hi"]

    def test_tie_breaks_by_dataset_id(self):
        table = one_row_table([("zz", 0.5, [("c()", 0.5, 0.5)]), ("aa", 0.5, [("c()", 0.5, 0.5)])])
        near = nearest_datasets(table, vec_1d(0.5))
        assert [d for d, _ in near] == ["aa", "zz"]

    def test_exclude_id_for_leave_one_out(self):
        table = one_row_table([("a", 0.3, [("c()", 0.5, 0.5)]), ("b", 0.6, [("c()", 0.5, 0.5)])])
        near = nearest_datasets(table, vec_1d(0.3), exclude_id="a")
        assert [d for d, _ in near] == ["b"]


class TestScoring:
    def test_unit_distance_fscore(self):
        table = one_row_table([("a", 0.0, [("best()", 0.8, 0.5), ("other()", 0.2, 0.9)])])
        scored = score_candidates([("a", 1.0)], table, "fscore", top_per_neighbor=1)
        assert scored == [("best()", pytest.approx(0.8))]

    def test_unit_distance_pvalue(self):
        table = one_row_table([("a", 0.0, [("best()", 0.8, 0.05), ("other()", 0.9, 0.5)])])
        scored = score_candidates([("a", 1.0)], table, "pvalue", top_per_neighbor=1)
        assert scored == [("best()", pytest.approx(0.95))]

    def test_repeated_classifier_scores_add(self):
        table = one_row_table(
            [
                ("a", 0.0, [("shared()", 0.9, 0.1), ("only_a()", 0.1, 0.9)]),
                ("b", 1.0, [("shared()", 0.4, 0.3), ("only_b()", 0.1, 0.9)]),
            ]
        )
        scored = dict(score_candidates([("a", 1.0), ("b", 1.0)], table, "fscore", top_per_neighbor=1))
        assert scored["shared()"] == pytest.approx(0.9 + 0.4)

    def test_five_neighbors_times_two_gives_ten_candidates(self):
        entries = []
        for i in range(5):
            entries.append(
                (f"d{i}", i / 10, [(f"clf{i}_1()", 0.9, 0.1), (f"clf{i}_2()", 0.8, 0.2), (f"clf{i}_3()", 0.1, 0.9)])
            )
        table = one_row_table(entries)
        neighbors = [(f"d{i}", 1.0) for i in range(5)]
        scored = score_candidates(neighbors, table, "fscore")
        assert len(scored) == 10

    def test_metric_orientation_per_neighbor(self):
        rows = [("hiF_loP()", 0.9, 0.05), ("hiF_hiP()", 0.9, 0.9), ("loF_loP()", 0.2, 0.04)]
        table = one_row_table([("a", 0.0, rows)])
        top_f = score_candidates([("a", 1.0)], table, "fscore")
        top_p = score_candidates([("a", 1.0)], table, "pvalue")
        assert {c for c, _ in top_f[:2]} == {"hiF_loP()", "hiF_hiP()"}
        assert {c for c, _ in top_p[:2]} == {"loF_loP()", "hiF_loP()"}


class TestRecommend:
    def test_dominant_classifier_wins_both_strategies(self):
        entries = []
        for i in range(4):
            entries.append(
                (f"d{i}", i / 10, [("champ()", 0.95, 0.005), ("mid()", 0.6, 0.2), ("weak()", 0.2, 0.8)])
            )
        table = one_row_table(entries)
        for strategy in ("fscore", "pvalue"):
            rec = recommend(table, vec_1d(0.15), strategy=strategy)
            assert rec.best == "champ()"

    def test_single_dataset_table_yields_at_most_two(self):
        table = one_row_table([("only", 0.5, [("a()", 0.9, 0.1), ("b()", 0.8, 0.2), ("c()", 0.7, 0.3)])])
        rec = recommend(table, vec_1d(0.2))
        assert len(rec.ranked) <= 2

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            recommend(ExperimentTable(rows=()), vec_1d(0.5))

    def test_neighbor_scale_invariance(self):
        entries = [(f"d{i}", 0.1 * i, [("a()", 0.9, 0.1), ("b()", 0.5, 0.4)]) for i in range(4)]
        table = one_row_table(entries)
        rec = recommend(table, vec_1d(0.05), strategy="fscore")
        scores = dict(rec.ranked)
        doubled = [(d, 2.0 * dist) for d, dist in rec.neighbors]
        rescored = dict(score_candidates(doubled, table, "fscore"))
        for classifier_id, score in scores.items():
            assert rescored[classifier_id] == pytest.approx(score / 4.0)
        assert [c for c, _ in sorted(rescored.items(), key=lambda kv: (-kv[1], kv[0]))] == [
            c for c, _ in rec.ranked
        ]

    def test_score_positivity(self):
        entries = [(f"d{i}", 0.2 * i, [("a()", 0.0, 1.0), ("b()", 0.5, 0.4)]) for i in range(3)]
        table = one_row_table(entries)
        rec = recommend(table, vec_1d(0.33), strategy="pvalue")
        assert all(score >= 0.0 for _, score in rec.ranked)

    def test_monotonicity_in_f_score(self):
        def build(f_of_x):
            return one_row_table(
                [
                    ("a", 0.0, [("x()", f_of_x, 0.5), ("y()", 0.6, 0.5), ("z()", 0.55, 0.5)]),
                    ("b", 0.9, [("y()", 0.9, 0.5), ("z()", 0.8, 0.5)]),
                ]
            )

        query = vec_1d(0.05)
        low = recommend(build(0.58), query, strategy="fscore")
        high = recommend(build(0.95), query, strategy="fscore")
        rank_low = [c for c, _ in low.ranked].index("x()") if any(c == "x()" for c, _ in low.ranked) else 99
        rank_high = [c for c, _ in high.ranked].index("x()")
        assert rank_high <= rank_low


class TestOracleEquivalence:
    def random_fixture(self, seed):
        gen = np.random.default_rng(seed)
        n_datasets = int(gen.integers(3, 9))
        dataset_vectors = {}
        rows_by_dataset = {}
        rows = []
        classifier_pool = [f"clf{i}()" for i in range(6)]
        for d in range(n_datasets):
            dataset_id = f"ds{d}"
            values = np.round(gen.random(len(FEATURE_NAMES)), 3)
            # integer-valued fields must stay integers to survive storage
            values[0] = float(gen.integers(4, 200))
            values[1] = float(gen.integers(1, 12))
            values[2] = values[0] / values[1]
            values[3] = float(gen.integers(0, 2))
            # engineer occasional exact feature ties between datasets
            if d > 0 and gen.random() < 0.3:
                values = np.array(dataset_vectors[f"ds{d - 1}"])
            vec = vector_from(values)
            dataset_vectors[dataset_id] = [float(v) for v in values]
            picks = gen.choice(len(classifier_pool), size=int(gen.integers(1, 5)), replace=False)
            dataset_rows = []
            for c in picks:
                f = float(np.round(gen.choice([0.25, 0.5, 0.5, 0.75, 0.9]), 6))
                p = float(gen.choice([0.005, 0.05, 0.05, 0.25, 0.75]))
                dataset_rows.append((classifier_pool[int(c)], f, p))
                rows.append(
                    make_row(dataset_id=dataset_id, classifier_id=classifier_pool[int(c)], f=f, p=p, vec=vec)
                )
            rows_by_dataset[dataset_id] = dataset_rows
        query = np.round(gen.random(len(FEATURE_NAMES)), 3)
        query[0] = float(gen.integers(4, 200))
        query[1] = float(gen.integers(1, 12))
        query[2] = query[0] / query[1]
        query[3] = float(gen.integers(0, 2))
        return ExperimentTable(rows=tuple(rows)), dataset_vectors, rows_by_dataset, [float(v) for v in query]

    def test_twenty_randomized_fixtures_match_reference(self):
        for seed in range(20):
            table, dataset_vectors, rows_by_dataset, query = self.random_fixture(seed)
            for strategy in ("fscore", "pvalue"):
                rec = recommend(table, vector_from(query), strategy=strategy)
                expected_ranking, expected_neighbors = oracles.reference_recommendation(
                    dataset_vectors, rows_by_dataset, query, strategy
                )
                assert [c for c, _ in rec.ranked] == expected_ranking, (seed, strategy)
                assert [d for d, _ in rec.neighbors] == expected_neighbors, (seed, strategy)
