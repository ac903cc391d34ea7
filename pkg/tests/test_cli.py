import json

import numpy as np
import pytest

from metarec.cli import main
from metarec.corpus import write_dataset
from metarec.features import FEATURE_NAMES
from metarec.store import load_table

from conftest import make_numeric_dataset


@pytest.fixture(scope="module")
def small_world(tmp_path_factory):
    """Three tiny datasets, a grid file, and a campaign table built by the CLI."""
    root = tmp_path_factory.mktemp("world")
    data_dir = root / "data"
    rng = np.random.default_rng(99)
    for i, name in enumerate(["apple", "banana", "cherry"]):
        X = rng.normal(size=(10, 2))
        X[:5, 0] += 2.5 + i
        labels = ["p"] * 5 + ["q"] * 5
        write_dataset(make_numeric_dataset(name, X, labels), data_dir)
    grid_path = root / "grid.json"
    grid_path.write_text(
        json.dumps(
            [
                {"family": "majority"},
                {"family": "knn", "params": {"k": 1}},
                {"family": "naive_bayes"},
            ]
        )
    )
    table_path = root / "table.csv"
    report_path = root / "report.json"
    code = main(
        [
            "run",
            *[str(data_dir / f"{n}.csv") for n in ("apple", "banana", "cherry")],
            "--out",
            str(table_path),
            "--grid",
            str(grid_path),
            "--k",
            "19",
            "--seed",
            "3",
            "--report",
            str(report_path),
        ]
    )
    assert code == 0
    return {"root": root, "data": data_dir, "table": table_path, "grid": grid_path, "report": report_path}


class TestFeaturize:
    def test_json_output(self, small_world, capsys):
        code = main(["featurize", str(small_world["data"] / "apple.csv")])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert list(payload) == list(FEATURE_NAMES)

    def test_csv_format(self, small_world, capsys):
        code = main(["featurize", str(small_world["data"] / "apple.csv"), "--format", "csv"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == ",".join(FEATURE_NAMES)
        assert len(lines) == 2

    def test_missing_file_exits_2(self, small_world, capsys):
        assert main(["featurize", str(small_world["data"] / "nope.csv")]) == 2

    def test_out_file(self, small_world, tmp_path):
        out = tmp_path / "vec.json"
        assert main(["featurize", str(small_world["data"] / "apple.csv"), "--out", str(out)]) == 0
        assert list(json.loads(out.read_text())) == list(FEATURE_NAMES)


class TestRun:
    def test_table_written_with_report(self, small_world):
        table = load_table(small_world["table"])
        assert len(table.rows) == 9
        report = json.loads(small_world["report"].read_text())
        assert report["rows_written"] == 9
        assert report["campaign_seed"] == 3

    def test_rerun_into_same_table_refuses_duplicates(self, small_world, capsys):
        code = main(
            [
                "run",
                str(small_world["data"] / "apple.csv"),
                "--out",
                str(small_world["table"]),
                "--grid",
                str(small_world["grid"]),
                "--k",
                "19",
                "--seed",
                "3",
            ]
        )
        assert code == 1

    def test_jobs_produce_identical_tables(self, small_world, tmp_path):
        args = [
            "run",
            str(small_world["data"] / "apple.csv"),
            str(small_world["data"] / "banana.csv"),
            "--grid",
            str(small_world["grid"]),
            "--k",
            "9",
            "--seed",
            "11",
        ]
        t1, t2 = tmp_path / "j1.csv", tmp_path / "j2.csv"
        assert main(args + ["--out", str(t1), "--jobs", "1"]) == 0
        assert main(args + ["--out", str(t2), "--jobs", "2"]) == 0
        assert t1.read_bytes() == t2.read_bytes()

    def test_multiclass_input_is_split(self, tmp_path, capsys):
        from metarec.data import dataset_from_arrays

        labels = ["a"] * 6 + ["b"] * 6 + ["c"] * 6 + ["d"] * 6
        rng = np.random.default_rng(5)
        x = np.concatenate([rng.normal(loc=3 * i, size=6) for i in range(4)])
        ds = dataset_from_arrays("multi", [x], ["numeric"], labels)
        write_dataset(ds, tmp_path)
        out = tmp_path / "t.csv"
        (tmp_path / "grid.json").write_text('[{"family": "majority"}]')
        code = main(
            [
                "run",
                str(tmp_path / "multi.csv"),
                "--out",
                str(out),
                "--grid",
                str(tmp_path / "grid.json"),
                "--k",
                "9",
                "--seed",
                "1",
            ]
        )
        assert code == 0
        table = load_table(out)
        assert table.dataset_ids() == ["multi__a_vs_b", "multi__c_vs_d"]

    def test_env_seed_fallback(self, small_world, tmp_path, monkeypatch):
        monkeypatch.setenv("METAREC_SEED", "3")
        out = tmp_path / "env.csv"
        code = main(
            [
                "run",
                str(small_world["data"] / "apple.csv"),
                str(small_world["data"] / "banana.csv"),
                str(small_world["data"] / "cherry.csv"),
                "--out",
                str(out),
                "--grid",
                str(small_world["grid"]),
                "--k",
                "19",
            ]
        )
        assert code == 0
        assert out.read_bytes() == small_world["table"].read_bytes()


class TestRecommend:
    def test_human_output_defaults_to_pvalue(self, small_world, capsys):
        code = main(
            ["recommend", str(small_world["data"] / "apple.csv"), "--table", str(small_world["table"])]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "strategy: pvalue" in out
        assert "ranking:" in out

    def test_json_output_matches_library(self, small_world, capsys):
        from metarec.data import load_dataset
        from metarec.features import featurize
        from metarec.recommend import recommend

        code = main(
            [
                "recommend",
                str(small_world["data"] / "apple.csv"),
                "--table",
                str(small_world["table"]),
                "--strategy",
                "fscore",
                "--json",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        table = load_table(small_world["table"])
        ds = load_dataset(small_world["data"] / "apple.csv")
        rec = recommend(table, featurize(ds), strategy="fscore", exclude_id=ds.id)
        assert payload["ranked"][0]["classifier_id"] == rec.best

    def test_empty_table_is_domain_failure(self, small_world, tmp_path, capsys):
        from metarec.store import ExperimentTable, save_table

        empty = tmp_path / "empty.csv"
        save_table(ExperimentTable(rows=()), empty)
        code = main(
            ["recommend", str(small_world["data"] / "apple.csv"), "--table", str(empty)]
        )
        assert code == 1


class TestEvaluateAndAgreement:
    def test_evaluate_prints_both_strategies(self, small_world, capsys):
        code = main(["evaluate", "--table", str(small_world["table"])])
        assert code == 0
        out = capsys.readouterr().out
        assert "strategy=fscore" in out and "strategy=pvalue" in out
        assert "agreement matrix" in out

    def test_evaluate_out_dir_series(self, small_world, tmp_path):
        out_dir = tmp_path / "eval"
        code = main(["evaluate", "--table", str(small_world["table"]), "--out-dir", str(out_dir)])
        assert code == 0
        assert (out_dir / "eval_report.json").exists()
        for strategy in ("fscore", "pvalue"):
            for suffix in ("histogram", "cdf"):
                series = out_dir / f"lodo_{strategy}_{suffix}.csv"
                assert series.exists()
                assert len(series.read_text().splitlines()) >= 2
        payload = json.loads((out_dir / "eval_report.json").read_text())
        assert set(payload["strategies"]) == {"fscore", "pvalue"}
        assert payload["agreement"]["total"] == 9

    def test_single_strategy_flag(self, small_world, capsys):
        code = main(["evaluate", "--table", str(small_world["table"]), "--strategy", "fscore"])
        assert code == 0
        out = capsys.readouterr().out
        assert "strategy=fscore" in out and "strategy=pvalue" not in out

    def test_agreement_json(self, small_world, capsys):
        code = main(["agreement", "--table", str(small_world["table"]), "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["total"] == 9
        assert len(payload["cells"]) == 9


class TestGenCorpus:
    def test_writes_12_datasets_with_sidecars(self, tmp_path, capsys):
        code = main(["gen-corpus", "--out-dir", str(tmp_path / "corpus"), "--seed", "7"])
        assert code == 0
        csvs = sorted((tmp_path / "corpus").glob("*.csv"))
        assert len(csvs) == 12
        for path in csvs:
            assert path.with_suffix(".json").exists()

    def test_deterministic_across_reruns(self, tmp_path):
        main(["gen-corpus", "--out-dir", str(tmp_path / "c1"), "--seed", "5"])
        main(["gen-corpus", "--out-dir", str(tmp_path / "c2"), "--seed", "5"])
        for path in sorted((tmp_path / "c1").glob("*")):
            twin = tmp_path / "c2" / path.name
            assert path.read_bytes() == twin.read_bytes()
