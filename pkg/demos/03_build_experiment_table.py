"""Build an experiment table: every classifier config on every dataset.

Uses a trimmed grid and a small permutation count so the demo finishes in
about a minute; the real campaign defaults are k=199 and the full 15-config
grid.

Run:  python demos/03_build_experiment_table.py
"""

import tempfile
import time
from pathlib import Path

from metarec.classifiers import make_config
from metarec.corpus import build_corpus
from metarec.store import run_experiments, save_report, save_table

work = Path(tempfile.mkdtemp(prefix="metarec_demo_"))
datasets = build_corpus(seed=7)[:6]
grid = [
    make_config("majority"),
    make_config("knn", {"k": 5}),
    make_config("naive_bayes"),
    make_config("decision_tree", {"max_depth": 6, "min_leaf": 2}),
    make_config("logistic_regression", {"l2": 1.0}),
]

print(f"{len(datasets)} datasets x {len(grid)} configs, k=49 permutations each")
started = time.monotonic()
table, report = run_experiments(datasets, grid, k=49, seed=7, jobs=2)
print(f"finished in {time.monotonic() - started:.1f}s; {report.rows_written} rows, "
      f"{len(report.skipped)} skipped")

table_path = work / "table.csv"
save_table(table, table_path)
save_report(report, work / "report.json")
print(f"table -> {table_path}")

print("\nbest row per dataset (by F-score):")
for dataset_id in table.dataset_ids():
    best = max((r for r in table.rows if r.dataset_id == dataset_id), key=lambda r: r.f_score)
    print(f"  {dataset_id:18s} {best.classifier_id:42s} F={best.f_score:.3f} p={best.p_value:.3f}")
