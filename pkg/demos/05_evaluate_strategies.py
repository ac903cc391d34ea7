"""Evaluate both recommendation strategies by leave-one-dataset-out replay.

For each dataset: recommend from the other datasets' rows only, then find the
recommended classifier's F-score rank among the dataset's own rows.  The
normalized ranks aggregate into a CDF whose area summarizes the strategy
(1.0 = always recommends the best classifier, 0.5 ~ random).

Run:  python demos/05_evaluate_strategies.py
"""

from metarec.classifiers import make_config
from metarec.corpus import build_corpus
from metarec.evaluate import agreement_matrix, leave_one_dataset_out
from metarec.store import run_experiments

grid = [
    make_config("majority"),
    make_config("knn", {"k": 1}),
    make_config("knn", {"k": 5}),
    make_config("naive_bayes"),
    make_config("logistic_regression", {"l2": 1.0}),
    make_config("svm", {"c": 1.0}),
    make_config("decision_tree", {"max_depth": 6, "min_leaf": 2}),
]
print("running a reduced campaign over the 12-dataset corpus ...")
table, _ = run_experiments(build_corpus(seed=7), grid, k=49, seed=7, jobs=2)

for strategy in ("pvalue", "fscore"):
    report = leave_one_dataset_out(table, strategy)
    print(f"\nstrategy={strategy}: AUC={report.auc:.4f} mean nrank={report.mean_nrank:.4f}")
    for record in report.records:
        print(f"  {record.dataset_id:18s} -> {record.recommended:42s} rank {record.rank}/{record.m}")

matrix = agreement_matrix(table)
print("\nF-score vs p-value agreement (percent of rows):")
for f_band in ("good", "neutral", "poor"):
    cells = "  ".join(f"{p_band}={matrix.percentages[(f_band, p_band)]:5.1f}%" for p_band in ("good", "neutral", "poor"))
    print(f"  F {f_band:8s} {cells}")
