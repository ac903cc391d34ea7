"""Recommend classifiers for an unseen dataset from prior experiments.

Builds a small experiment table over part of the corpus, then asks for a
recommendation for a held-out dataset under both scoring strategies.

Run:  python demos/04_recommend_for_new_dataset.py
"""

from metarec.classifiers import make_config
from metarec.corpus import build_corpus
from metarec.features import featurize
from metarec.recommend import recommend
from metarec.store import run_experiments

datasets = build_corpus(seed=7)
held_out = datasets[5]          # a ring-family dataset the table never sees
known = [ds for ds in datasets if ds.id != held_out.id]

grid = [
    make_config("majority"),
    make_config("knn", {"k": 1}),
    make_config("knn", {"k": 5}),
    make_config("naive_bayes"),
    make_config("logistic_regression", {"l2": 1.0}),
    make_config("decision_tree", {"max_depth": 6, "min_leaf": 2}),
]
print(f"building a table over {len(known)} datasets (holding out {held_out.id}) ...")
table, _ = run_experiments(known, grid, k=49, seed=7, jobs=2)

query = featurize(held_out)
for strategy in ("pvalue", "fscore"):
    rec = recommend(table, query, strategy=strategy)
    print(f"\nstrategy={strategy}")
    print("  nearest datasets: " + ", ".join(f"{d} ({dist:.3f})" for d, dist in rec.neighbors))
    for position, (classifier_id, score) in enumerate(rec.ranked[:4], start=1):
        print(f"  {position}. {classifier_id:42s} score={score:8.3f}")
