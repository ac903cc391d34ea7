"""Does a classifier actually learn, or does it just memorize noise?

Compares the label-permutation p-value of a knn classifier on a dataset with
real structure against the same classifier on pure label noise.  The F-score
alone can look deceptively decent on noise; the permutation test separates
the two cases cleanly.

Run:  python demos/02_permutation_significance.py
"""

import numpy as np

from metarec.classifiers import make_config
from metarec.data import dataset_from_arrays
from metarec.significance import permutation_test

rng = np.random.default_rng(42)
n = 40

# dataset A: two well-separated blobs; labels follow the geometry
X = rng.normal(size=(n, 2))
X[: n // 2] += 2.5
structured = dataset_from_arrays(
    "structured", [X[:, 0], X[:, 1]], ["numeric", "numeric"], ["hot"] * (n // 2) + ["cold"] * (n // 2)
)

# dataset B: identical attributes, labels assigned by a coin flip
noise_labels = ["hot", "cold"] * (n // 2)
noisy = dataset_from_arrays("noise", [X[:, 0], X[rng.permutation(n), 1]], ["numeric", "numeric"],
                            [noise_labels[i] for i in rng.permutation(n)])

config = make_config("knn", {"k": 5})
for ds in (structured, noisy):
    result = permutation_test(config, ds, k=199, seed=7, keep_null=True)
    nulls = np.array(result.permuted_errors)
    verdict = "significant" if result.significant else "not significant"
    print(f"{ds.id:10s}  loocv error={result.error_original:.3f}  F={result.f_score:.3f}  "
          f"p={result.p_value:.3f} ({verdict} at 0.05)")
    print(f"{'':12s}null errors: min={nulls.min():.3f} mean={nulls.mean():.3f} max={nulls.max():.3f}")
