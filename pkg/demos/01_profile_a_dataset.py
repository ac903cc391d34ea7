"""Profile a dataset: load a CSV and compute its 15-feature characterization.

Run:  python demos/01_profile_a_dataset.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from metarec.corpus import _categorical_dataset, write_dataset
from metarec.data import impute_and_encode, load_dataset
from metarec.features import featurize

work = Path(tempfile.mkdtemp(prefix="metarec_demo_"))

# write a small mixed-type dataset (categorical + numeric columns, some
# missing cells) along with its JSON manifest sidecar
ds = _categorical_dataset("demo", 30, np.random.default_rng(0))
csv_path = write_dataset(ds, work)
print(f"wrote {csv_path}")
print(csv_path.read_text().splitlines()[0])

# loading honors the sidecar: column kinds, class column, missing markers
loaded = load_dataset(csv_path)
print(f"\nloaded {loaded.id}: n={loaded.n} rows, m={loaded.m} attributes")
print(f"kinds: {dict(zip(loaded.column_names, loaded.attribute_kinds))}")
print(f"classes: {loaded.class_values}, has_missing={loaded.has_missing()}")

# the numeric view classifiers consume: mean/mode imputation + one-hot
encoded = impute_and_encode(loaded)
print(f"\nencoded matrix: {encoded.matrix.shape[0]} x {encoded.matrix.shape[1]}")
print(f"encoded columns: {encoded.encoded_names}")

# the 15 features that position this dataset in the recommender's space
vector = featurize(loaded)
print("\ncharacterization:")
print(json.dumps(vector.to_dict(), indent=2))
