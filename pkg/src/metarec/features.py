"""The 15-dimensional dataset characterization used for dataset similarity.

Three groups of features are computed: general (shape and missingness),
statistical (moments and covariance structure of the numeric attributes),
and information-theoretic (entropies and attribute/label mutual information
on a discretized view).  The exact definitions below are frozen so stored
experiment tables stay comparable across toolkit versions:

* statistical features use the numeric columns only, after mean imputation;
  datasets with fewer than 2 numeric columns get ``linear_correlation_avg =
  0`` and with none all four statistical features are 0;
* numeric attributes are discretized into 10 equal-width bins between the
  column min and max, with the pinned bin expression
  ``floor((x - lo) * 10 / (hi - lo))`` clipped to [0, 9]; constant columns
  occupy a single bin;
* all logarithms are base 2; a zero mean mutual information clamps
  ``equivalent_num_attributes`` and ``noise_to_signal`` to the sentinel 1000,
  and both are capped at 1000 otherwise;
* skewness enters as an absolute value, kurtosis as signed Fisher excess;
  Pearson r over a zero-variance pair is 0.

Every reduction over rows uses exact (correctly rounded) summation, which
makes the whole vector invariant under row permutation, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .data import CATEGORICAL, NUMERIC, Dataset

#: Fixed vectorization order; also the experiment-table column order.
FEATURE_NAMES: tuple[str, ...] = (
    "n_instances",
    "n_attributes",
    "instance_attribute_ratio",
    "has_missing",
    "pct_missing_avg",
    "pct_unique_avg",
    "linear_correlation_avg",
    "skewness_avg",
    "kurtosis_avg",
    "variance_fraction_1d",
    "class_entropy_norm",
    "attribute_entropy_norm_avg",
    "max_norm_mutual_information",
    "equivalent_num_attributes",
    "noise_to_signal",
)

#: Sentinel (and cap) for the two MI-ratio features when attributes carry
#: no information about the labels.
MI_RATIO_CAP = 1000.0

DISCRETIZATION_BINS = 10


@dataclass(frozen=True)
class MetaFeatureVector:
    """One dataset's 15 features, in the fixed :data:`FEATURE_NAMES` order."""

    n_instances: int
    n_attributes: int
    instance_attribute_ratio: float
    has_missing: int
    pct_missing_avg: float
    pct_unique_avg: float
    linear_correlation_avg: float
    skewness_avg: float
    kurtosis_avg: float
    variance_fraction_1d: float
    class_entropy_norm: float
    attribute_entropy_norm_avg: float
    max_norm_mutual_information: float
    equivalent_num_attributes: float
    noise_to_signal: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(float(value)):
                raise ValueError(f"feature {f.name} is not finite: {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array([float(getattr(self, name)) for name in FEATURE_NAMES], dtype=np.float64)

    def to_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in FEATURE_NAMES}

    @classmethod
    def from_mapping(cls, values: dict[str, float]) -> "MetaFeatureVector":
        missing = [name for name in FEATURE_NAMES if name not in values]
        if missing:
            raise ValueError(f"feature mapping lacks {missing}")
        kwargs = {name: float(values[name]) for name in FEATURE_NAMES}
        kwargs["n_instances"] = int(kwargs["n_instances"])
        kwargs["n_attributes"] = int(kwargs["n_attributes"])
        kwargs["has_missing"] = int(kwargs["has_missing"])
        return cls(**kwargs)


def _fsum_mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0


def _missing_mask(col: np.ndarray, kind: str) -> np.ndarray:
    return np.isnan(col) if kind == NUMERIC else np.array([v is None for v in col], dtype=bool)


def _imputed_numeric_columns(ds: Dataset) -> list[np.ndarray]:
    """Numeric columns with missing cells replaced by the column mean."""
    out = []
    for col, kind in zip(ds.columns, ds.attribute_kinds):
        if kind != NUMERIC:
            continue
        mask = np.isnan(col)
        values = col.astype(np.float64, copy=True)
        if mask.any():
            observed = values[~mask]
            values[mask] = _fsum_mean(observed) if observed.size else 0.0
        out.append(values)
    return out


def extract_general(ds: Dataset) -> dict[str, float]:
    """Shape and missingness profile (6 features)."""
    n, m = ds.n, ds.m
    masks = [_missing_mask(col, kind) for col, kind in zip(ds.columns, ds.attribute_kinds)]
    pct_missing = [int(mask.sum()) / n * 100.0 for mask in masks]
    pct_unique = []
    for col, mask in zip(ds.columns, masks):
        observed = {col[i] for i in range(n) if not mask[i]}
        pct_unique.append(len(observed) / n * 100.0)
    return {
        "n_instances": float(n),
        "n_attributes": float(m),
        "instance_attribute_ratio": n / m,
        "has_missing": 1.0 if any(bool(mask.any()) for mask in masks) else 0.0,
        "pct_missing_avg": _fsum_mean(pct_missing),
        "pct_unique_avg": _fsum_mean(pct_unique),
    }


def _central_moments(x: np.ndarray, upto: int) -> list[float]:
    n = len(x)
    mu = math.fsum(x) / n
    centered = [float(v) - mu for v in x]
    return [math.fsum(c**k for c in centered) / n for k in range(2, upto + 1)]


def extract_statistical(ds: Dataset) -> dict[str, float]:
    """Moment and covariance structure of the numeric attributes (4 features)."""
    cols = _imputed_numeric_columns(ds)
    m_num = len(cols)
    n = ds.n

    if m_num >= 2:
        means = [math.fsum(c) / n for c in cols]
        centered = [[float(v) - mu for v in c] for c, mu in zip(cols, means)]
        variances = [math.fsum(v * v for v in c) / n for c in centered]
        abs_rs = []
        for a in range(m_num):
            for b in range(a + 1, m_num):
                denom = math.sqrt(variances[a]) * math.sqrt(variances[b])
                if denom == 0.0:
                    abs_rs.append(0.0)
                else:
                    cov = math.fsum(x * y for x, y in zip(centered[a], centered[b])) / n
                    abs_rs.append(abs(cov / denom))
        corr_avg = _fsum_mean(abs_rs)
    else:
        corr_avg = 0.0

    skews = []
    kurts = []
    for c in cols:
        m2, m3, m4 = _central_moments(c, 4)
        skews.append(abs(m3 / m2**1.5) if m2 > 0.0 else 0.0)
        kurts.append(m4 / m2**2 - 3.0 if m2 > 0.0 else 0.0)

    if m_num == 0:
        vf = 0.0
    else:
        means = [math.fsum(c) / n for c in cols]
        centered = [[float(v) - mu for v in c] for c, mu in zip(cols, means)]
        cov = np.empty((m_num, m_num), dtype=np.float64)
        for a in range(m_num):
            for b in range(a, m_num):
                cov_ab = math.fsum(x * y for x, y in zip(centered[a], centered[b])) / n
                cov[a, b] = cov_ab
                cov[b, a] = cov_ab
        trace = math.fsum(cov[a, a] for a in range(m_num))
        if trace <= 0.0:
            vf = 1.0
        else:
            top = float(np.max(np.linalg.eigvalsh(cov)))
            vf = min(max(top / trace, 0.0), 1.0)

    return {
        "linear_correlation_avg": corr_avg,
        "skewness_avg": _fsum_mean(skews),
        "kurtosis_avg": _fsum_mean(kurts),
        "variance_fraction_1d": vf,
    }


def _discretize_numeric(values: np.ndarray) -> list[int]:
    lo = float(np.min(values))
    hi = float(np.max(values))
    if hi <= lo:
        return [0] * len(values)
    bins = DISCRETIZATION_BINS
    out = []
    for x in values:
        idx = int(math.floor((float(x) - lo) * bins / (hi - lo)))
        out.append(min(max(idx, 0), bins - 1))
    return out


def _symbol_columns(ds: Dataset) -> list[list]:
    """Discrete view of every attribute after imputation."""
    columns = []
    for col, kind in zip(ds.columns, ds.attribute_kinds):
        if kind == NUMERIC:
            mask = np.isnan(col)
            values = col.astype(np.float64, copy=True)
            if mask.any():
                observed = values[~mask]
                values[mask] = _fsum_mean(observed) if observed.size else 0.0
            columns.append(_discretize_numeric(values))
        else:
            observed = [v for v in col if v is not None]
            if observed:
                counts: dict[str, int] = {}
                for t in observed:
                    counts[t] = counts.get(t, 0) + 1
                best = max(counts.values())
                mode = min(t for t, c in counts.items() if c == best)
            else:
                mode = ""
            columns.append([mode if v is None else v for v in col])
    return columns


def _entropy(symbols: list) -> float:
    counts: dict = {}
    for s in symbols:
        counts[s] = counts.get(s, 0) + 1
    total = len(symbols)
    terms = [-(c / total) * math.log2(c / total) for _, c in sorted(counts.items())]
    return math.fsum(terms)


def _mutual_information(symbols: list, labels: list) -> float:
    """I(X;C) in bits from the joint frequency table, clipped at 0."""
    joint: dict = {}
    x_counts: dict = {}
    c_counts: dict = {}
    for x, c in zip(symbols, labels):
        joint[(x, c)] = joint.get((x, c), 0) + 1
        x_counts[x] = x_counts.get(x, 0) + 1
        c_counts[c] = c_counts.get(c, 0) + 1
    total = len(symbols)
    terms = []
    for (x, c), cnt in sorted(joint.items()):
        p_xc = cnt / total
        p_x = x_counts[x] / total
        p_c = c_counts[c] / total
        terms.append(p_xc * math.log2(p_xc / (p_x * p_c)))
    return max(math.fsum(terms), 0.0)


def extract_information_theoretic(ds: Dataset) -> dict[str, float]:
    """Entropy and mutual-information profile (5 features)."""
    labels = [str(v) for v in ds.labels]
    h_class = _entropy(labels)
    symbol_columns = _symbol_columns(ds)

    entropies = []
    entropy_norms = []
    mis = []
    for symbols in symbol_columns:
        h = _entropy(symbols)
        v_j = len(set(symbols))
        entropies.append(h)
        entropy_norms.append(h / math.log2(v_j) if v_j > 1 else 0.0)
        mis.append(_mutual_information(symbols, labels))

    mean_h = _fsum_mean(entropies)
    mean_mi = _fsum_mean(mis)
    if mis and h_class > 0.0:
        max_norm_mi = min(max(max(mis) / h_class, 0.0), 1.0)
    else:
        max_norm_mi = 0.0
    if mean_mi <= 0.0:
        equiv = MI_RATIO_CAP
        noise = MI_RATIO_CAP
    else:
        equiv = min(max(h_class / mean_mi, 0.0), MI_RATIO_CAP)
        noise = min(max((mean_h - mean_mi) / mean_mi, 0.0), MI_RATIO_CAP)

    return {
        "class_entropy_norm": h_class / math.log2(len(ds.class_values)),
        "attribute_entropy_norm_avg": _fsum_mean(entropy_norms),
        "max_norm_mutual_information": max_norm_mi,
        "equivalent_num_attributes": equiv,
        "noise_to_signal": noise,
    }


def featurize(ds: Dataset) -> MetaFeatureVector:
    """Concatenate the three extractor groups in the documented order."""
    values: dict[str, float] = {}
    values.update(extract_general(ds))
    values.update(extract_statistical(ds))
    values.update(extract_information_theoretic(ds))
    return MetaFeatureVector.from_mapping(values)
