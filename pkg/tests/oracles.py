"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately written in the most direct style possible
(dict counting, explicit loops, textbook formulas) and kept separate from the
library code paths it checks.  The oracles were written before the library
implementations and must stay free of imports from the modules they verify,
except for shared frozen definitions (feature order, discretization rule)
that are part of the documented contracts.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


# ---------------------------------------------------------------------------
# entropy / mutual information on small discrete tables
# ---------------------------------------------------------------------------

def entropy_of_counts(counts: list[int]) -> float:
    """Shannon entropy in bits of a frequency table."""
    total = sum(counts)
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def entropy_of_symbols(symbols: list) -> float:
    counter = Counter(symbols)
    return entropy_of_counts([counter[k] for k in sorted(counter)])


def mutual_information(xs: list, ys: list) -> float:
    """I(X;Y) in bits via H(X) + H(Y) - H(X,Y) on explicit joint counts."""
    joint = Counter(zip(xs, ys))
    hx = entropy_of_symbols(list(xs))
    hy = entropy_of_symbols(list(ys))
    hxy = entropy_of_counts([joint[k] for k in sorted(joint)])
    return hx + hy - hxy


def discretize_cell(x: float, lo: float, hi: float, bins: int = 10) -> int:
    """Equal-width bin index with the same pinned arithmetic as the library.

    The expression order ``(x - lo) * bins / (hi - lo)`` is part of the
    documented discretization rule, so the oracle repeats it literally.
    """
    if hi <= lo:
        return 0
    idx = int(math.floor((x - lo) * bins / (hi - lo)))
    if idx < 0:
        return 0
    if idx > bins - 1:
        return bins - 1
    return idx


# ---------------------------------------------------------------------------
# dense statistics on small numeric matrices
# ---------------------------------------------------------------------------

def pearson_abs_mean(columns: list[np.ndarray]) -> float:
    """Mean |Pearson r| over unordered column pairs; zero-variance pairs -> 0."""
    m = len(columns)
    if m < 2:
        return 0.0
    rs = []
    for a in range(m):
        for b in range(a + 1, m):
            x, y = columns[a], columns[b]
            sx, sy = np.std(x), np.std(y)
            if sx == 0.0 or sy == 0.0:
                rs.append(0.0)
            else:
                r = np.corrcoef(x, y)[0, 1]
                rs.append(abs(float(r)))
    return float(np.mean(rs))


def skewness(x: np.ndarray) -> float:
    mu = np.mean(x)
    m2 = np.mean((x - mu) ** 2)
    if m2 == 0.0:
        return 0.0
    m3 = np.mean((x - mu) ** 3)
    return float(m3 / m2**1.5)


def excess_kurtosis(x: np.ndarray) -> float:
    mu = np.mean(x)
    m2 = np.mean((x - mu) ** 2)
    if m2 == 0.0:
        return 0.0
    m4 = np.mean((x - mu) ** 4)
    return float(m4 / m2**2 - 3.0)


def variance_fraction_1d(columns: list[np.ndarray]) -> float:
    """Largest covariance eigenvalue over trace, via np.cov (ddof=1).

    The library divides moments by n instead; the ratio is scale-invariant,
    so any common ddof convention must agree with it.
    """
    if not columns:
        return 0.0
    stacked = np.vstack(columns)
    if stacked.shape[1] < 2:
        return 1.0
    cov = np.atleast_2d(np.cov(stacked))
    trace = float(np.trace(cov))
    if trace <= 0.0:
        return 1.0
    top = float(np.max(np.linalg.eigvalsh(cov)))
    return min(max(top / trace, 0.0), 1.0)


# ---------------------------------------------------------------------------
# full 15-feature reference on a Dataset
# ---------------------------------------------------------------------------

def reference_features(ds) -> dict[str, float]:
    """Recompute all 15 dataset features directly from a Dataset value.

    Mirrors the frozen feature definitions but through independent numerics:
    Counter-based entropies, np.corrcoef/np.cov statistics, and plain Python
    accumulation.
    """
    n, m = ds.n, ds.m
    missing_masks = []
    for col, kind in zip(ds.columns, ds.attribute_kinds):
        if kind == "numeric":
            missing_masks.append(np.isnan(col))
        else:
            missing_masks.append(np.array([v is None for v in col], dtype=bool))

    pct_missing = [float(mask.sum()) / n * 100.0 for mask in missing_masks]
    uniques = []
    for col, mask in zip(ds.columns, missing_masks):
        observed = [col[i] for i in range(n) if not mask[i]]
        uniques.append(len(set(observed)) / n * 100.0)

    # numeric columns, mean-imputed
    numeric_cols = []
    for col, kind, mask in zip(ds.columns, ds.attribute_kinds, missing_masks):
        if kind != "numeric":
            continue
        values = col.astype(float).copy()
        if mask.any():
            fill = float(np.mean(values[~mask])) if (~mask).any() else 0.0
            values[mask] = fill
        numeric_cols.append(values)

    skews = [abs(skewness(c)) for c in numeric_cols]
    kurts = [excess_kurtosis(c) for c in numeric_cols]

    # discretized view of every attribute (numeric binned, categorical as-is)
    labels = [str(v) for v in ds.labels]
    h_class = entropy_of_symbols(labels)
    attr_entropies = []
    attr_entropy_norms = []
    mis = []
    for col, kind, mask in zip(ds.columns, ds.attribute_kinds, missing_masks):
        if kind == "numeric":
            values = col.astype(float).copy()
            if mask.any():
                fill = float(np.mean(values[~mask])) if (~mask).any() else 0.0
                values[mask] = fill
            lo, hi = float(np.min(values)), float(np.max(values))
            symbols = [discretize_cell(float(x), lo, hi) for x in values]
        else:
            observed = [v for v in col if v is not None]
            if observed:
                counter = Counter(observed)
                best = max(counter.values())
                mode = min(t for t, c in counter.items() if c == best)
            else:
                mode = ""
            symbols = [mode if v is None else v for v in col]
        h = entropy_of_symbols(symbols)
        v_j = len(set(symbols))
        attr_entropies.append(h)
        attr_entropy_norms.append(h / math.log2(v_j) if v_j > 1 else 0.0)
        mis.append(mutual_information(symbols, labels))

    mean_mi = float(np.mean(mis)) if mis else 0.0
    mean_h = float(np.mean(attr_entropies)) if attr_entropies else 0.0
    if mean_mi <= 0.0:
        equiv = 1000.0
        noise = 1000.0
    else:
        equiv = min(max(h_class / mean_mi, 0.0), 1000.0)
        noise = min(max((mean_h - mean_mi) / mean_mi, 0.0), 1000.0)

    return {
        "n_instances": float(n),
        "n_attributes": float(m),
        "instance_attribute_ratio": n / m,
        "has_missing": 1.0 if any(mask.any() for mask in missing_masks) else 0.0,
        "pct_missing_avg": float(np.mean(pct_missing)),
        "pct_unique_avg": float(np.mean(uniques)),
        "linear_correlation_avg": pearson_abs_mean(numeric_cols),
        "skewness_avg": float(np.mean(skews)) if skews else 0.0,
        "kurtosis_avg": float(np.mean(kurts)) if kurts else 0.0,
        "variance_fraction_1d": variance_fraction_1d(numeric_cols),
        "class_entropy_norm": h_class / math.log2(len(ds.class_values)),
        "attribute_entropy_norm_avg": float(np.mean(attr_entropy_norms)) if attr_entropy_norms else 0.0,
        "max_norm_mutual_information": min(max(max(mis) / h_class, 0.0), 1.0) if mis else 0.0,
        "equivalent_num_attributes": equiv,
        "noise_to_signal": noise,
    }


# ---------------------------------------------------------------------------
# empirical-CDF integration
# ---------------------------------------------------------------------------

def step_cdf_auc_numeric(values: list[float]) -> float:
    """Numerically integrate the right-continuous empirical CDF on [0, 1].

    The CDF is piecewise constant, so midpoint evaluation between
    consecutive breakpoints integrates it exactly (up to rounding).
    """
    arr = sorted(values)
    points = sorted(set([0.0, 1.0] + arr))
    total = 0.0
    for a, b in zip(points, points[1:]):
        mid = 0.5 * (a + b)
        height = sum(1 for v in arr if v <= mid) / len(arr)
        total += height * (b - a)
    return total


# ---------------------------------------------------------------------------
# recommendation pipeline, straight-line
# ---------------------------------------------------------------------------

def reference_recommendation(
    dataset_vectors: dict[str, list[float]],
    rows_by_dataset: dict[str, list[tuple[str, float, float]]],
    query: list[float],
    strategy: str,
    n_neighbors: int = 5,
    top_per_neighbor: int = 2,
    exclude_id: str | None = None,
) -> tuple[list[str], list[str]]:
    """Return (ranked classifier ids, neighbor ids) by re-deriving the math.

    ``rows_by_dataset`` maps dataset id to (classifier_id, f_score, p_value)
    triples.  Normalization uses per-feature min/max over the stored dataset
    vectors plus the query; scores divide the neighbor metric by the squared
    clamped distance and are summed across repeated classifier ids.
    """
    ids = sorted(k for k in dataset_vectors if k != exclude_id)
    dim = len(query)
    lows, highs = [], []
    for d in range(dim):
        pool = [dataset_vectors[i][d] for i in ids] + [query[d]]
        lows.append(min(pool))
        highs.append(max(pool))

    def norm(vec: list[float]) -> list[float]:
        out = []
        for d in range(dim):
            span = highs[d] - lows[d]
            out.append(0.0 if span == 0.0 else (vec[d] - lows[d]) / span)
        return out

    nq = norm(query)
    dists = []
    for i in ids:
        nv = norm(dataset_vectors[i])
        d = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(nv, nq)))
        dists.append((d, i))
    dists.sort(key=lambda t: (t[0], t[1]))
    neighbors = dists[:n_neighbors]

    scores: dict[str, float] = {}
    for dist, nid in neighbors:
        rows = rows_by_dataset.get(nid, [])
        if strategy == "fscore":
            ordered = sorted(rows, key=lambda r: (-r[1], r[0]))
        else:
            ordered = sorted(rows, key=lambda r: (r[2], r[0]))
        picked: list[tuple[str, float, float]] = []
        for row in ordered:
            if all(row[0] != p[0] for p in picked):
                picked.append(row)
            if len(picked) == top_per_neighbor:
                break
        d_eff = max(dist, 1e-6)
        for row in picked:
            metric = row[1] if strategy == "fscore" else 1.0 - row[2]
            scores[row[0]] = scores.get(row[0], 0.0) + metric / (d_eff * d_eff)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [cid for cid, _ in ranked], [nid for _, nid in neighbors]
