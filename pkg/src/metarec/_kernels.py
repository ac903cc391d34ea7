"""Compiled numeric kernels for the classifier trainers.

All kernels are deterministic given their arguments; stochastic ones seed
numba's internal RNG themselves.  Labels arrive as {0, 1} (or {-1, +1} for
the margin trainer) and features as C-contiguous float64 matrices.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def logistic_train(X, y, lam, max_iter, tol):
    """L2-regularized logistic regression by full-batch gradient descent.

    The step size is 1/L with L an upper bound on the gradient's Lipschitz
    constant (mean squared row norm / 4 + lam); the bias is unregularized.
    Stops when the max-norm of the gradient drops below ``tol``.
    """
    n, m = X.shape
    w = np.zeros(m)
    b = 0.0
    sq = 0.0
    for i in range(n):
        for j in range(m):
            sq += X[i, j] * X[i, j]
    lr = 1.0 / (sq / (4.0 * n) + lam + 1e-12)
    for _ in range(max_iter):
        z = X @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        d = (p - y) / n
        gw = X.T @ d + lam * w
        gb = d.sum()
        gmax = abs(gb)
        for j in range(m):
            if abs(gw[j]) > gmax:
                gmax = abs(gw[j])
        if gmax < tol:
            break
        w -= lr * gw
        b -= lr * gb
    return w, b


@njit(cache=True)
def mlp_train(X, y, width, epochs, lr, seed):
    """One-hidden-layer network, logistic activations throughout.

    Full-batch gradient descent on the cross-entropy loss; only the weight
    initialization consumes the seed.
    """
    np.random.seed(seed)
    n, m = X.shape
    W1 = np.random.standard_normal((m, width)) / np.sqrt(m)
    b1 = np.zeros(width)
    W2 = np.random.standard_normal(width) / np.sqrt(width)
    b2 = 0.0
    for _ in range(epochs):
        H = 1.0 / (1.0 + np.exp(-(X @ W1 + b1)))
        o = 1.0 / (1.0 + np.exp(-(H @ W2 + b2)))
        d_o = (o - y) / n
        gW2 = H.T @ d_o
        gb2 = d_o.sum()
        dH = np.outer(d_o, W2) * H * (1.0 - H)
        gW1 = X.T @ dH
        gb1 = dH.sum(axis=0)
        W1 -= lr * gW1
        b1 -= lr * gb1
        W2 -= lr * gW2
        b2 -= lr * gb2
    return W1, b1, W2, b2


@njit(cache=True)
def mlp_forward(X, W1, b1, W2, b2):
    H = 1.0 / (1.0 + np.exp(-(X @ W1 + b1)))
    return 1.0 / (1.0 + np.exp(-(H @ W2 + b2)))


@njit(cache=True)
def svm_train(X, ypm, lam, epochs, batch, seed):
    """Linear hinge-loss SVM via mini-batch SGD (Pegasos-style schedule).

    Weight step is 1/(lam*t); the unregularized bias moves with step 1/t.
    The seed drives the per-epoch shuffles only.
    """
    np.random.seed(seed)
    n, m = X.shape
    w = np.zeros(m)
    b = 0.0
    idx = np.arange(n)
    t = 0
    for _ in range(epochs):
        for i in range(n - 1, 0, -1):
            j = np.random.randint(0, i + 1)
            tmp = idx[i]
            idx[i] = idx[j]
            idx[j] = tmp
        start = 0
        while start < n:
            end = min(start + batch, n)
            t += 1
            eta = 1.0 / (lam * t)
            cnt = end - start
            acc = np.zeros(m)
            accb = 0.0
            for p in range(start, end):
                i = idx[p]
                margin = b
                for j in range(m):
                    margin += X[i, j] * w[j]
                if ypm[i] * margin < 1.0:
                    for j in range(m):
                        acc[j] += ypm[i] * X[i, j]
                    accb += ypm[i]
            scale = 1.0 - eta * lam
            for j in range(m):
                w[j] = scale * w[j] + (eta / cnt) * acc[j]
            b += accb / (cnt * t)
            start = end
    return w, b


@njit(cache=True)
def tree_build(X, y, max_depth, min_split, max_features, seed):
    """Grow a gini decision tree; returns flat node arrays.

    Nodes smaller than ``min_split`` (or pure, or at ``max_depth`` when it is
    >= 0) become leaves labelled by majority with ties toward class 0.
    Candidate features are a uniform ``max_features``-subset per node when
    that is < m, evaluated in ascending index order so gini ties resolve to
    the lowest feature and then the lowest threshold.
    """
    n, m = X.shape
    if max_features < m:
        np.random.seed(seed)
    cap = 2 * n + 1
    feat = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    leaf = np.full(cap, -1, np.int8)

    idx = np.arange(n)
    pool = np.empty(m, np.int64)
    vals = np.empty(n, np.float64)
    tmp = np.empty(n, np.int64)

    stack_node = np.empty(cap, np.int64)
    stack_start = np.empty(cap, np.int64)
    stack_end = np.empty(cap, np.int64)
    stack_depth = np.empty(cap, np.int64)
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        s = stack_start[top]
        e = stack_end[top]
        depth = stack_depth[top]
        size = e - s
        ones = 0
        for t in range(s, e):
            ones += y[idx[t]]
        if size < min_split or ones == 0 or ones == size or (max_depth >= 0 and depth >= max_depth):
            leaf[node] = 1 if 2 * ones > size else 0
            continue

        for j in range(m):
            pool[j] = j
        if max_features < m:
            for j in range(max_features):
                r = j + np.random.randint(0, m - j)
                tmp_f = pool[j]
                pool[j] = pool[r]
                pool[r] = tmp_f
            cand = np.sort(pool[:max_features])
        else:
            cand = pool

        # exhaustive split search over the candidate features
        best_score = np.inf
        best_feat = -1
        best_thr = 0.0
        n_cand = max_features if max_features < m else m
        for c in range(n_cand):
            f = cand[c]
            for t in range(size):
                vals[t] = X[idx[s + t], f]
            order = np.argsort(vals[:size])
            c1 = 0
            for p in range(size - 1):
                c1 += y[idx[s + order[p]]]
                lo = vals[order[p]]
                hi = vals[order[p + 1]]
                if lo < hi:
                    nl = p + 1
                    nr = size - nl
                    c1l = c1
                    c0l = nl - c1l
                    c1r = ones - c1l
                    c0r = nr - c1r
                    gl = 1.0 - (c0l / nl) ** 2 - (c1l / nl) ** 2
                    gr = 1.0 - (c0r / nr) ** 2 - (c1r / nr) ** 2
                    score = (nl * gl + nr * gr) / size
                    if score < best_score:
                        best_score = score
                        best_feat = f
                        best_thr = 0.5 * (lo + hi)

        if best_feat < 0:
            leaf[node] = 1 if 2 * ones > size else 0
            continue

        k1 = 0
        for t in range(size):
            if X[idx[s + t], best_feat] <= best_thr:
                tmp[k1] = idx[s + t]
                k1 += 1
        k2 = k1
        for t in range(size):
            if X[idx[s + t], best_feat] > best_thr:
                tmp[k2] = idx[s + t]
                k2 += 1
        for t in range(size):
            idx[s + t] = tmp[t]

        feat[node] = best_feat
        thr[node] = best_thr
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        stack_node[top] = right_id
        stack_start[top] = s + k1
        stack_end[top] = e
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = left_id
        stack_start[top] = s
        stack_end[top] = s + k1
        stack_depth[top] = depth + 1
        top += 1

    return feat[:n_nodes], thr[:n_nodes], left[:n_nodes], right[:n_nodes], leaf[:n_nodes]


@njit(cache=True)
def tree_predict(feat, thr, left, right, leaf, X):
    n = X.shape[0]
    out = np.empty(n, np.int8)
    for i in range(n):
        node = 0
        while leaf[node] < 0:
            if X[i, feat[node]] <= thr[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf[node]
    return out
