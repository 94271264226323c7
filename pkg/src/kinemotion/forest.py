"""Bootstrap-bagged Gini decision trees with sqrt(d) feature sampling.

Trees live in dense complete-binary-tree arrays (node i -> children 2i+1,
2i+2; feature -1 marks a leaf), which keeps growth and prediction in compact
jitted kernels. Each tree's RNG seed derives from (forest seed, tree index),
so extending a forest never changes earlier trees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateLabelsError


@njit(cache=True)
def _grow_tree(X, y, max_depth, max_features, seed, feat, thr, val):  # pragma: no cover - jitted
    """Grow one tree on a bootstrap sample into the dense arrays in place."""
    n, d = X.shape
    np.random.seed(seed)
    idx = np.empty(n, np.int64)
    for i in range(n):
        idx[i] = np.random.randint(0, n)

    stack = np.empty((feat.shape[0] + 1, 4), np.int64)  # node, start, end, depth
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    stack[0, 3] = 0
    top = 1
    perm = np.empty(d, np.int64)
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        m = end - start

        n_pos = 0
        for r in range(start, end):
            n_pos += y[idx[r]]
        val[node] = 1.0 if 2 * n_pos >= m else 0.0  # leaf vote, ties positive
        feat[node] = -1
        if depth >= max_depth or n_pos == 0 or n_pos == m:
            continue

        for i in range(d):
            perm[i] = i
        for i in range(max_features):
            j = i + np.random.randint(0, d - i)
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp

        best_imp = np.inf
        best_feat = -1
        best_thr = 0.0
        vals = np.empty(m)
        for fi in range(max_features):
            f = perm[fi]
            for r in range(m):
                vals[r] = X[idx[start + r], f]
            order = np.argsort(vals, kind="mergesort")
            cpos = 0
            for r in range(m - 1):
                cpos += y[idx[start + order[r]]]
                v = vals[order[r]]
                v_next = vals[order[r + 1]]
                if v_next == v:
                    continue
                nl = r + 1
                nr = m - nl
                pl = cpos / nl
                pr = (n_pos - cpos) / nr
                imp = nl * 2.0 * pl * (1.0 - pl) + nr * 2.0 * pr * (1.0 - pr)
                if imp < best_imp - 1e-12:
                    best_imp = imp
                    best_feat = f
                    best_thr = 0.5 * (v + v_next)
        if best_feat < 0:
            continue  # all candidate features constant on this node

        lo = start
        hi = end - 1
        while lo <= hi:
            if X[idx[lo], best_feat] <= best_thr:
                lo += 1
            else:
                tmp = idx[lo]
                idx[lo] = idx[hi]
                idx[hi] = tmp
                hi -= 1
        feat[node] = best_feat
        thr[node] = best_thr
        stack[top, 0] = 2 * node + 1
        stack[top, 1] = start
        stack[top, 2] = lo
        stack[top, 3] = depth + 1
        stack[top + 1, 0] = 2 * node + 2
        stack[top + 1, 1] = lo
        stack[top + 1, 2] = end
        stack[top + 1, 3] = depth + 1
        top += 2


@njit(cache=True)
def _forest_predict(feats, thrs, vals, X, depth_cap):  # pragma: no cover - jitted
    n_trees = feats.shape[0]
    n = X.shape[0]
    out = np.zeros(n)
    for s in range(n):
        acc = 0.0
        for t in range(n_trees):
            node = 0
            depth = 0
            while feats[t, node] >= 0 and depth < depth_cap:
                if X[s, feats[t, node]] <= thrs[t, node]:
                    node = 2 * node + 1
                else:
                    node = 2 * node + 2
                depth += 1
            acc += vals[t, node]
        out[s] = acc / n_trees
    return out


@dataclass
class ForestModel:
    features: np.ndarray    # (n_trees, n_nodes) int64, -1 for leaves
    thresholds: np.ndarray  # (n_trees, n_nodes) float64
    values: np.ndarray      # (n_trees, n_nodes) float64 leaf votes
    max_depth: int
    n_trees: int
    seed: int

    def tree_depth(self, t: int) -> int:
        """Deepest internal node + 1; bounded by max_depth by construction."""
        internal = np.flatnonzero(self.features[t] >= 0)
        if len(internal) == 0:
            return 0
        return int(np.floor(np.log2(internal.max() + 1))) + 1


def train_random_forest(
    X: np.ndarray, y, max_depth: int, n_trees: int = 500, seed: int = 0
) -> ForestModel:
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("need both classes to train a forest")
    if not 1 <= max_depth <= 16:
        raise ValueError("max_depth must be in [1, 16]")
    y01 = (y == 1).astype(np.int64)  # accepts 0/1 or -1/+1 labels
    n_nodes = 2 ** (max_depth + 1) - 1
    # ceil so tiny d still explores every feature (d=2 must see both for XOR)
    max_features = int(np.ceil(np.sqrt(X.shape[1])))
    feats = np.full((n_trees, n_nodes), -1, dtype=np.int64)
    thrs = np.zeros((n_trees, n_nodes))
    vals = np.zeros((n_trees, n_nodes))
    # generate_state(m)[:n] == generate_state(n): growing a forest with the
    # same seed never changes its earlier trees
    tree_seeds = np.random.SeedSequence(int(seed)).generate_state(n_trees)
    for t in range(n_trees):
        _grow_tree(X, y01, max_depth, max_features, int(tree_seeds[t]),
                   feats[t], thrs[t], vals[t])
    return ForestModel(features=feats, thresholds=thrs, values=vals,
                       max_depth=max_depth, n_trees=n_trees, seed=seed)


def forest_probability(model: ForestModel, x: np.ndarray,
                       depth_cap: int | None = None) -> np.ndarray | float:
    """Fraction of trees voting positive.

    depth_cap < max_depth predicts with each tree truncated at that depth;
    since splits are greedy, this equals a forest grown to depth_cap from the
    same per-node decisions (inner nodes store their majority vote).
    """
    X = np.atleast_2d(np.ascontiguousarray(x, dtype=float))
    cap = model.max_depth if depth_cap is None else int(depth_cap)
    probs = _forest_predict(model.features, model.thresholds, model.values, X, cap)
    return float(probs[0]) if probs.shape == (1,) else probs
