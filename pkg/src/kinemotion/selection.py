"""Inner-CV model tuning: RFECV for the linear SVM, depth search for the forest.

The SVM tuning runs the paper-style tiers on an (already standardized)
training partition:

  tier 1  per C, eliminate the smallest-|w| feature one at a time and score
          every feature count by 5-fold stratified CV ROC-AUC; keep the count
          with the best mean AUC (ties -> fewer features).
  tier 2  fix each C's feature subset by one elimination pass on the full
          partition, then score SVM(C) on it with 5-fold x 6-repeat CV and
          keep the best C (ties -> smaller C).

Elimination re-solves are warm-started: dropping a feature is a rank-1
downdate of the Gram matrix, so the previous dual point stays feasible.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateLabelsError
from .folds import repeated_stratified_kfold_indices, stratified_kfold_indices
from .forest import forest_probability, train_random_forest
from .metrics import roc_auc
from .rng import derive_rng, derive_seed_sequence
from .svm import DEFAULT_MAX_ITER, DEFAULT_TOL, _recover_bias, _smo_solve

DEFAULT_C_GRID = tuple(float(2.0**e) for e in range(-6, 8))
DEFAULT_DEPTH_GRID = (1, 2, 3, 4, 5, 6)


def _rfe_path(X, ys, C, X_val=None, y_val=None, stop_count=1,
              tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Eliminate features down to stop_count, optionally scoring each count.

    Returns (count_to_auc, active_sets) where active_sets[count] is the
    ascending feature-index array in play at that count.
    """
    n, d = X.shape
    active = np.arange(d)
    xy = X * ys[:, None]
    Q = np.ascontiguousarray(xy @ xy.T)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    count_to_auc: dict[int, float] = {}
    active_sets: dict[int, np.ndarray] = {}
    while True:
        _smo_solve(Q, ys, float(C), alpha, grad, tol, max_iter)
        w = X[:, active].T @ (alpha * ys)
        count = len(active)
        active_sets[count] = active.copy()
        if X_val is not None:
            margins = X_val[:, active] @ w + _recover_bias(ys, grad, alpha, C)
            count_to_auc[count] = roc_auc(margins, y_val)
        if count <= stop_count:
            break
        drop = int(np.argmin(np.abs(w)))  # ties -> lowest index
        u = xy[:, active[drop]]
        Q -= np.outer(u, u)
        grad -= u * (u @ alpha)
        active = np.delete(active, drop)
    return count_to_auc, active_sets


def rfecv_select(
    X: np.ndarray,
    y,
    C_grid=DEFAULT_C_GRID,
    inner_k: int = 5,
    repeats: int = 6,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    return_details: bool = False,
):
    """Pick (feature subset, C) for a standardized training partition.

    With return_details, also returns {"count_by_C", "mean_auc_by_C",
    "best_mean_auc"} from tier 2.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y)
    if X.shape[0] < 10:
        raise ValueError("need at least 10 training rows")
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("need both classes")
    ys = np.where(y == 1, 1.0, -1.0)
    d = X.shape[1]

    tier1_folds = stratified_kfold_indices(y, inner_k, derive_rng(seed, "rfecv-tier1"))
    all_rows = np.arange(X.shape[0])

    best_count: dict[float, int] = {}
    for C in C_grid:
        auc_by_count = np.zeros(d)
        for test_idx in tier1_folds:
            train_idx = np.setdiff1d(all_rows, test_idx)
            scores, _ = _rfe_path(
                X[train_idx], ys[train_idx], C,
                X_val=X[test_idx], y_val=y[test_idx],
                tol=tol, max_iter=max_iter,
            )
            for count, auc in scores.items():
                auc_by_count[count - 1] += auc
        best_count[C] = int(np.argmax(auc_by_count)) + 1  # argmax ties -> fewer features

    subsets = {}
    for C in C_grid:
        _, active_sets = _rfe_path(X, ys, C, stop_count=best_count[C],
                                   tol=tol, max_iter=max_iter)
        subsets[C] = active_sets[best_count[C]]

    tier2_splits = repeated_stratified_kfold_indices(
        y, inner_k, repeats, int(derive_seed_sequence(seed, "rfecv-tier2").generate_state(1)[0])
    )
    best_C = None
    best_auc = -np.inf
    mean_auc_by_C = {}
    for C in C_grid:
        cols = subsets[C]
        aucs = []
        for _, _, test_idx in tier2_splits:
            train_idx = np.setdiff1d(all_rows, test_idx)
            Xtr = X[np.ix_(train_idx, cols)]
            xy = Xtr * ys[train_idx][:, None]
            Q = np.ascontiguousarray(xy @ xy.T)
            alpha = np.zeros(len(train_idx))
            grad = -np.ones(len(train_idx))
            _smo_solve(Q, ys[train_idx], float(C), alpha, grad, tol, max_iter)
            w = Xtr.T @ (alpha * ys[train_idx])
            b = _recover_bias(ys[train_idx], grad, alpha, C)
            aucs.append(roc_auc(X[np.ix_(test_idx, cols)] @ w + b, y[test_idx]))
        mean_auc = float(np.mean(aucs))
        mean_auc_by_C[C] = mean_auc
        if mean_auc > best_auc + 1e-12:  # strict improvement: ties keep smaller C
            best_auc = mean_auc
            best_C = C

    if return_details:
        details = {"count_by_C": best_count, "mean_auc_by_C": mean_auc_by_C,
                   "best_mean_auc": best_auc}
        return subsets[best_C], float(best_C), details
    return subsets[best_C], float(best_C)


def tune_depth(
    X: np.ndarray,
    y,
    grid=DEFAULT_DEPTH_GRID,
    inner_k: int = 5,
    repeats: int = 6,
    seed: int = 0,
    n_trees: int = 500,
) -> int:
    """Best forest max_depth by repeated stratified CV AUC; ties -> shallower."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("need both classes")
    splits = repeated_stratified_kfold_indices(
        y, inner_k, repeats, int(derive_seed_sequence(seed, "depth-splits").generate_state(1)[0])
    )
    all_rows = np.arange(X.shape[0])
    # one deepest forest per split; shallower depths score by truncation,
    # which matches greedy growth stopped at that depth
    auc_by_depth = {depth: [] for depth in grid}
    for s, (_, _, test_idx) in enumerate(splits):
        train_idx = np.setdiff1d(all_rows, test_idx)
        forest_seed = int(derive_seed_sequence(seed, "depth-fit", s).generate_state(1)[0])
        model = train_random_forest(X[train_idx], y[train_idx], max(grid),
                                    n_trees=n_trees, seed=forest_seed)
        for depth in grid:
            probs = forest_probability(model, X[test_idx], depth_cap=depth)
            auc_by_depth[depth].append(roc_auc(probs, y[test_idx]))
    best_depth = None
    best_auc = -np.inf
    for depth in grid:
        mean_auc = float(np.mean(auc_by_depth[depth]))
        if mean_auc > best_auc + 1e-12:
            best_auc = mean_auc
            best_depth = depth
    return int(best_depth)
