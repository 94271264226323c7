"""Classification metrics: rank AUC, confusion rates, voting, ROC averaging."""

from __future__ import annotations

import numpy as np

from .errors import UndefinedMetricError


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) with ties counted half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC undefined with a single class")
    ranks = _average_ranks(scores)
    return (ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def confusion_metrics(probabilities, labels, threshold: float = 0.5) -> tuple[float, float, float]:
    """(accuracy, TPR, TNR) at the threshold; ties predict positive."""
    probabilities = np.asarray(probabilities, dtype=float)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise UndefinedMetricError("no predictions")
    predicted = probabilities >= threshold
    pos = labels == 1
    neg = ~pos
    accuracy = float((predicted == pos).mean())
    tpr = float(predicted[pos].mean()) if pos.any() else float("nan")
    tnr = float((~predicted[neg]).mean()) if neg.any() else float("nan")
    return accuracy, tpr, tnr


def ensemble_vote(task_probabilities) -> float:
    """Mean of one subject's per-task probabilities (absent tasks excluded)."""
    probs = [p for p in task_probabilities if p is not None]
    if not probs:
        raise UndefinedMetricError("no task probabilities to vote on")
    return float(np.mean(probs))


def window_vote(window_probabilities) -> float:
    """Mean probability over all windows and augmented copies of one recording."""
    probs = list(window_probabilities)
    if not probs:
        raise UndefinedMetricError("no window probabilities to vote on")
    return float(np.mean(probs))


def _roc_points(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Operating points (fpr, tpr) from (0,0) to (1,1), thresholds descending."""
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC undefined with a single class")
    order = np.argsort(-scores, kind="mergesort")
    sorted_pos = pos[order]
    tp = np.cumsum(sorted_pos)
    fp = np.cumsum(~sorted_pos)
    # keep only the last point of each tied-score run
    distinct = np.concatenate([np.diff(scores[order]) != 0, [True]])
    fpr = np.concatenate([[0.0], fp[distinct] / n_neg])
    tpr = np.concatenate([[0.0], tp[distinct] / n_pos])
    return fpr, tpr


def _interp_roc(fpr: np.ndarray, tpr: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolation between operating points.

    Vertical jumps (repeated fpr) resolve to the highest tpr achieved at that
    fpr; queries strictly between distinct fprs use the connecting segment.
    """
    xs, first_idx = np.unique(fpr, return_index=True)
    last_idx = np.searchsorted(fpr, xs, side="right") - 1
    t_first = tpr[first_idx]
    t_last = tpr[last_idx]
    out = np.empty(len(grid))
    for g, q in enumerate(grid):
        i = np.searchsorted(xs, q)
        if i < len(xs) and xs[i] == q:
            out[g] = t_last[i]
        else:
            lo, hi = i - 1, i
            frac = (q - xs[lo]) / (xs[hi] - xs[lo])
            out[g] = t_last[lo] + frac * (t_first[hi] - t_last[lo])
    return out


def mean_roc_curve(fold_sets, n_points: int = 101) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vertical ROC averaging over folds: (fpr_grid, mean_tpr, sd_tpr)."""
    fold_sets = list(fold_sets)
    if len(fold_sets) < 2:
        raise UndefinedMetricError("need at least 2 folds to average ROC curves")
    grid = np.linspace(0.0, 1.0, n_points)
    curves = []
    for scores, labels in fold_sets:
        scores = np.asarray(scores, dtype=float)
        labels = np.asarray(labels)
        fpr, tpr = _roc_points(scores, labels)
        curves.append(_interp_roc(fpr, tpr, grid))
    stacked = np.stack(curves)
    return grid, stacked.mean(axis=0), stacked.std(axis=0)
