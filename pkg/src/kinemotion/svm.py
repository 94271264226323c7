"""Linear SVM trained by SMO on the hinge-loss dual, plus feature standardization.

Primal objective: 0.5*||w||^2 + C * sum_i max(0, 1 - y_i*(w.x_i + b)) with an
unregularized bias. The dual is solved with maximal-violating-pair SMO on the
precomputed Gram matrix, which is exact, deterministic, and warm-startable
along recursive-feature-elimination paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import DegenerateLabelsError

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 100_000


@njit(cache=True)
def _smo_solve(Q, y, C, alpha, grad, tol, max_iter):  # pragma: no cover - jitted
    """Minimize 0.5*a'Qa - sum(a) s.t. y'a = 0, 0 <= a <= C, in place.

    Working-set selection is second order: i maximizes the KKT violation,
    j maximizes the guaranteed objective decrease against i. Returns
    (iterations, kkt_gap). alpha/grad may hold a feasible warm start; grad
    must equal Q@alpha - 1 on entry.
    """
    n = y.shape[0]
    iterations = 0
    gap = np.inf
    while iterations < max_iter:
        m_val = -np.inf
        i = -1
        big_m_val = np.inf
        for r in range(n):
            yg = -y[r] * grad[r]
            if (y[r] > 0 and alpha[r] < C) or (y[r] < 0 and alpha[r] > 0):
                if yg > m_val:
                    m_val = yg
                    i = r
            if (y[r] < 0 and alpha[r] < C) or (y[r] > 0 and alpha[r] > 0):
                if yg < big_m_val:
                    big_m_val = yg
        gap = m_val - big_m_val
        if i < 0 or big_m_val == np.inf or gap <= tol:
            break
        j = -1
        best_gain = -np.inf
        for r in range(n):
            if not ((y[r] < 0 and alpha[r] < C) or (y[r] > 0 and alpha[r] > 0)):
                continue
            diff = m_val - (-y[r] * grad[r])
            if diff <= 0.0:
                continue
            curv = Q[i, i] + Q[r, r] - 2.0 * y[i] * y[r] * Q[i, r]
            if curv < 1e-12:
                curv = 1e-12
            gain = diff * diff / curv
            if gain > best_gain:
                best_gain = gain
                j = r
        if j < 0:
            break
        curv = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
        if curv < 1e-12:
            curv = 1e-12
        step = (m_val - (-y[j] * grad[j])) / curv  # optimal move, > 0
        if y[i] > 0:
            hi_i = C - alpha[i]
        else:
            hi_i = alpha[i]
        if y[j] > 0:
            hi_j = alpha[j]
        else:
            hi_j = C - alpha[j]
        if step > hi_i:
            step = hi_i
        if step > hi_j:
            step = hi_j
        d_i = y[i] * step
        d_j = -y[j] * step
        alpha[i] += d_i
        alpha[j] += d_j
        for r in range(n):
            grad[r] += Q[r, i] * d_i + Q[r, j] * d_j
        iterations += 1
    return iterations, gap


@dataclass
class Standardizer:
    """Per-feature zero-mean unit-variance transform, fit on training rows only."""

    mean: np.ndarray = field(default=None)
    scale: np.ndarray = field(default=None)

    def fit(self, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        self.mean = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale = np.where(sd > 0, sd, 1.0)  # zero-variance features map to 0
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)


@dataclass
class LinearModel:
    """Hinge-loss linear classifier restricted to a feature subset."""

    weights: np.ndarray            # aligned with selected_features
    bias: float
    C: float
    selected_features: np.ndarray  # ascending column indices into the full matrix
    kkt_gap: float = 0.0
    iterations: int = 0

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X[:, self.selected_features] @ self.weights + self.bias


def _as_signed_labels(y) -> np.ndarray:
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateLabelsError(f"need both classes, got {classes.tolist()}")
    if set(classes.tolist()) == {0, 1}:
        return np.where(y == 1, 1.0, -1.0)
    if set(classes.tolist()) == {-1, 1}:
        return y.astype(float)
    raise ValueError(f"labels must be binary 0/1 or -1/+1, got {classes.tolist()}")


def _recover_bias(y: np.ndarray, grad: np.ndarray, alpha: np.ndarray, C: float) -> float:
    # free SVs satisfy y*(w.x + b) = 1 exactly; else midpoint of the KKT bounds
    neg_yg = -y * grad
    free = (alpha > 1e-9 * C) & (alpha < C * (1 - 1e-9))
    if free.any():
        return float(neg_yg[free].mean())
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
    hi = neg_yg[up].max() if up.any() else 0.0
    lo = neg_yg[low].min() if low.any() else 0.0
    return float(0.5 * (hi + lo))


def train_linear_svm(
    X: np.ndarray,
    y,
    C: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LinearModel:
    """Fit on all columns of X; deterministic (the solver has no randomness)."""
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("X must be 2-D with at least 2 rows")
    ys = _as_signed_labels(y)
    xy = X * ys[:, None]
    Q = np.ascontiguousarray(xy @ xy.T)
    alpha = np.zeros(len(ys))
    grad = -np.ones(len(ys))
    iterations, gap = _smo_solve(Q, ys, float(C), alpha, grad, tol, max_iter)
    w = X.T @ (alpha * ys)
    b = _recover_bias(ys, grad, alpha, C)
    return LinearModel(
        weights=w,
        bias=b,
        C=float(C),
        selected_features=np.arange(X.shape[1]),
        kkt_gap=float(gap),
        iterations=int(iterations),
    )


def svm_objective(X: np.ndarray, y, w: np.ndarray, b: float, C: float) -> float:
    """Primal hinge objective; the quantity the solver approximately minimizes."""
    ys = _as_signed_labels(y)
    margins = ys * (np.asarray(X, dtype=float) @ w + b)
    return float(0.5 * w @ w + C * np.maximum(0.0, 1.0 - margins).sum())


def svm_probability(model: LinearModel, x: np.ndarray) -> np.ndarray | float:
    """Logistic squashing of the margin; monotone, 0.5 at the boundary."""
    margin = model.decision_function(x)
    prob = 1.0 / (1.0 + np.exp(-margin))
    return float(prob[0]) if prob.shape == (1,) else prob
