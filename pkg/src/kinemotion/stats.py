"""Welch's unequal-variance t-test and Levene's variance-homogeneity test."""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import DegenerateSamplesError


def welch_ttest(a, b) -> tuple[float, float]:
    """Welch t statistic and two-sided p with Welch-Satterthwaite df."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least 2 observations")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    na, nb = len(a), len(b)
    sa, sb = va / na, vb / nb
    if sa + sb == 0.0:
        raise DegenerateSamplesError("zero variance in both samples")
    t = (a.mean() - b.mean()) / np.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    p = 2.0 * special.stdtr(df, -abs(t))
    return float(t), float(p)


def levene_test(a, b) -> tuple[float, float]:
    """Levene W on mean-centered absolute deviations, with F-distribution p."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each sample needs at least 2 observations")
    groups = [np.abs(a - a.mean()), np.abs(b - b.mean())]
    n_total = len(a) + len(b)
    k = len(groups)
    grand = np.concatenate(groups).mean()
    between = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    within = sum(((g - g.mean()) ** 2).sum() for g in groups)
    if within == 0.0:
        raise DegenerateSamplesError("zero variance in both samples")
    w = (n_total - k) / (k - 1) * between / within
    p = special.fdtrc(k - 1, n_total - k, w)
    return float(w), float(p)
