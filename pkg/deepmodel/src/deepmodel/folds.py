"""Subject-level stratified repeated k-fold, byte-compatible with the
experiment harness that consumes dl_predictions.csv.

The assignment contract (documented with the prediction-manifest format):
per repetition r, shuffle each class with a generator seeded by
SeedSequence([seed, crc32("kfold"), r]) and deal it into k chunks whose
sizes differ by at most one; chunk i joins fold i; fold ids are "r{r}f{k}".
"""

from __future__ import annotations

import zlib

import numpy as np


def _rng(seed: int, *keys) -> np.random.Generator:
    words = [int(seed)] + [zlib.crc32(k.encode()) if isinstance(k, str) else int(k)
                           for k in keys]
    return np.random.default_rng(np.random.SeedSequence(words))


def fold_id(repetition: int, fold: int) -> str:
    return f"r{repetition}f{fold}"


def subject_fold_map(subjects: list[tuple[str, int]], k: int, repeats: int,
                     seed: int) -> dict[str, frozenset[str]]:
    """fold_id -> test-subject set; subjects are (subject_id, label) sorted."""
    labels = np.array([label for _, label in subjects])
    out: dict[str, frozenset[str]] = {}
    for r in range(1, repeats + 1):
        rng = _rng(seed, "kfold", r)
        folds: list[list[int]] = [[] for _ in range(k)]
        for cls in np.unique(labels):
            members = np.flatnonzero(labels == cls)
            members = members[rng.permutation(len(members))]
            base, rem = divmod(len(members), k)
            start = 0
            for i in range(k):
                size = base + (1 if i < rem else 0)
                folds[i].extend(members[start:start + size].tolist())
                start += size
        for f in range(k):
            out[fold_id(r, f + 1)] = frozenset(subjects[i][0] for i in folds[f])
    return out
