"""Subject-level stratified repeated k-fold plans (leakage-proof by construction)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StratificationError
from .rng import derive_rng


def stratified_kfold_indices(labels: np.ndarray, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffle each class and deal it into k chunks whose sizes differ by <= 1.

    Returns per-fold test-row indices; folds partition range(len(labels)).
    """
    labels = np.asarray(labels)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if len(members) < k:
            raise StratificationError(
                f"class {cls} has {len(members)} members, fewer than k={k}"
            )
        members = members[rng.permutation(len(members))]
        base, rem = divmod(len(members), k)
        start = 0
        for i in range(k):
            size = base + (1 if i < rem else 0)
            folds[i].extend(members[start:start + size].tolist())
            start += size
    return [np.array(sorted(f), dtype=int) for f in folds]


def repeated_stratified_kfold_indices(
    labels: np.ndarray, k: int, repeats: int, seed: int
) -> list[tuple[int, int, np.ndarray]]:
    """(repetition, fold, test_indices) triples; repetitions reshuffle independently."""
    out = []
    for r in range(1, repeats + 1):
        rng = derive_rng(seed, "kfold", r)
        for f, test_idx in enumerate(stratified_kfold_indices(labels, k, rng), start=1):
            out.append((r, f, test_idx))
    return out


def fold_id(repetition: int, fold: int) -> str:
    return f"r{repetition}f{fold}"


@dataclass
class FoldPlan:
    """Test-subject assignment for every (repetition, fold) evaluation."""

    subjects: list[tuple[str, int]]          # (subject_id, label)
    k: int
    repeats: int
    master_seed: int
    assignments: dict[str, frozenset[str]] = field(default_factory=dict)  # fold_id -> test subjects

    def fold_ids(self) -> list[str]:
        return [fold_id(r, f) for r in range(1, self.repeats + 1) for f in range(1, self.k + 1)]

    def test_subjects(self, fid: str) -> frozenset[str]:
        return self.assignments[fid]

    def train_subjects(self, fid: str) -> frozenset[str]:
        test = self.assignments[fid]
        return frozenset(s for s, _ in self.subjects) - test


def stratified_repeated_kfold(
    subjects: list[tuple[str, int]], k: int = 4, repeats: int = 2, seed: int = 0
) -> FoldPlan:
    """Stratified plan over subjects; deterministic in (subjects order, seed)."""
    labels = np.array([label for _, label in subjects])
    plan = FoldPlan(subjects=list(subjects), k=k, repeats=repeats, master_seed=seed)
    for r, f, test_idx in repeated_stratified_kfold_indices(labels, k, repeats, seed):
        plan.assignments[fold_id(r, f)] = frozenset(subjects[i][0] for i in test_idx)
    return plan
