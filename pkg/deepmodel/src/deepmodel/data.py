"""Volume-manifest access and temporal frame sampling."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
import torch


@dataclass(frozen=True)
class ManifestRow:
    filename: str
    subject_id: str
    task_id: str
    window_index: int
    aug_tag: str
    label: int
    usable: bool


def read_manifest(volumes_dir: str) -> list[ManifestRow]:
    path = os.path.join(volumes_dir, "manifest.csv")
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append(ManifestRow(
                filename=r["filename"],
                subject_id=r["subject_id"],
                task_id=r["task_id"],
                window_index=int(r["window_index"]),
                aug_tag=r["aug_tag"],
                label=int(r["label"]),
                usable=r["usable"] == "1",
            ))
    return [r for r in rows if r.usable]


def subjects_with_labels(rows: list[ManifestRow]) -> list[tuple[str, int]]:
    seen: dict[str, int] = {}
    for r in rows:
        if r.subject_id in seen and seen[r.subject_id] != r.label:
            raise ValueError(f"subject {r.subject_id} has conflicting labels")
        seen[r.subject_id] = r.label
    return sorted(seen.items())


def sample_frame_indices(total: int, count: int,
                         rng: np.random.Generator | None = None) -> np.ndarray:
    """count frame indices spanning the window uniformly.

    With an rng, one frame is drawn per uniform segment (training jitter);
    without, segment centers are taken (deterministic evaluation).
    """
    if count >= total:
        return np.arange(total)
    edges = np.linspace(0, total, count + 1)
    if rng is None:
        return np.floor((edges[:-1] + edges[1:]) / 2).astype(np.int64)
    lo = np.ceil(edges[:-1]).astype(np.int64)
    hi = np.maximum(np.floor(edges[1:]).astype(np.int64), lo + 1)
    return np.minimum(lo + rng.integers(0, hi - lo), total - 1)


def load_clip(volumes_dir: str, row: ManifestRow, t_sample: int,
              rng: np.random.Generator | None = None) -> torch.Tensor:
    """(1, T_sample, H, W) float32 tensor from one NPY volume."""
    arr = np.load(os.path.join(volumes_dir, row.filename))
    idx = sample_frame_indices(arr.shape[0], t_sample, rng)
    return torch.from_numpy(arr[idx].astype(np.float32)).unsqueeze(0)
