"""Window-voted subject predictions and the dl_predictions.csv emitter."""

from __future__ import annotations

import torch

from .data import ManifestRow, load_clip


def predict_windows(model, rows: list[ManifestRow], volumes_dir: str,
                    t_sample: int) -> list[float]:
    model.eval()
    probs = []
    with torch.no_grad():
        for row in rows:
            clip = load_clip(volumes_dir, row, t_sample).unsqueeze(0)
            probs.append(float(model(clip)))
    return probs


def predict_subject(model, rows: list[ManifestRow], volumes_dir: str,
                    t_sample: int = 100) -> float:
    """Mean probability over every window and augmented copy of one recording."""
    if not rows:
        raise ValueError("no windows for subject")
    probs = predict_windows(model, rows, volumes_dir, t_sample)
    return sum(probs) / len(probs)


def predictions_to_csv(records: list[dict]) -> str:
    lines = ["subject_id,task_id,fold_id,probability"]
    for r in records:
        lines.append(f"{r['subject_id']},{r['task_id']},{r['fold_id']},{r['probability']!r}")
    return "\n".join(lines) + "\n"
