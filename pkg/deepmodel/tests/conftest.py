import numpy as np
import pytest
import torch


@pytest.fixture(autouse=True)
def deterministic_torch():
    torch.manual_seed(0)
    torch.use_deterministic_algorithms(True)
    yield
    torch.use_deterministic_algorithms(False)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def make_volume_store(tmp_path, n_per_class=3, windows=2, shape=(24, 20, 16),
                      gap=4.0, seed=0, tasks=("T2A1",)):
    """Synthetic volume directory: class-dependent blob position + manifest."""
    rng = np.random.default_rng(seed)
    rows = []
    t, v, h = shape
    for idx in range(2 * n_per_class):
        label = 0 if idx < n_per_class else 1
        sid = f"s{idx:02d}"
        for task in tasks:
            for w in range(windows):
                for tag, code in (("original", "orig"), ("jitter#0", "j0"),
                                  ("flip(jitter#0)", "fj0")):
                    arr = rng.normal(0, 0.05, size=shape).astype(np.float32)
                    col = int(h * 0.25 + (gap if label else 0))
                    arr[:, v // 3:2 * v // 3, col:col + 3] += 3.0
                    fname = f"{sid}_{task}_{w:03d}_{code}.npy"
                    np.save(tmp_path / fname, arr)
                    rows.append({"filename": fname, "subject_id": sid,
                                 "task_id": task, "window_index": w,
                                 "aug_tag": tag, "label": label, "usable": 1})
    import csv

    with open(tmp_path / "manifest.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    return rows
