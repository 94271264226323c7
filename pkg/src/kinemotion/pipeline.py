"""Workspace-level stage runners shared by the CLI and the acceptance suite.

Workspace layout:
    raw/{subject}_{task}.tsv  +  raw/ground_truth.csv
    cleaned/{subject}_{task}.kseq
    features.csv
    volumes/*.npy + volumes/manifest.csv
    reports/report.csv, report.json, predictions.csv
All outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import csv
import io
import os
import tempfile

from .cleaning import resample_uniform, select_participant
from .config import RunConfig
from .experiment import (FeatureRow, predictions_to_csv, report_to_csv,
                         report_to_json, run_experiment)
from .features import N_FEATURES, compute_feature_vector
from .skeleton_io import parse_tracking_log, read_sequence, write_sequence
from .synth import generate_cohort
from .volumes import export_heatmap_dataset


def write_atomic(path: str, data: bytes | str) -> None:
    mode = "wb" if isinstance(data, bytes) else "w"
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_synth(cfg: RunConfig) -> int:
    from .skeleton_io import format_tracking_log

    cohort = generate_cohort(cfg.cohort)
    raw_dir = os.path.join(cfg.workspace, "raw")
    for rec in cohort.recordings:
        write_atomic(os.path.join(raw_dir, f"{rec.subject_id}_{rec.task_id}.tsv"),
                     format_tracking_log(rec.log))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["subject_id", "task_id", "label",
                                             "body_id", "target_speed"])
    writer.writeheader()
    writer.writerows(cohort.ground_truth_rows())
    write_atomic(os.path.join(raw_dir, "ground_truth.csv"), buf.getvalue())
    return len(cohort.recordings)


def read_ground_truth(workspace: str) -> dict[tuple[str, str], int]:
    path = os.path.join(workspace, "raw", "ground_truth.csv")
    labels: dict[tuple[str, str], int] = {}
    if not os.path.exists(path):
        return labels
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            labels[(row["subject_id"], row["task_id"])] = int(row["label"])
    return labels


def run_clean(cfg: RunConfig) -> int:
    raw_dir = os.path.join(cfg.workspace, "raw")
    out_dir = os.path.join(cfg.workspace, "cleaned")
    labels = read_ground_truth(cfg.workspace)
    count = 0
    for fname in sorted(os.listdir(raw_dir)):
        if not fname.endswith(".tsv"):
            continue
        stem = fname[:-4]
        subject_id, _, task_id = stem.rpartition("_")
        with open(os.path.join(raw_dir, fname), "rb") as fh:
            log = parse_tracking_log(fh.read(), source_id=fname)
        track = select_participant(log, cfg.cleaning, subject_id=subject_id, task_id=task_id)
        seq = resample_uniform(track, cfg.cleaning)
        seq.label = labels.get((subject_id, task_id))
        write_atomic(os.path.join(out_dir, f"{stem}.kseq"), write_sequence(seq))
        count += 1
    return count


def load_cleaned_sequences(workspace: str):
    cleaned = os.path.join(workspace, "cleaned")
    for fname in sorted(os.listdir(cleaned)):
        if fname.endswith(".kseq"):
            with open(os.path.join(cleaned, fname), "rb") as fh:
                yield read_sequence(fh.read())


def run_features(cfg: RunConfig) -> int:
    lines = ["subject_id,task_id,label," + ",".join(f"f{i:03d}" for i in range(N_FEATURES))]
    count = 0
    for seq in load_cleaned_sequences(cfg.workspace):
        vec = compute_feature_vector(seq)
        label = "" if seq.label is None else str(seq.label)
        lines.append(",".join([seq.subject_id, seq.task_id, label]
                              + [repr(float(v)) for v in vec]))
        count += 1
    write_atomic(os.path.join(cfg.workspace, "features.csv"), "\n".join(lines) + "\n")
    return count


def read_feature_rows(path: str) -> list[FeatureRow]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            values = tuple(float(row[f"f{i:03d}"]) for i in range(N_FEATURES))
            rows.append(FeatureRow(subject_id=row["subject_id"], task_id=row["task_id"],
                                   label=int(row["label"]), values=values))
    return rows


def run_render(cfg: RunConfig) -> int:
    out_dir = os.path.join(cfg.workspace, "volumes")
    rows = export_heatmap_dataset(load_cleaned_sequences(cfg.workspace), out_dir,
                                  cfg.render, master_seed=cfg.seed)
    return len(rows)


def read_dl_predictions(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        return [
            {"subject_id": r["subject_id"], "task_id": r["task_id"],
             "fold_id": r["fold_id"], "probability": float(r["probability"])}
            for r in csv.DictReader(fh)
        ]


def run_evaluate(cfg: RunConfig, approach: str = "handcrafted",
                 dl_predictions_path: str | None = None) -> dict:
    rows = read_feature_rows(os.path.join(cfg.workspace, "features.csv"))
    dl = None
    if approach in ("endtoend", "both"):
        path = dl_predictions_path or os.path.join(cfg.workspace, "dl_predictions.csv")
        dl = read_dl_predictions(path)
    result = run_experiment(
        rows, k=cfg.folds, repeats=cfg.repetitions, seed=cfg.seed,
        n_trees=cfg.n_trees, dl_predictions=dl, jobs=cfg.jobs,
        train_classical=approach != "endtoend",
    )
    reports = os.path.join(cfg.workspace, "reports")
    write_atomic(os.path.join(reports, "report.csv"), report_to_csv(result.report))
    write_atomic(os.path.join(reports, "report.json"), report_to_json(result.report))
    write_atomic(os.path.join(reports, "predictions.csv"), predictions_to_csv(result.records))
    return result.report
