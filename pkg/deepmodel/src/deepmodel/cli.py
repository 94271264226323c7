"""deepmodel command line: train per (task, fold) and emit dl_predictions.csv."""

from __future__ import annotations

import argparse
import os
import sys

from .data import read_manifest, subjects_with_labels
from .folds import subject_fold_map
from .predict import predict_subject, predictions_to_csv
from .train import TrainConfig, train_task_model


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deepmodel")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="train every (task, fold) model and predict")
    run.add_argument("--volumes", required=True, help="volume export directory")
    run.add_argument("--out", required=True, help="dl_predictions.csv path")
    run.add_argument("--log-dir", help="training_log.jsonl directory "
                     "(default: alongside --out)")
    run.add_argument("--folds", type=int, default=4)
    run.add_argument("--repeats", type=int, default=2)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    run.add_argument("--minibatches", type=int, default=TrainConfig.minibatches_per_epoch)
    run.add_argument("--t-sample", type=int, default=TrainConfig.t_sample)
    return parser


def run_all(volumes: str, out_path: str, log_dir: str | None, folds: int,
            repeats: int, seed: int, epochs: int, minibatches: int,
            t_sample: int) -> int:
    rows = read_manifest(volumes)
    subjects = subjects_with_labels(rows)
    fold_map = subject_fold_map(subjects, folds, repeats, seed)
    tasks = sorted({r.task_id for r in rows})
    log_dir = log_dir or os.path.dirname(out_path) or "."
    os.makedirs(log_dir, exist_ok=True)

    records = []
    for fid, test_subjects in fold_map.items():
        for task in tasks:
            task_rows = [r for r in rows if r.task_id == task]
            train_rows = [r for r in task_rows if r.subject_id not in test_subjects]
            cfg = TrainConfig(epochs=epochs, minibatches_per_epoch=minibatches,
                              t_sample=t_sample, seed=seed)
            outcome = train_task_model(train_rows, volumes, cfg)
            log_path = os.path.join(log_dir, f"training_log_{task}_{fid}.jsonl")
            with open(log_path, "w") as fh:
                fh.write(outcome.log_jsonl())
            for sid in sorted(test_subjects):
                windows = [r for r in task_rows if r.subject_id == sid]
                if not windows:
                    continue
                prob = predict_subject(outcome.model, windows, volumes, t_sample)
                records.append({"subject_id": sid, "task_id": task,
                                "fold_id": fid, "probability": prob})
    tmp = out_path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(predictions_to_csv(records))
    os.replace(tmp, out_path)
    return len(records)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    n = run_all(args.volumes, args.out, args.log_dir, args.folds, args.repeats,
                args.seed, args.epochs, args.minibatches, args.t_sample)
    print(f"wrote {n} predictions to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
