"""kinemotion command line: synth / clean / features / render / evaluate /
train-classical / compare / report."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import RunConfig, parse_config_text
from .errors import KinemotionError
from .experiment import report_to_csv
from .model_io import save_model
from .pipeline import (read_feature_rows, run_clean, run_evaluate, run_features,
                       run_render, run_synth, write_atomic)
from .selection import rfecv_select, tune_depth
from .svm import Standardizer, train_linear_svm
from .forest import train_random_forest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kinemotion",
                                     description="skeleton-kinematics classification pipeline")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--workspace", help="workspace directory "
                        "(default $KINEMOTION_WORKSPACE or ./workspace)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--jobs", type=int, help="worker processes for training")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", help="generate a synthetic cohort of raw logs")
    sub.add_parser("clean", help="select participants and resample to 10 Hz")
    sub.add_parser("features", help="compute the 160-dim feature table")
    sub.add_parser("render", help="export heatmap volumes and manifest")

    ev = sub.add_parser("evaluate", help="run the repeated-CV experiment")
    ev.add_argument("--approach", choices=["handcrafted", "endtoend", "both"],
                    default="handcrafted")
    ev.add_argument("--dl-predictions", help="deep-model prediction manifest "
                    "(default <workspace>/dl_predictions.csv)")

    tc = sub.add_parser("train-classical", help="fit one tuned model on a task's rows")
    tc.add_argument("--model", choices=["svm", "forest"], required=True)
    tc.add_argument("--task", required=True)

    sub.add_parser("compare", help="print model-comparison statistics")
    sub.add_parser("report", help="re-emit report.csv from report.json")
    return parser


def _load_config(args) -> RunConfig:
    kv: dict[str, str] = {}
    if args.config:
        with open(args.config) as fh:
            kv = parse_config_text(fh.read())
    cfg = RunConfig.from_mapping(kv)
    if args.workspace:
        cfg.workspace = args.workspace
    elif "workspace" not in kv and os.environ.get("KINEMOTION_WORKSPACE"):
        cfg.workspace = os.environ["KINEMOTION_WORKSPACE"]
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.cohort = type(cfg.cohort)(**{**cfg.cohort.__dict__, "seed": args.seed})
    if args.jobs is not None:
        cfg.jobs = args.jobs
    return cfg


def _cmd_train_classical(cfg: RunConfig, args) -> None:
    rows = [r for r in read_feature_rows(os.path.join(cfg.workspace, "features.csv"))
            if r.task_id == args.task]
    if not rows:
        raise KinemotionError(f"no feature rows for task {args.task!r}")
    X = np.array([r.values for r in rows])
    y = np.array([r.label for r in rows])
    Xs = Standardizer().fit_transform(X)
    if args.model == "svm":
        cols, best_c = rfecv_select(Xs, y, seed=cfg.seed)
        model = train_linear_svm(Xs[:, cols], y, best_c)
        model.selected_features = cols
    else:
        depth = tune_depth(Xs, y, seed=cfg.seed, n_trees=cfg.n_trees)
        model = train_random_forest(Xs, y, depth, n_trees=cfg.n_trees, seed=cfg.seed)
    path = os.path.join(cfg.workspace, "models", f"{args.task}_{args.model}.json")
    write_atomic(path, save_model(model))
    print(f"wrote {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _load_config(args)
    try:
        if args.command == "synth":
            n = run_synth(cfg)
            print(f"generated {n} recordings under {cfg.workspace}/raw")
        elif args.command == "clean":
            n = run_clean(cfg)
            print(f"cleaned {n} recordings into {cfg.workspace}/cleaned")
        elif args.command == "features":
            n = run_features(cfg)
            print(f"wrote {n} feature rows to {cfg.workspace}/features.csv")
        elif args.command == "render":
            n = run_render(cfg)
            print(f"wrote {n} volumes under {cfg.workspace}/volumes")
        elif args.command == "evaluate":
            run_evaluate(cfg, approach=args.approach,
                         dl_predictions_path=args.dl_predictions)
            print(f"wrote reports under {cfg.workspace}/reports")
        elif args.command == "train-classical":
            _cmd_train_classical(cfg, args)
        elif args.command == "compare":
            with open(os.path.join(cfg.workspace, "reports", "report.json")) as fh:
                report = json.load(fh)
            print(json.dumps(report["comparisons"], sort_keys=True, indent=2))
        elif args.command == "report":
            with open(os.path.join(cfg.workspace, "reports", "report.json")) as fh:
                report = json.load(fh)
            write_atomic(os.path.join(cfg.workspace, "reports", "report.csv"),
                         report_to_csv(report))
            print(f"wrote {cfg.workspace}/reports/report.csv")
    except KinemotionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc.filename}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
