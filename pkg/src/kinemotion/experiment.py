"""Outer-CV orchestration: train per-task models, score test subjects, report.

The outer harness is a subject-level stratified 4-fold x 2-repetition plan.
Inside each fold, per task, the linear SVM is tuned by RFECV and the forest
by depth search (both on the training partition only), then test subjects are
scored. Reports mirror the familiar per-task / Mean / Global-Voting layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, UndefinedMetricError
from .features import N_FEATURES
from .folds import FoldPlan, stratified_repeated_kfold
from .metrics import confusion_metrics, ensemble_vote, mean_roc_curve, roc_auc
from .rng import derive_seed_sequence
from .selection import DEFAULT_C_GRID, DEFAULT_DEPTH_GRID, rfecv_select, tune_depth
from .stats import levene_test, welch_ttest
from .svm import Standardizer, svm_probability, train_linear_svm
from .forest import forest_probability, train_random_forest

MODEL_SVM = "linear_svm_rfecv"
MODEL_FOREST = "random_forest"
MODEL_DEEP = "end_to_end"

METRIC_NAMES = ("accuracy", "tpr", "tnr", "auc")


@dataclass(frozen=True)
class FeatureRow:
    subject_id: str
    task_id: str
    label: int
    values: tuple  # 160 floats


@dataclass(frozen=True)
class PredictionRecord:
    subject_id: str
    task_id: str
    model_id: str
    fold_id: str
    probability: float
    label: int


@dataclass
class ExperimentResult:
    plan: FoldPlan
    tasks: list[str]
    models: list[str]
    records: list[PredictionRecord]
    report: dict = field(default_factory=dict)


def _subjects_from_rows(rows: list[FeatureRow]) -> list[tuple[str, int]]:
    seen: dict[str, int] = {}
    for r in rows:
        if r.subject_id in seen and seen[r.subject_id] != r.label:
            raise InvariantViolation(f"subject {r.subject_id} has conflicting labels")
        seen[r.subject_id] = r.label
    return sorted(seen.items())


def _seed_for(master_seed: int, *keys) -> int:
    return int(derive_seed_sequence(master_seed, *keys).generate_state(1)[0])


def _train_and_score_fold_task(
    rows, train_subjects, fold_id, task_id, seed, c_grid, depth_grid, n_trees
) -> list[PredictionRecord]:
    train = [r for r in rows if r.subject_id in train_subjects]
    test = [r for r in rows if r.subject_id not in train_subjects]
    if not train or not test:
        return []
    for r in test:
        if r.subject_id in train_subjects:
            raise InvariantViolation("leakage: test subject found in training rows")
    X_train = np.array([r.values for r in train])
    y_train = np.array([r.label for r in train])
    X_test = np.array([r.values for r in test])

    scaler = Standardizer().fit(X_train)
    Xtr = scaler.transform(X_train)
    Xte = scaler.transform(X_test)

    records = []
    cols, best_c = rfecv_select(Xtr, y_train, c_grid,
                                seed=_seed_for(seed, "rfecv", fold_id, task_id))
    svm = train_linear_svm(Xtr[:, cols], y_train, best_c)
    svm.selected_features = cols
    for r, prob in zip(test, np.atleast_1d(svm_probability(svm, Xte))):
        records.append(PredictionRecord(r.subject_id, task_id, MODEL_SVM, fold_id,
                                        float(prob), r.label))

    depth = tune_depth(Xtr, y_train, depth_grid, n_trees=n_trees,
                       seed=_seed_for(seed, "depth", fold_id, task_id))
    forest = train_random_forest(Xtr, y_train, depth, n_trees=n_trees,
                                 seed=_seed_for(seed, "forest", fold_id, task_id))
    probs = np.atleast_1d(forest_probability(forest, Xte))
    for r, prob in zip(test, probs):
        records.append(PredictionRecord(r.subject_id, task_id, MODEL_FOREST, fold_id,
                                        float(prob), r.label))
    return records


def run_experiment(
    rows: list[FeatureRow],
    k: int = 4,
    repeats: int = 2,
    seed: int = 0,
    c_grid=DEFAULT_C_GRID,
    depth_grid=DEFAULT_DEPTH_GRID,
    n_trees: int = 500,
    dl_predictions: list[dict] | None = None,
    jobs: int = 1,
    train_classical: bool = True,
) -> ExperimentResult:
    """Full handcrafted-model evaluation, optionally merging deep-model scores.

    dl_predictions rows need subject_id, task_id, fold_id, probability; they
    are validated against the fold plan (the subject must be a test subject of
    that fold) and reported as the end-to-end model family.
    """
    for r in rows:
        if len(r.values) != N_FEATURES:
            raise InvariantViolation(f"feature row has {len(r.values)} values")
    subjects = _subjects_from_rows(rows)
    labels = {s: l for s, l in subjects}
    plan = stratified_repeated_kfold(subjects, k=k, repeats=repeats, seed=seed)
    tasks = sorted({r.task_id for r in rows})
    by_task = {t: [r for r in rows if r.task_id == t] for t in tasks}

    records: list[PredictionRecord] = []
    models: list[str] = []
    if train_classical:
        job_args = [
            (by_task[task], plan.train_subjects(fid), fid, task,
             seed, c_grid, depth_grid, n_trees)
            for fid in plan.fold_ids()
            for task in tasks
        ]
        if jobs > 1:
            from multiprocessing import get_context

            with get_context("fork").Pool(jobs) as pool:
                chunks = pool.starmap(_train_and_score_fold_task, job_args)
        else:
            chunks = [_train_and_score_fold_task(*args) for args in job_args]
        records = [rec for chunk in chunks for rec in chunk]
        models = [MODEL_SVM, MODEL_FOREST]

    if dl_predictions is not None:
        for row in dl_predictions:
            sid, tid, fid = row["subject_id"], row["task_id"], row["fold_id"]
            if fid not in plan.assignments:
                raise InvariantViolation(f"unknown fold_id {fid!r} in deep predictions")
            if sid not in plan.test_subjects(fid):
                raise InvariantViolation(
                    f"leakage: {sid} is not a test subject of fold {fid}")
            records.append(PredictionRecord(sid, tid, MODEL_DEEP, fid,
                                            float(row["probability"]), labels[sid]))
        models.append(MODEL_DEEP)

    records.sort(key=lambda r: (r.model_id, r.fold_id, r.task_id, r.subject_id))
    result = ExperimentResult(plan=plan, tasks=tasks, models=models, records=records)
    result.report = build_report(result)
    return result


def _metrics_for(records: list[PredictionRecord]) -> dict[str, float]:
    probs = np.array([r.probability for r in records])
    labels = np.array([r.label for r in records])
    accuracy, tpr, tnr = confusion_metrics(probs, labels)
    try:
        auc = roc_auc(probs, labels)
    except UndefinedMetricError:
        auc = float("nan")
    return {"accuracy": accuracy, "tpr": tpr, "tnr": tnr, "auc": auc}


def _mean_sd(values: list[float]) -> dict[str, float]:
    arr = np.array(values, dtype=float)
    ok = arr[~np.isnan(arr)]
    if len(ok) == 0:
        return {"mean": float("nan"), "sd": float("nan")}
    return {"mean": float(ok.mean()), "sd": float(ok.std())}


def build_report(result: ExperimentResult) -> dict:
    """Nested per-task / Mean / Global-Voting metrics plus model comparisons."""
    fold_ids = result.plan.fold_ids()
    index: dict[tuple, list[PredictionRecord]] = {}
    for rec in result.records:
        index.setdefault((rec.model_id, rec.fold_id, rec.task_id), []).append(rec)

    report: dict = {
        "k": result.plan.k,
        "repeats": result.plan.repeats,
        "seed": result.plan.master_seed,
        "folds": fold_ids,
        "tasks": result.tasks,
        "models": {},
        "comparisons": {},
    }
    pooled_auc: dict[str, list[float]] = {}
    for model in result.models:
        per_task: dict = {}
        fold_task_sets = []
        for task in result.tasks:
            per_fold = {}
            for fid in fold_ids:
                recs = index.get((model, fid, task), [])
                if recs:
                    per_fold[fid] = _metrics_for(recs)
                    fold_task_sets.append((
                        [r.probability for r in recs], [r.label for r in recs]))
            per_task[task] = {
                "per_fold": per_fold,
                "summary": {
                    m: _mean_sd([v[m] for v in per_fold.values()]) for m in METRIC_NAMES
                },
            }
        # Mean row: metrics averaged across tasks within a fold, then over folds
        mean_row = {}
        for metric in METRIC_NAMES:
            per_fold_means = []
            for fid in fold_ids:
                vals = [per_task[t]["per_fold"][fid][metric]
                        for t in result.tasks if fid in per_task[t]["per_fold"]]
                if vals:
                    per_fold_means.append(float(np.nanmean(vals)))
            mean_row[metric] = _mean_sd(per_fold_means)

        # Global voting: one averaged probability per subject per fold
        voting_per_fold = {}
        for fid in fold_ids:
            per_subject: dict[str, list[float]] = {}
            subject_label: dict[str, int] = {}
            for task in result.tasks:
                for rec in index.get((model, fid, task), []):
                    per_subject.setdefault(rec.subject_id, []).append(rec.probability)
                    subject_label[rec.subject_id] = rec.label
            if not per_subject:
                continue
            voted = [(ensemble_vote(ps), subject_label[s])
                     for s, ps in sorted(per_subject.items())]
            probs = np.array([v for v, _ in voted])
            labs = np.array([l for _, l in voted])
            acc, tpr, tnr = confusion_metrics(probs, labs)
            try:
                auc = roc_auc(probs, labs)
            except UndefinedMetricError:
                auc = float("nan")
            voting_per_fold[fid] = {"accuracy": acc, "tpr": tpr, "tnr": tnr, "auc": auc}
        voting = {
            "per_fold": voting_per_fold,
            "summary": {m: _mean_sd([v[m] for v in voting_per_fold.values()])
                        for m in METRIC_NAMES},
        }

        pooled = [per_task[t]["per_fold"][fid]["auc"]
                  for t in result.tasks for fid in fold_ids
                  if fid in per_task[t]["per_fold"]
                  and not np.isnan(per_task[t]["per_fold"][fid]["auc"])]
        pooled_auc[model] = pooled

        roc = {}
        if len(fold_task_sets) >= 2:
            grid, mean_tpr, sd_tpr = mean_roc_curve(fold_task_sets)
            roc = {"fpr": grid.tolist(), "mean_tpr": mean_tpr.tolist(),
                   "sd_tpr": sd_tpr.tolist()}

        report["models"][model] = {
            "per_task": per_task,
            "mean_row": mean_row,
            "global_voting": voting,
            "pooled_auc": pooled,
            "roc": roc,
        }

    for i, a in enumerate(result.models):
        for b in result.models[i + 1:]:
            key = f"{a}_vs_{b}"
            try:
                t, tp = welch_ttest(pooled_auc[a], pooled_auc[b])
                w, lp = levene_test(pooled_auc[a], pooled_auc[b])
                report["comparisons"][key] = {
                    "welch_t": t, "welch_p": tp, "welch_kind": "unpaired",
                    "levene_w": w, "levene_p": lp,
                }
            except Exception as exc:  # degenerate samples stay reported
                report["comparisons"][key] = {"error": str(exc)}
    return report


def _format_cell(summary: dict[str, float]) -> str:
    if np.isnan(summary["mean"]):
        return "nan"
    return f"{summary['mean'] * 100:02.0f}±{summary['sd'] * 100:02.0f}"


def report_to_csv(report: dict) -> str:
    """Per-task rows, then Mean and Global Voting, one line per (game, model)."""
    lines = ["game,model,accuracy,tpr,tnr,auc"]
    model_ids = list(report["models"].keys())

    def row(game: str, model: str, summary: dict) -> str:
        cells = [_format_cell(summary[m]) for m in METRIC_NAMES]
        return ",".join([game, model] + cells)

    for task in report["tasks"]:
        for model in model_ids:
            lines.append(row(task, model, report["models"][model]["per_task"][task]["summary"]))
    for model in model_ids:
        lines.append(row("Mean", model, report["models"][model]["mean_row"]))
    for model in model_ids:
        lines.append(row("Global Voting", model,
                         report["models"][model]["global_voting"]["summary"]))
    return "\n".join(lines) + "\n"


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def predictions_to_csv(records: list[PredictionRecord]) -> str:
    lines = ["subject_id,task_id,model_id,fold_id,probability,label"]
    for r in records:
        lines.append(f"{r.subject_id},{r.task_id},{r.model_id},{r.fold_id},{r.probability!r},{r.label}")
    return "\n".join(lines) + "\n"
