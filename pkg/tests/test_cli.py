import csv
import os
import re

import numpy as np
import pytest

from kinemotion.cli import main

CONFIG = """
# tiny cohort for CLI round trips
n_per_class=8
tasks=T2A1,T2B1
duration_seconds=6
speed_mean_negative=0.5
speed_mean_positive=0.9
speed_sd=0.08
distractor_rate=0.2
dropout_rate=0.05
timestamp_jitter=0.005
n_trees=30
render_window_seconds=3
render_overlap_seconds=1.5
width_px=16
height_px=20
jitter_count=2
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    ws = tmp_path_factory.mktemp("cli_ws")
    cfg = ws / "run.cfg"
    cfg.write_text(CONFIG)
    base = ["--config", str(cfg), "--workspace", str(ws), "--seed", "7"]
    assert main(base + ["synth"]) == 0
    assert main(base + ["clean"]) == 0
    assert main(base + ["features"]) == 0
    return ws, base


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestStages:
    def test_feature_table_row_count(self, workspace):
        ws, _ = workspace
        rows = read_csv(ws / "features.csv")
        assert len(rows) == 16 * 2  # n_per_class*2 rows per task
        assert set(rows[0].keys()) >= {"subject_id", "task_id", "label", "f000", "f159"}

    def test_cleaned_files_exist(self, workspace):
        ws, _ = workspace
        assert len(list((ws / "cleaned").glob("*.kseq"))) == 32

    def test_evaluate_deterministic_bytes(self, workspace):
        ws, base = workspace
        assert main(base + ["evaluate", "--approach", "handcrafted"]) == 0
        first = {name: (ws / "reports" / name).read_bytes()
                 for name in ("report.csv", "report.json", "predictions.csv")}
        assert main(base + ["evaluate", "--approach", "handcrafted"]) == 0
        for name, blob in first.items():
            assert (ws / "reports" / name).read_bytes() == blob, name

    def test_report_layout_matches_template(self, workspace):
        ws, base = workspace
        lines = (ws / "reports" / "report.csv").read_text().strip().split("\n")
        assert lines[0] == "game,model,accuracy,tpr,tnr,auc"
        games = [l.split(",")[0] for l in lines[1:]]
        assert games == (["T2A1"] * 2 + ["T2B1"] * 2
                         + ["Mean"] * 2 + ["Global Voting"] * 2)
        cell = re.compile(r"^\d{2,3}±\d{2,3}$|^nan$")
        for line in lines[1:]:
            for value in line.split(",")[2:]:
                assert cell.match(value), value

    def test_report_subcommand_reemits_csv(self, workspace):
        ws, base = workspace
        blob = (ws / "reports" / "report.csv").read_bytes()
        (ws / "reports" / "report.csv").unlink()
        assert main(base + ["report"]) == 0
        assert (ws / "reports" / "report.csv").read_bytes() == blob

    def test_compare_prints_stats(self, workspace, capsys):
        _, base = workspace
        assert main(base + ["compare"]) == 0
        out = capsys.readouterr().out
        assert "linear_svm_rfecv_vs_random_forest" in out

    def test_render_writes_volumes(self, workspace):
        ws, base = workspace
        # 6 s recording, 3 s window, 1.5 s hop -> 3 full windows; each carries
        # the original plus 2 jitters and their flips
        assert main(base + ["render"]) == 0
        manifest = read_csv(ws / "volumes" / "manifest.csv")
        windows: dict[tuple, list[str]] = {}
        for row in manifest:
            key = (row["subject_id"], row["task_id"], row["window_index"])
            windows.setdefault(key, []).append(row["aug_tag"])
        # jitter makes some recordings 60 frames and some 61 (extra window)
        assert len(windows) in range(32 * 3, 32 * 4 + 1)
        for tags in windows.values():
            assert sorted(tags) == ["flip(jitter#0)", "flip(jitter#1)",
                                    "jitter#0", "jitter#1", "original"]
        sample = np.load(ws / "volumes" / manifest[0]["filename"])
        assert sample.shape == (30, 20, 16)
        assert sample.dtype == np.float32

    def test_train_classical_both_kinds(self, workspace):
        ws, base = workspace
        assert main(base + ["train-classical", "--model", "forest",
                            "--task", "T2A1"]) == 0
        assert main(base + ["train-classical", "--model", "svm",
                            "--task", "T2A1"]) == 0
        from kinemotion.model_io import load_model
        for kind in ("svm", "forest"):
            load_model((ws / "models" / f"T2A1_{kind}.json").read_text())


class TestEndToEndMerge:
    def test_evaluate_both_consumes_dl_manifest(self, workspace):
        ws, base = workspace
        rows = read_csv(ws / "reports" / "predictions.csv")
        dl_rows = sorted({(r["subject_id"], r["task_id"], r["fold_id"])
                          for r in rows})
        path = ws / "dl_predictions.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["subject_id", "task_id", "fold_id", "probability"])
            for sid, task, fid in dl_rows:
                writer.writerow([sid, task, fid, "0.75"])
        assert main(base + ["evaluate", "--approach", "both"]) == 0
        lines = (ws / "reports" / "report.csv").read_text().strip().split("\n")
        games = [l.split(",")[0] for l in lines[1:]]
        assert games == (["T2A1"] * 3 + ["T2B1"] * 3
                         + ["Mean"] * 3 + ["Global Voting"] * 3)

    def test_leaky_manifest_fails_with_exit_1(self, workspace, capsys):
        ws, base = workspace
        rows = read_csv(ws / "reports" / "predictions.csv")
        fold = rows[0]["fold_id"]
        test_subjects = {r["subject_id"] for r in rows if r["fold_id"] == fold}
        leaky = sorted({r["subject_id"] for r in rows} - test_subjects)[0]
        path = ws / "dl_predictions.csv"
        path.write_text("subject_id,task_id,fold_id,probability\n"
                        f"{leaky},T2A1,{fold},0.9\n")
        assert main(base + ["evaluate", "--approach", "endtoend"]) == 1
        assert "leakage" in capsys.readouterr().err


class TestArgHandling:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["--bogus-flag", "synth"])
        assert exc.value.code == 2

    def test_env_var_workspace(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KINEMOTION_WORKSPACE", str(tmp_path / "envws"))
        cfg = tmp_path / "c.cfg"
        cfg.write_text("n_per_class=1\ntasks=EF\nduration_seconds=2\n")
        assert main(["--config", str(cfg), "--seed", "1", "synth"]) == 0
        assert (tmp_path / "envws" / "raw" / "ground_truth.csv").exists()
