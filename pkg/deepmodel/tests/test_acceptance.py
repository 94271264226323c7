"""Secondary acceptance: network contract, overfit sanity, end-to-end integration."""

import csv

import numpy as np
import pytest
import torch
from torch import nn

from deepmodel.cli import run_all
from deepmodel.data import read_manifest
from deepmodel.net import build_network, parameter_count
from deepmodel.predict import predict_subject
from deepmodel.train import TrainConfig, train_task_model

from conftest import make_volume_store
from test_train import TINY_SPEC


def _report(ok: bool, name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'} - {name}{suffix}")


class TestNetworkContract:
    def test_forward_params_and_gradients(self):
        model = build_network(seed=0).eval()
        x = torch.randn(3, 1, 100, 78, 64)
        with torch.no_grad():
            y = model(x)
        shape_ok = y.shape == (3, 1) and bool(((y > 0) & (y < 1)).all())

        count = parameter_count(model)
        with torch.no_grad():
            y50 = model(torch.randn(1, 1, 50, 78, 64))
        t_invariant = (parameter_count(model) == count and y50.shape == (1, 1))

        worst = self._finite_difference_worst_error()
        grad_ok = worst <= 1e-3
        _report(shape_ok and t_invariant and grad_ok, "network contract",
                f"out {tuple(y.shape)}, params {count}, fd rel err {worst:.2e}")
        assert shape_ok
        assert t_invariant
        assert grad_ok, worst

    @staticmethod
    def _finite_difference_worst_error(n_weights: int = 20) -> float:
        torch.manual_seed(3)
        model = build_network(seed=3).double().eval()
        x = torch.randn(1, 1, 6, 20, 16, dtype=torch.float64)
        target = torch.tensor([[1.0]], dtype=torch.float64)
        loss_fn = nn.BCELoss()
        model.zero_grad()
        loss_fn(model(x), target).backward()
        params = [p for p in model.parameters() if p.grad is not None]
        rng = np.random.default_rng(5)
        candidates = [(pi, int(idx)) for pi, p in enumerate(params)
                      for idx in np.flatnonzero(p.grad.reshape(-1).abs().numpy() > 1e-6)]
        picks = rng.permutation(len(candidates))[:n_weights]
        eps = 1e-5
        worst = 0.0
        with torch.no_grad():
            for c in picks:
                pi, idx = candidates[c]
                flat = params[pi].reshape(-1)
                analytic = float(params[pi].grad.reshape(-1)[idx])
                original = float(flat[idx])
                flat[idx] = original + eps
                hi = float(loss_fn(model(x), target))
                flat[idx] = original - eps
                lo = float(loss_fn(model(x), target))
                flat[idx] = original
                numeric = (hi - lo) / (2 * eps)
                worst = max(worst, abs(numeric - analytic)
                            / max(abs(analytic), abs(numeric)))
        return worst


class TestOverfitSanity:
    def test_memorizes_six_subjects_within_50_epochs(self, tmp_path):
        make_volume_store(tmp_path, n_per_class=3, windows=2, gap=4.0, seed=1)
        rows = read_manifest(str(tmp_path))
        cfg = TrainConfig(epochs=50, minibatches_per_epoch=6, t_sample=8,
                          learning_rate=0.02, seed=0)
        outcome = train_task_model(rows, str(tmp_path), cfg, TINY_SPEC)
        subjects = sorted({r.subject_id for r in rows})
        correct = 0
        for sid in subjects:
            windows = [r for r in rows if r.subject_id == sid]
            prob = predict_subject(outcome.model, windows, str(tmp_path), t_sample=8)
            correct += (prob >= 0.5) == bool(windows[0].label)
        accuracy = correct / len(subjects)
        epochs_used = len(outcome.log)
        ok = accuracy == 1.0 and epochs_used <= 50
        _report(ok, "overfit sanity",
                f"train accuracy {accuracy:.2f} in {epochs_used} epochs")
        assert ok


class TestIntegration:
    def test_dl_predictions_flow_into_combined_report(self, tmp_path):
        from kinemotion.cli import main as kmain

        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "n_per_class=8\ntasks=T2A1\nduration_seconds=6\n"
            "speed_mean_negative=0.5\nspeed_mean_positive=0.9\nspeed_sd=0.08\n"
            "distractor_rate=0.1\ndropout_rate=0.02\ntimestamp_jitter=0.005\n"
            "n_trees=30\nrender_window_seconds=3\nrender_overlap_seconds=1.5\n"
            "width_px=16\nheight_px=20\njitter_count=1\n")
        ws = tmp_path / "ws"
        base = ["--config", str(cfg), "--workspace", str(ws), "--seed", "7"]
        for cmd in ("synth", "clean", "features", "render"):
            assert kmain(base + [cmd]) == 0

        n = run_all(volumes=str(ws / "volumes"),
                    out_path=str(ws / "dl_predictions.csv"),
                    log_dir=str(ws / "dl_logs"), folds=4, repeats=2, seed=7,
                    epochs=2, minibatches=4, t_sample=8)
        assert n == 8 * 4  # folds x test subjects

        log_files = sorted((ws / "dl_logs").glob("training_log_*.jsonl"))
        assert len(log_files) == 8
        assert kmain(base + ["evaluate", "--approach", "both"]) == 0

        lines = (ws / "reports" / "report.csv").read_text().strip().split("\n")
        games = [l.split(",")[0] for l in lines[1:]]
        models = [l.split(",")[1] for l in lines[1:]]
        structure_ok = (
            games == ["T2A1"] * 3 + ["Mean"] * 3 + ["Global Voting"] * 3
            and models[0:3] == models[3:6] == models[6:9]
            and "end_to_end" in models[0:3]
        )
        with open(ws / "reports" / "report.json") as fh:
            import json

            report = json.load(fh)
        has_dl = "end_to_end" in report["models"]
        comparisons = [k for k in report["comparisons"] if "end_to_end" in k]
        ok = structure_ok and has_dl and len(comparisons) == 2
        _report(ok, "end-to-end integration",
                f"rows {len(lines) - 1}, dl comparisons {len(comparisons)}")
        assert ok
