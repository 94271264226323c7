import numpy as np
import pytest
import torch

from deepmodel.data import read_manifest
from deepmodel.predict import predict_subject, predict_windows, predictions_to_csv

from conftest import make_volume_store


class ConstantModel(torch.nn.Module):
    def __init__(self, values):
        super().__init__()
        self.values = list(values)
        self.calls = 0

    def forward(self, x):
        out = torch.tensor([[self.values[self.calls % len(self.values)]]])
        self.calls += 1
        return out


class TestVoting:
    def test_single_window_passthrough(self, tmp_path):
        make_volume_store(tmp_path, n_per_class=1, windows=1, seed=0)
        rows = [r for r in read_manifest(str(tmp_path))
                if r.subject_id == "s00" and r.aug_tag == "original"]
        prob = predict_subject(ConstantModel([0.7]), rows, str(tmp_path), t_sample=4)
        assert prob == pytest.approx(0.7)

    def test_mean_of_two_windows(self, tmp_path):
        make_volume_store(tmp_path, n_per_class=1, windows=1, seed=0)
        rows = [r for r in read_manifest(str(tmp_path)) if r.subject_id == "s00"]
        assert len(rows) == 3  # original + jitter + flip all vote
        prob = predict_subject(ConstantModel([0.2, 0.8, 0.5]), rows, str(tmp_path),
                               t_sample=4)
        assert prob == pytest.approx(0.5)

    def test_bounded(self, tmp_path):
        make_volume_store(tmp_path, n_per_class=1, windows=2, seed=1)
        rows = [r for r in read_manifest(str(tmp_path)) if r.subject_id == "s01"]
        from deepmodel.net import build_network

        probs = predict_windows(build_network(seed=0).eval(), rows, str(tmp_path), 6)
        assert all(0.0 < p < 1.0 for p in probs)

    def test_empty_errors(self, tmp_path):
        with pytest.raises(ValueError):
            predict_subject(ConstantModel([0.5]), [], str(tmp_path))

    def test_csv_format(self):
        text = predictions_to_csv([
            {"subject_id": "s01", "task_id": "T2A1", "fold_id": "r1f2",
             "probability": 0.25}])
        assert text == ("subject_id,task_id,fold_id,probability\n"
                        "s01,T2A1,r1f2,0.25\n")
