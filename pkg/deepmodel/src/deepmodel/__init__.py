"""End-to-end 3D-CNN route over exported joint-heatmap volumes."""

__version__ = "0.1.0"

from .data import ManifestRow, read_manifest, sample_frame_indices
from .net import HeatmapNet, NetSpec, StageSpec, build_network, parameter_count
from .predict import predict_subject, predictions_to_csv
from .train import EarlyStopper, PlateauScheduler, TrainConfig, train_task_model

__all__ = [name for name in dir() if not name.startswith("_")]
