"""Kinematic time series, per-joint statistics, and body-group aggregation.

Pipeline: derive_series -> summarize -> aggregate_groups, producing a
160-dim vector ordered group x series x statistic (10 x 4 x 4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TrackTooShortError
from .joints import BODY_GROUPS, GROUP_MEMBERS, N_JOINTS
from .skeleton_io import SkeletonSequence

SERIES_NAMES = ("displacement", "speed", "acceleration_magnitude", "tangential_acceleration")
STAT_NAMES = ("mean", "variance", "max", "min")
N_FEATURES = len(BODY_GROUPS) * len(SERIES_NAMES) * len(STAT_NAMES)


@dataclass
class KinematicSeries:
    """Per-joint series; displacement/speed have N-1 samples, accelerations N-2."""

    displacement: np.ndarray             # (N-1, 32) meters per frame
    speed: np.ndarray                    # (N-1, 32) m/s
    acceleration_magnitude: np.ndarray   # (N-2, 32) m/s^2
    tangential_acceleration: np.ndarray  # (N-2, 32) m/s^2, signed

    def as_tuple(self):
        return (self.displacement, self.speed, self.acceleration_magnitude, self.tangential_acceleration)


def derive_series(seq: SkeletonSequence) -> KinematicSeries:
    """Forward-difference kinematics from the uniform frame grid."""
    if seq.n_frames < 3:
        raise TrackTooShortError(f"need at least 3 frames, got {seq.n_frames}")
    rate = seq.rate
    steps = np.diff(seq.frames, axis=0)          # (N-1, 32, 3)
    displacement = np.linalg.norm(steps, axis=2)  # chord length per frame step
    speed = displacement * rate
    velocity = steps * rate                       # (N-1, 32, 3)
    dv = np.diff(velocity, axis=0)                # (N-2, 32, 3)
    acceleration_magnitude = np.linalg.norm(dv, axis=2) * rate
    tangential_acceleration = np.diff(speed, axis=0) * rate
    return KinematicSeries(displacement, speed, acceleration_magnitude, tangential_acceleration)


def summarize(series: KinematicSeries) -> np.ndarray:
    """(32, 16) matrix: per joint, per series, population mean/variance/max/min."""
    blocks = []
    for s in series.as_tuple():
        if s.shape[0] == 0:
            raise TrackTooShortError("empty kinematic series")
        blocks.append(np.stack([s.mean(axis=0), s.var(axis=0), s.max(axis=0), s.min(axis=0)], axis=1))
    return np.concatenate(blocks, axis=1)  # series-major, stats within


def aggregate_groups(per_joint: np.ndarray) -> np.ndarray:
    """Mean each of the 16 per-joint features over every body group -> (160,)."""
    if per_joint.shape != (N_JOINTS, 16):
        raise ValueError(f"expected (32, 16) per-joint features, got {per_joint.shape}")
    rows = [per_joint[list(GROUP_MEMBERS[name])].mean(axis=0) for name, _ in BODY_GROUPS]
    return np.concatenate(rows)


def compute_feature_vector(seq: SkeletonSequence) -> np.ndarray:
    vec = aggregate_groups(summarize(derive_series(seq)))
    if not np.isfinite(vec).all():
        raise ValueError("non-finite feature value")
    return vec


def feature_names() -> list[str]:
    """Human-readable names aligned with the f000..f159 column order."""
    return [
        f"{group}_{series}_{stat}"
        for group, _ in BODY_GROUPS
        for series in SERIES_NAMES
        for stat in STAT_NAMES
    ]
