"""Ground-truth-known synthetic cohorts for exercising the whole pipeline.

Each subject's planted body follows band-limited motion (a shared body sway
plus 3 random-phase sinusoids per joint), with amplitudes rescaled so the
subject's mean joint speed on the canonical 10 Hz grid hits a target drawn
from its class distribution. Distractors are a near-static "researcher" body
and a teleporting decoy; timestamps can be unevenly spaced and coordinates
dropped out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .joints import JOINT_INDEX, N_JOINTS
from .rng import derive_rng
from .skeleton_io import RawEntry, RawTrackingLog

# Rough child-scale rest pose (meters): x lateral, y up, z depth from sensor.
_TEMPLATE_SPEC = {
    "PELVIS": (0.00, 0.55, 2.00), "SPINE_NAVEL": (0.00, 0.70, 2.00),
    "SPINE_CHEST": (0.00, 0.82, 2.00), "NECK": (0.00, 0.95, 2.00),
    "CLAVICLE_LEFT": (-0.06, 0.93, 2.00), "SHOULDER_LEFT": (-0.14, 0.92, 2.00),
    "ELBOW_LEFT": (-0.18, 0.72, 2.00), "WRIST_LEFT": (-0.20, 0.55, 2.00),
    "HAND_LEFT": (-0.21, 0.50, 2.00), "HANDTIP_LEFT": (-0.22, 0.45, 2.00),
    "THUMB_LEFT": (-0.18, 0.48, 2.00),
    "CLAVICLE_RIGHT": (0.06, 0.93, 2.00), "SHOULDER_RIGHT": (0.14, 0.92, 2.00),
    "ELBOW_RIGHT": (0.18, 0.72, 2.00), "WRIST_RIGHT": (0.20, 0.55, 2.00),
    "HAND_RIGHT": (0.21, 0.50, 2.00), "HANDTIP_RIGHT": (0.22, 0.45, 2.00),
    "THUMB_RIGHT": (0.18, 0.48, 2.00),
    "HIP_LEFT": (-0.08, 0.50, 2.00), "KNEE_LEFT": (-0.09, 0.28, 2.00),
    "ANKLE_LEFT": (-0.10, 0.06, 2.00), "FOOT_LEFT": (-0.10, 0.02, 2.08),
    "HIP_RIGHT": (0.08, 0.50, 2.00), "KNEE_RIGHT": (0.09, 0.28, 2.00),
    "ANKLE_RIGHT": (0.10, 0.06, 2.00), "FOOT_RIGHT": (0.10, 0.02, 2.08),
    "HEAD": (0.00, 1.05, 2.00), "NOSE": (0.00, 1.03, 1.95),
    "EYE_LEFT": (-0.03, 1.06, 1.96), "EAR_LEFT": (-0.07, 1.05, 2.00),
    "EYE_RIGHT": (0.03, 1.06, 1.96), "EAR_RIGHT": (0.07, 1.05, 2.00),
}

TEMPLATE = np.zeros((N_JOINTS, 3))
for _name, _xyz in _TEMPLATE_SPEC.items():
    TEMPLATE[JOINT_INDEX[_name]] = _xyz


@dataclass(frozen=True)
class CohortSpec:
    n_per_class: int = 10
    tasks: tuple[str, ...] = ("T2A1", "T2A3", "T2B1")
    duration_seconds: float = 30.0
    class_speed_means: tuple[float, float] = (0.5, 0.8)  # (negative, positive) m/s
    class_speed_sd: float = 0.1
    distractor_rate: float = 0.2
    dropout_rate: float = 0.0
    timestamp_jitter: float = 0.0  # seconds, < half the source sampling step
    seed: int = 0
    source_rate: float = 20.0      # raw log nominal rate, before 10 Hz cleaning

    def __post_init__(self):
        if not (0 <= self.distractor_rate < 1 and 0 <= self.dropout_rate < 1):
            raise ValueError("rates must be in [0, 1)")
        if self.duration_seconds <= 0:
            raise ValueError("duration must be positive")


@dataclass
class MotionTruth:
    """Analytic planted motion: template + scale * (body sway + joint wiggle)."""

    scale: float
    body_amp: np.ndarray    # (2, 3)
    body_freq: np.ndarray   # (2,)
    body_phase: np.ndarray  # (2, 3)
    wig_amp: np.ndarray     # (32, 3, 3)  joint x harmonic x dim
    wig_freq: np.ndarray    # (32, 3)
    wig_phase: np.ndarray   # (32, 3, 3)
    target_speed: float

    def positions(self, times: np.ndarray) -> np.ndarray:
        """(T, 32, 3) planted joint positions at the given times."""
        times = np.asarray(times, dtype=float)
        sway = np.zeros((len(times), 3))
        for i in range(2):
            sway += self.body_amp[i] * np.sin(
                2 * np.pi * self.body_freq[i] * times[:, None] + self.body_phase[i])
        arg = (2 * np.pi * self.wig_freq[:, :, None, None] * times[None, None, None, :]
               + self.wig_phase[:, :, :, None])
        wig = (self.wig_amp[:, :, :, None] * np.sin(arg)).sum(axis=1)  # (32, 3, T)
        motion = sway[:, None, :] + np.transpose(wig, (2, 0, 1))
        return TEMPLATE[None] + self.scale * motion


@dataclass
class SyntheticRecording:
    subject_id: str
    task_id: str
    label: int
    body_id: int
    log: RawTrackingLog
    truth: MotionTruth
    timestamps: np.ndarray  # participant entry times, strictly increasing


@dataclass
class Cohort:
    spec: CohortSpec
    recordings: list[SyntheticRecording] = field(default_factory=list)

    def ground_truth_rows(self) -> list[dict]:
        return [
            {"subject_id": r.subject_id, "task_id": r.task_id, "label": r.label,
             "body_id": r.body_id, "target_speed": r.truth.target_speed}
            for r in self.recordings
        ]


def _draw_motion(rng: np.random.Generator, target_speed: float,
                 duration: float) -> MotionTruth:
    body_amp = rng.uniform(0.1, 0.3, size=(2, 3)) * np.array([1.0, 0.3, 0.8])
    body_freq = rng.uniform(0.2, 0.6, size=2)
    body_phase = rng.uniform(0, 2 * np.pi, size=(2, 3))
    # extremities wiggle more than the trunk
    extremity = 1.0 + np.abs(TEMPLATE[:, 0]) * 4 + (1.0 - TEMPLATE[:, 1]) * 0.5
    wig_amp = rng.uniform(0.02, 0.08, size=(N_JOINTS, 3, 3)) * extremity[:, None, None]
    wig_freq = rng.uniform(0.3, 1.2, size=(N_JOINTS, 3))
    wig_phase = rng.uniform(0, 2 * np.pi, size=(N_JOINTS, 3, 3))
    truth = MotionTruth(scale=1.0, body_amp=body_amp, body_freq=body_freq,
                        body_phase=body_phase, wig_amp=wig_amp, wig_freq=wig_freq,
                        wig_phase=wig_phase, target_speed=target_speed)
    # calibrate scale so mean joint speed on the 10 Hz grid hits the target
    grid = np.arange(int(duration * 10) + 1) / 10.0
    pos = truth.positions(grid)
    steps = np.linalg.norm(np.diff(pos, axis=0), axis=2)
    realized = steps.mean() * 10.0
    truth.scale = target_speed / realized
    return truth


def _make_log(rng: np.random.Generator, spec: CohortSpec, truth: MotionTruth,
              body_id: int, source_id: str) -> tuple[RawTrackingLog, np.ndarray]:
    step = 1.0 / spec.source_rate
    n = int(round(spec.duration_seconds * spec.source_rate)) + 1
    times = np.arange(n) * step
    if spec.timestamp_jitter > 0:
        jitter = rng.uniform(-1, 1, size=n) * min(spec.timestamp_jitter, 0.4 * step)
        times = times + jitter
        times[0] = max(times[0], 0.0)
    pos = truth.positions(times)
    if spec.dropout_rate > 0:
        mask = rng.random(pos.shape) < spec.dropout_rate
        pos = np.where(mask, np.nan, pos)

    researcher = TEMPLATE + np.array([2.0, 0.0, 0.5])
    entries = []
    for i, t in enumerate(times):
        entries.append(RawEntry(float(t), body_id, pos[i]))
        if rng.random() < spec.distractor_rate:
            entries.append(RawEntry(float(t), body_id + 1,
                                    researcher + rng.normal(0, 0.002, size=(N_JOINTS, 3))))
        if rng.random() < spec.distractor_rate:
            teleport = TEMPLATE + rng.uniform(-1.5, 1.5, size=3)
            entries.append(RawEntry(float(t), body_id + 2, teleport))
    entries.sort(key=lambda e: e.timestamp)
    return RawTrackingLog(entries=entries, source_id=source_id), times


def subject_target_speed(spec: CohortSpec, subject_index: int, label: int) -> float:
    """One mean-speed target per subject, shared by all of its tasks."""
    rng = derive_rng(spec.seed, "speed", subject_index)
    mean = spec.class_speed_means[label]
    return max(float(rng.normal(mean, spec.class_speed_sd)), 0.05)


def generate_recording(spec: CohortSpec, subject_index: int, label: int,
                       task_id: str) -> SyntheticRecording:
    subject_id = f"subj{subject_index:03d}"
    rng = derive_rng(spec.seed, "cohort", subject_index, task_id)
    target = subject_target_speed(spec, subject_index, label)
    truth = _draw_motion(rng, target, spec.duration_seconds)
    body_id = int(rng.integers(1, 7))
    log, times = _make_log(rng, spec, truth, body_id, f"{subject_id}_{task_id}")
    return SyntheticRecording(subject_id=subject_id, task_id=task_id, label=label,
                              body_id=body_id, log=log, truth=truth, timestamps=times)


def generate_cohort(spec: CohortSpec) -> Cohort:
    """Deterministic cohort: subjects 0..n-1 are class 0, the rest class 1."""
    cohort = Cohort(spec=spec)
    for idx in range(2 * spec.n_per_class):
        label = 0 if idx < spec.n_per_class else 1
        for task in spec.tasks:
            cohort.recordings.append(generate_recording(spec, idx, label, task))
    return cohort
