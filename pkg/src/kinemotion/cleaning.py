"""Participant selection, movement-continuity filtering, and uniform resampling."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJointError, EmptyTrackError, TrackTooShortError
from .joints import JOINT_NAMES, N_JOINTS
from .skeleton_io import RawTrackingLog, SkeletonSequence


@dataclass(frozen=True)
class CleaningConfig:
    window_seconds: float = 10.0
    window_hop_seconds: float = 10.0
    max_jump_meters: float = 0.30
    target_rate: float = 10.0

    def __post_init__(self):
        if min(self.window_seconds, self.window_hop_seconds, self.max_jump_meters, self.target_rate) <= 0:
            raise ValueError("all cleaning parameters must be strictly positive")
        if self.window_hop_seconds > self.window_seconds:
            raise ValueError("window_hop_seconds must not exceed window_seconds")


@dataclass
class RawBodyTrack:
    """Frames of the selected participant body; timestamps strictly increasing."""

    subject_id: str
    task_id: str
    timestamps: np.ndarray  # (N,) float64
    frames: np.ndarray      # (N, 32, 3) float64, NaN where missing


def _centroids(frames: np.ndarray) -> np.ndarray:
    """Per-frame mean of the available (non-missing) joint positions."""
    with np.errstate(invalid="ignore"):
        return np.nanmean(frames, axis=1)


def select_participant(
    log: RawTrackingLog,
    cfg: CleaningConfig = CleaningConfig(),
    subject_id: str = "",
    task_id: str = "",
) -> RawBodyTrack:
    """Keep the modal body per time window, then drop frames whose centroid jumps.

    Each entry is assigned to the last window starting at or before it; the
    modal body of a window is computed over everything the window spans, so
    overlapping windows (hop < window) still classify each entry once.
    Window ties keep the previous window's body, falling back to the lowest id.
    """
    if not log.entries:
        raise EmptyTrackError("log has no entries")
    times = np.array([e.timestamp for e in log.entries])
    bodies = np.array([e.body_id for e in log.entries])
    t0 = times[0]
    window_of = np.floor((times - t0) / cfg.window_hop_seconds).astype(int)

    kept_indices: list[int] = []
    previous_body: int | None = None
    for w in range(window_of.max() + 1):
        start = t0 + w * cfg.window_hop_seconds
        in_window = (times >= start) & (times < start + cfg.window_seconds)
        if not in_window.any():
            continue
        counts = Counter(bodies[in_window])
        top = max(counts.values())
        candidates = sorted(b for b, c in counts.items() if c == top)
        if previous_body in candidates:
            modal = previous_body
        else:
            modal = candidates[0]
        previous_body = modal
        assigned = np.flatnonzero((window_of == w) & (bodies == modal))
        kept_indices.extend(assigned.tolist())

    if not kept_indices:
        raise EmptyTrackError("no body retained in any window")
    kept_indices.sort()

    frames = np.stack([log.entries[i].joints for i in kept_indices])
    stamps = times[kept_indices]

    # Continuity: discard any frame whose centroid jumps >= max_jump_meters
    # from the previously retained frame; interpolation bridges the gap later.
    cents = _centroids(frames)
    keep = [0]
    last = 0
    for i in range(1, len(kept_indices)):
        jump = np.linalg.norm(cents[i] - cents[last])
        if np.isnan(jump) or jump < cfg.max_jump_meters:
            keep.append(i)
            last = i
    frames = frames[keep]
    stamps = stamps[keep]

    # Strictly increasing timestamps: collapse duplicates, keeping the first.
    uniq = np.concatenate(([True], np.diff(stamps) > 0))
    return RawBodyTrack(subject_id=subject_id, task_id=task_id, timestamps=stamps[uniq], frames=frames[uniq])


def resample_uniform(track: RawBodyTrack, cfg: CleaningConfig = CleaningConfig()) -> SkeletonSequence:
    """Resample to target_rate with per-coordinate linear interpolation.

    Interior gaps interpolate between the nearest non-missing samples of the
    same coordinate; leading/trailing gaps extend the nearest value. The grid
    is t0 + k/rate up to the last input timestamp.
    """
    n = len(track.timestamps)
    if n < 2:
        raise TrackTooShortError(f"track has {n} samples, need at least 2")
    rate = cfg.target_rate
    t0 = track.timestamps[0]
    span = track.timestamps[-1] - t0
    n_out = int(np.floor(span * rate + 1e-9)) + 1
    grid = t0 + np.arange(n_out) / rate

    out = np.empty((n_out, N_JOINTS, 3))
    for j in range(N_JOINTS):
        for d in range(3):
            series = track.frames[:, j, d]
            valid = ~np.isnan(series)
            if not valid.any():
                raise DegenerateJointError(
                    f"joint {JOINT_NAMES[j]} coordinate {'xyz'[d]} missing in all samples"
                )
            out[:, j, d] = np.interp(grid, track.timestamps[valid], series[valid])

    return SkeletonSequence(
        subject_id=track.subject_id, task_id=track.task_id, rate=rate, frames=out
    )


def track_from_sequence(seq: SkeletonSequence) -> RawBodyTrack:
    """View a cleaned sequence as a track (uniform grid), e.g. to re-resample."""
    stamps = np.arange(seq.n_frames) / seq.rate
    return RawBodyTrack(
        subject_id=seq.subject_id, task_id=seq.task_id, timestamps=stamps, frames=seq.frames.copy()
    )
