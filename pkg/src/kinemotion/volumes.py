"""Gaussian joint-heatmap video volumes: rendering, windowing, augmentation.

A sequence is projected onto the frontal (x, y) plane and rendered onto a
fixed per-sequence pixel grid spanning the sequence's own coordinate extents.
Pixel intensity sums one Gaussian bump per joint with a 1-D normalization
constant, so an exactly-hit pixel reads 1/(sigma*sqrt(2*pi)).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateGridError
from .rng import derive_rng
from .skeleton_io import SkeletonSequence

AUG_ORIGINAL = "original"


@dataclass(frozen=True)
class RenderConfig:
    width_px: int = 64    # H: horizontal pixel count
    height_px: int = 78   # V: vertical pixel count
    sigma: float = 0.05   # meters; free parameter of the intensity kernel
    rate: float = 10.0
    window_seconds: float = 30.0
    overlap_seconds: float = 15.0
    jitter_sigma_x: float = 0.35  # meters
    jitter_count: int = 10

    def __post_init__(self):
        if self.width_px < 2 or self.height_px < 2:
            raise ValueError("grid needs at least 2 pixels per axis")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.overlap_seconds >= self.window_seconds:
            raise ValueError("overlap must be shorter than the window")

    @property
    def window_frames(self) -> int:
        return int(round(self.window_seconds * self.rate))

    @property
    def hop_frames(self) -> int:
        return int(round((self.window_seconds - self.overlap_seconds) * self.rate))


@dataclass(frozen=True)
class PixelGrid:
    xs: np.ndarray  # (H,) meters, ascending
    ys: np.ndarray  # (V,) meters, ascending


@dataclass
class HeatmapVolume:
    frames: np.ndarray  # (T, V, H) float64, non-negative; row 0 = top (max y)
    subject_id: str
    task_id: str
    window_index: int = 0
    augmentation_tag: str = AUG_ORIGINAL
    padded: bool = False
    label: int | None = None


def make_grid(seq: SkeletonSequence, cfg: RenderConfig = RenderConfig()) -> PixelGrid:
    """Fixed pixel-to-meter map from the whole sequence's x/y extents."""
    xs_all = seq.frames[:, :, 0]
    ys_all = seq.frames[:, :, 1]
    x_min, x_max = float(xs_all.min()), float(xs_all.max())
    y_min, y_max = float(ys_all.min()), float(ys_all.max())
    if x_max == x_min:
        raise DegenerateGridError("zero extent along x")
    if y_max == y_min:
        raise DegenerateGridError("zero extent along y")
    h = np.arange(cfg.width_px)
    v = np.arange(cfg.height_px)
    xs = x_min + (h / cfg.width_px) * (x_max - x_min)
    ys = y_min + (v / cfg.height_px) * (y_max - y_min)
    return PixelGrid(xs=xs, ys=ys)


def render_frame(joints_xy: np.ndarray, grid: PixelGrid, sigma: float) -> np.ndarray:
    """(V, H) intensity frame; the squared exponent separates over x and y."""
    coef = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    dx = grid.xs[None, :] - joints_xy[:, 0][:, None]   # (J, H)
    dy = grid.ys[None, :] - joints_xy[:, 1][:, None]   # (J, V)
    gx = np.exp(-0.5 * (dx / sigma) ** 2)
    gy = np.exp(-0.5 * (dy / sigma) ** 2)
    frame = coef * (gy.T @ gx)                          # (V, H), ys ascending
    return frame[::-1]                                  # image rows top-down


def render_sequence(seq: SkeletonSequence, cfg: RenderConfig = RenderConfig(),
                    grid: PixelGrid | None = None) -> HeatmapVolume:
    """One heatmap frame per sample, on the sequence's own grid by default."""
    if grid is None:
        grid = make_grid(seq, cfg)
    frames = np.empty((seq.n_frames, cfg.height_px, cfg.width_px))
    for t in range(seq.n_frames):
        frames[t] = render_frame(seq.frames[t, :, :2], grid, cfg.sigma)
    return HeatmapVolume(frames=frames, subject_id=seq.subject_id, task_id=seq.task_id,
                         label=seq.label)


def window_volume(vol: HeatmapVolume, cfg: RenderConfig = RenderConfig()) -> list[HeatmapVolume]:
    """Overlapping fixed-length windows starting every hop.

    A sequence shorter than one window yields a single zero-padded window.
    A tail is emitted (zero-padded, flagged) only if it covers frames that no
    full window covers, i.e. the remainder exceeds the overlap.
    """
    win, hop = cfg.window_frames, cfg.hop_frames
    total = vol.frames.shape[0]
    out: list[HeatmapVolume] = []

    def emit(start: int, stop: int, padded: bool) -> None:
        chunk = vol.frames[start:stop]
        if padded:
            pad = np.zeros((win - chunk.shape[0],) + chunk.shape[1:])
            chunk = np.concatenate([chunk, pad], axis=0)
        out.append(replace(vol, frames=chunk, window_index=len(out), padded=padded))

    if total < win:
        emit(0, total, padded=True)
        return out
    start = 0
    while start + win <= total:
        emit(start, start + win, padded=False)
        start += hop
    if total - start > win - hop:
        emit(start, total, padded=True)
    return out


def jitter_augment(seq: SkeletonSequence, cfg: RenderConfig, rng_seed) -> list[SkeletonSequence]:
    """jitter_count copies, each rigidly shifted in x by one draw of N(0, sigma_x)."""
    rng = np.random.default_rng(rng_seed)
    eps = rng.normal(0.0, cfg.jitter_sigma_x, size=cfg.jitter_count)
    copies = []
    for k in range(cfg.jitter_count):
        frames = seq.frames.copy()
        frames[:, :, 0] += eps[k]
        copies.append(SkeletonSequence(subject_id=seq.subject_id, task_id=seq.task_id,
                                       rate=seq.rate, frames=frames, label=seq.label))
    return copies


def flip_horizontal(vol: HeatmapVolume) -> HeatmapVolume:
    return replace(vol, frames=vol.frames[:, :, ::-1].copy(),
                   augmentation_tag=f"flip({vol.augmentation_tag})")


def _aug_filename_code(tag: str) -> str:
    code = tag.replace("jitter#", "j").replace("flip(", "f").replace(")", "")
    return "orig" if code == AUG_ORIGINAL else code


def volume_filename(subject_id: str, task_id: str, window_index: int, tag: str) -> str:
    return f"{subject_id}_{task_id}_{window_index:03d}_{_aug_filename_code(tag)}.npy"


def augmented_volumes(seq: SkeletonSequence, cfg: RenderConfig, master_seed: int):
    """Yield every windowed volume for one recording: original + 20 derived.

    The grid comes from the original sequence and is reused for its jittered
    copies, so augmentation moves the silhouette inside a fixed frame. Flips
    mirror the jittered windows, giving 10 jitter + 10 flip per original.
    """
    grid = make_grid(seq, cfg)
    for w in window_volume(render_sequence(seq, cfg, grid), cfg):
        yield w
    seed = derive_rng(master_seed, "jitter", seq.subject_id, seq.task_id).integers(2**63)
    for k, jseq in enumerate(jitter_augment(seq, cfg, seed)):
        jvol = render_sequence(jseq, cfg, grid)
        jvol.augmentation_tag = f"jitter#{k}"
        for w in window_volume(jvol, cfg):
            yield w
            yield flip_horizontal(w)


def export_heatmap_dataset(sequences, out_dir: str, cfg: RenderConfig = RenderConfig(),
                           master_seed: int = 0) -> list[dict]:
    """Write float32 NPY volumes plus manifest.csv; returns the manifest rows."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for seq in sequences:
        for vol in augmented_volumes(seq, cfg, master_seed):
            fname = volume_filename(vol.subject_id, vol.task_id, vol.window_index,
                                    vol.augmentation_tag)
            path = os.path.join(out_dir, fname)
            np.save(path + ".tmp.npy", vol.frames.astype(np.float32))
            os.replace(path + ".tmp.npy", path)  # atomic: reruns never see partial files
            rows.append({
                "filename": fname,
                "subject_id": vol.subject_id,
                "task_id": vol.task_id,
                "window_index": vol.window_index,
                "aug_tag": vol.augmentation_tag,
                "label": "" if vol.label is None else int(vol.label),
                "usable": 1,
            })
    rows.sort(key=lambda r: r["filename"])
    path = os.path.join(out_dir, "manifest.csv")
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()) if rows else
                                ["filename", "subject_id", "task_id", "window_index",
                                 "aug_tag", "label", "usable"])
        writer.writeheader()
        writer.writerows(rows)
    os.replace(tmp, path)
    return rows
