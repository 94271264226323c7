"""Spatio-temporal residual 3D-CNN over single-channel heatmap videos.

Slow-pathway-style ResNet: a spatial stem, one spatial-only bottleneck stage,
then two stages whose first 1x1 conv carries a temporal extent of 3. Global
average pooling over (T, H, W) makes the parameter count independent of the
input length; a single sigmoid unit emits the positive-class probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn


@dataclass(frozen=True)
class StageSpec:
    blocks: int
    mid_channels: int
    out_channels: int
    temporal_kernel: int  # first 1x1 conv: 1 or 3
    spatial_stride: int   # applied in the first block of the stage


@dataclass(frozen=True)
class NetSpec:
    stem_channels: int = 32
    stem_spatial_kernel: int = 7
    stages: tuple[StageSpec, ...] = (
        StageSpec(blocks=4, mid_channels=32, out_channels=128,
                  temporal_kernel=1, spatial_stride=1),
        StageSpec(blocks=6, mid_channels=64, out_channels=256,
                  temporal_kernel=3, spatial_stride=2),
        StageSpec(blocks=3, mid_channels=128, out_channels=512,
                  temporal_kernel=3, spatial_stride=2),
    )


class Bottleneck(nn.Module):
    """(t x 1^2, mid) -> (1 x 3^2, mid) -> (1 x 1^2, out) with a residual shortcut."""

    def __init__(self, in_channels: int, mid_channels: int, out_channels: int,
                 temporal_kernel: int, spatial_stride: int):
        super().__init__()
        t_pad = temporal_kernel // 2
        self.conv1 = nn.Conv3d(in_channels, mid_channels,
                               (temporal_kernel, 1, 1), padding=(t_pad, 0, 0),
                               bias=False)
        self.bn1 = nn.BatchNorm3d(mid_channels)
        self.conv2 = nn.Conv3d(mid_channels, mid_channels, (1, 3, 3),
                               stride=(1, spatial_stride, spatial_stride),
                               padding=(0, 1, 1), bias=False)
        self.bn2 = nn.BatchNorm3d(mid_channels)
        self.conv3 = nn.Conv3d(mid_channels, out_channels, (1, 1, 1), bias=False)
        self.bn3 = nn.BatchNorm3d(out_channels)
        self.relu = nn.ReLU(inplace=True)
        if in_channels != out_channels or spatial_stride != 1:
            self.shortcut = nn.Sequential(
                nn.Conv3d(in_channels, out_channels, (1, 1, 1),
                          stride=(1, spatial_stride, spatial_stride), bias=False),
                nn.BatchNorm3d(out_channels),
            )
        else:
            self.shortcut = nn.Identity()

    def forward(self, x):
        out = self.relu(self.bn1(self.conv1(x)))
        out = self.relu(self.bn2(self.conv2(out)))
        out = self.bn3(self.conv3(out))
        return self.relu(out + self.shortcut(x))


class HeatmapNet(nn.Module):
    def __init__(self, spec: NetSpec = NetSpec()):
        super().__init__()
        k = spec.stem_spatial_kernel
        self.stem = nn.Sequential(
            nn.Conv3d(1, spec.stem_channels, (1, k, k),
                      padding=(0, k // 2, k // 2), bias=False),
            nn.BatchNorm3d(spec.stem_channels),
            nn.ReLU(inplace=True),
        )
        stages = []
        in_channels = spec.stem_channels
        for stage in spec.stages:
            blocks = []
            for b in range(stage.blocks):
                blocks.append(Bottleneck(
                    in_channels, stage.mid_channels, stage.out_channels,
                    stage.temporal_kernel,
                    stage.spatial_stride if b == 0 else 1,
                ))
                in_channels = stage.out_channels
            stages.append(nn.Sequential(*blocks))
        self.stages = nn.Sequential(*stages)
        self.head = nn.Linear(in_channels, 1)

    def forward(self, x):
        if x.dim() != 5 or x.shape[1] != 1:
            raise ValueError(f"expected (B, 1, T, H, W), got {tuple(x.shape)}")
        out = self.stages(self.stem(x))
        pooled = out.mean(dim=(2, 3, 4))  # global average pool
        return torch.sigmoid(self.head(pooled))


def build_network(spec: NetSpec = NetSpec(), seed: int = 0) -> HeatmapNet:
    """Deterministic construction: same seed, same initial weights."""
    torch.manual_seed(seed)
    return HeatmapNet(spec)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
