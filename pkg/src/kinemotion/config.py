"""Flat key=value run configuration; every value is flag-overridable."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cleaning import CleaningConfig
from .synth import CohortSpec
from .volumes import RenderConfig


def parse_config_text(text: str) -> dict[str, str]:
    """key=value lines; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


@dataclass
class RunConfig:
    workspace: str = "workspace"
    seed: int = 0
    jobs: int = 1
    folds: int = 4
    repetitions: int = 2
    n_trees: int = 500
    cleaning: CleaningConfig = field(default_factory=CleaningConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    cohort: CohortSpec = field(default_factory=CohortSpec)

    @classmethod
    def from_mapping(cls, kv: dict[str, str]) -> "RunConfig":
        def take(name, cast, default):
            return cast(kv[name]) if name in kv else default

        cleaning = CleaningConfig(
            window_seconds=take("window_seconds", float, 10.0),
            window_hop_seconds=take("window_hop_seconds", float,
                                    take("window_seconds", float, 10.0)),
            max_jump_meters=take("max_jump_meters", float, 0.30),
            target_rate=take("target_rate", float, 10.0),
        )
        render = RenderConfig(
            width_px=take("width_px", int, 64),
            height_px=take("height_px", int, 78),
            sigma=take("sigma", float, 0.05),
            rate=cleaning.target_rate,
            window_seconds=take("render_window_seconds", float, 30.0),
            overlap_seconds=take("render_overlap_seconds", float, 15.0),
            jitter_sigma_x=take("jitter_sigma_x", float, 0.35),
            jitter_count=take("jitter_count", int, 10),
        )
        cohort = CohortSpec(
            n_per_class=take("n_per_class", int, 10),
            tasks=tuple(t for t in take("tasks", str, "T2A1,T2A3,T2B1").split(",") if t),
            duration_seconds=take("duration_seconds", float, 30.0),
            class_speed_means=(take("speed_mean_negative", float, 0.5),
                               take("speed_mean_positive", float, 0.8)),
            class_speed_sd=take("speed_sd", float, 0.1),
            distractor_rate=take("distractor_rate", float, 0.2),
            dropout_rate=take("dropout_rate", float, 0.0),
            timestamp_jitter=take("timestamp_jitter", float, 0.0),
            seed=take("seed", int, 0),
            source_rate=take("source_rate", float, 20.0),
        )
        return cls(
            workspace=take("workspace", str, "workspace"),
            seed=take("seed", int, 0),
            jobs=take("jobs", int, 1),
            folds=take("folds", int, 4),
            repetitions=take("repetitions", int, 2),
            n_trees=take("n_trees", int, 500),
            cleaning=cleaning,
            render=render,
            cohort=cohort,
        )
