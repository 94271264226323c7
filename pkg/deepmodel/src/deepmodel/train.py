"""Per-(task, fold) training: SGD + plateau LR schedule + early stopping."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .data import ManifestRow, load_clip
from .net import NetSpec, build_network


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 3
    epochs: int = 200
    minibatches_per_epoch: int = 100
    learning_rate: float = 0.01
    plateau_patience: int = 10
    plateau_factor: float = 0.1
    early_stop_patience: int = 25
    t_sample: int = 100
    val_fraction: float = 0.2  # of training subjects, held out subject-level
    seed: int = 0

    def __post_init__(self):
        if min(self.batch_size, self.epochs, self.minibatches_per_epoch,
               self.plateau_patience, self.early_stop_patience, self.t_sample) <= 0:
            raise ValueError("all training parameters must be positive")


class PlateauScheduler:
    """Multiply the lr by `factor` after `patience` epochs without improvement."""

    def __init__(self, lr: float, patience: int, factor: float):
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.best = float("inf")
        self.waited = 0

    def step(self, value: float) -> bool:
        if value < self.best:
            self.best = value
            self.waited = 0
            return False
        self.waited += 1
        if self.waited >= self.patience:  # patience 10: reduce on the 10th flat epoch
            self.lr *= self.factor
            self.waited = 0
            return True
        return False


class EarlyStopper:
    def __init__(self, patience: int):
        self.patience = patience
        self.best = float("inf")
        self.waited = 0

    def step(self, value: float) -> bool:
        if value < self.best:
            self.best = value
            self.waited = 0
            return False
        self.waited += 1
        return self.waited >= self.patience


@dataclass
class TrainOutcome:
    model: nn.Module
    log: list[dict] = field(default_factory=list)
    backend: dict = field(default_factory=dict)

    def log_jsonl(self) -> str:
        head = [{"backend": self.backend}] if self.backend else []
        return "".join(json.dumps(row, sort_keys=True) + "\n"
                       for row in head + self.log)


def _split_validation_subjects(rows: list[ManifestRow], fraction: float,
                               rng: np.random.Generator) -> set[str]:
    per_class: dict[int, list[str]] = {}
    for sid, label in sorted({(r.subject_id, r.label) for r in rows}):
        per_class.setdefault(label, []).append(sid)
    held_out: set[str] = set()
    for label, sids in sorted(per_class.items()):
        n_val = max(1, int(round(fraction * len(sids))))
        picks = rng.permutation(len(sids))[:n_val]
        held_out.update(sids[i] for i in picks)
    return held_out


def _epoch_loss(model, rows, volumes_dir, cfg, device) -> float:
    model.eval()
    loss_fn = nn.BCELoss(reduction="sum")
    total, count = 0.0, 0
    with torch.no_grad():
        for row in rows:
            clip = load_clip(volumes_dir, row, cfg.t_sample).unsqueeze(0).to(device)
            prob = model(clip)
            target = torch.tensor([[float(row.label)]], device=device)
            total += float(loss_fn(prob, target))
            count += 1
    return total / max(count, 1)


def train_task_model(rows: list[ManifestRow], volumes_dir: str,
                     cfg: TrainConfig = TrainConfig(),
                     spec: NetSpec = NetSpec()) -> TrainOutcome:
    """Train on one task x fold's manifest rows (training subjects only).

    A subject-level slice of the rows is held out to drive the plateau
    schedule and early stopping; the best-validation weights are returned.
    """
    if not rows:
        raise ValueError("empty manifest")
    labels = {r.label for r in rows}
    if len(labels) < 2:
        raise ValueError("single-class manifest")

    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    val_subjects = _split_validation_subjects(rows, cfg.val_fraction, rng)
    train_rows = [r for r in rows if r.subject_id not in val_subjects]
    val_rows = [r for r in rows if r.subject_id in val_subjects]
    if not train_rows or len({r.label for r in train_rows}) < 2:
        raise ValueError("validation split left a degenerate training set")

    device = torch.device("cpu")
    model = build_network(spec, seed=cfg.seed).to(device)
    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.learning_rate)
    scheduler = PlateauScheduler(cfg.learning_rate, cfg.plateau_patience,
                                 cfg.plateau_factor)
    stopper = EarlyStopper(cfg.early_stop_patience)
    loss_fn = nn.BCELoss()

    best_state = copy.deepcopy(model.state_dict())
    best_val = float("inf")
    log: list[dict] = []
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        train_loss = 0.0
        for _ in range(cfg.minibatches_per_epoch):
            picks = rng.integers(0, len(train_rows), size=cfg.batch_size)
            clips = torch.stack([
                load_clip(volumes_dir, train_rows[i], cfg.t_sample, rng)
                for i in picks
            ]).to(device)
            targets = torch.tensor([[float(train_rows[i].label)] for i in picks],
                                   device=device)
            optimizer.zero_grad()
            loss = loss_fn(model(clips), targets)
            loss.backward()
            optimizer.step()
            train_loss += loss.item()
        train_loss /= cfg.minibatches_per_epoch

        val_loss = _epoch_loss(model, val_rows, volumes_dir, cfg, device)
        events = []
        if val_loss < best_val:
            best_val = val_loss
            best_state = copy.deepcopy(model.state_dict())
        if scheduler.step(val_loss):
            events.append("lr_reduced")
            for group in optimizer.param_groups:
                group["lr"] = scheduler.lr
        stop = stopper.step(val_loss)
        if stop:
            events.append("early_stop")
        log.append({"epoch": epoch, "train_loss": round(train_loss, 6),
                    "val_loss": round(val_loss, 6), "lr": scheduler.lr,
                    "events": events})
        if stop:
            break

    model.load_state_dict(best_state)
    model.eval()
    backend = {
        "torch_version": torch.__version__,
        "deterministic_algorithms": torch.are_deterministic_algorithms_enabled(),
        "seed": cfg.seed,
    }
    return TrainOutcome(model=model, log=log, backend=backend)
