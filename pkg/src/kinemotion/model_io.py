"""Versioned serialization for trained classical models."""

from __future__ import annotations

import json

import numpy as np

from .errors import SequenceFormatError
from .forest import ForestModel
from .svm import LinearModel

FORMAT_VERSION = 1


def save_model(model: LinearModel | ForestModel) -> str:
    if isinstance(model, LinearModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "linear_svm",
            "weights": model.weights.tolist(),
            "bias": model.bias,
            "C": model.C,
            "selected_features": np.asarray(model.selected_features).tolist(),
        }
    elif isinstance(model, ForestModel):
        doc = {
            "format_version": FORMAT_VERSION,
            "kind": "random_forest",
            "max_depth": model.max_depth,
            "n_trees": model.n_trees,
            "seed": model.seed,
            "features": model.features.tolist(),
            "thresholds": model.thresholds.tolist(),
            "values": model.values.tolist(),
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return json.dumps(doc, sort_keys=True) + "\n"


def load_model(text: str) -> LinearModel | ForestModel:
    doc = json.loads(text)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise SequenceFormatError(f"unsupported model format version {version!r}")
    if doc["kind"] == "linear_svm":
        return LinearModel(
            weights=np.array(doc["weights"], dtype=float),
            bias=float(doc["bias"]),
            C=float(doc["C"]),
            selected_features=np.array(doc["selected_features"], dtype=int),
        )
    if doc["kind"] == "random_forest":
        return ForestModel(
            features=np.array(doc["features"], dtype=np.int64),
            thresholds=np.array(doc["thresholds"], dtype=float),
            values=np.array(doc["values"], dtype=float),
            max_depth=int(doc["max_depth"]),
            n_trees=int(doc["n_trees"]),
            seed=int(doc["seed"]),
        )
    raise SequenceFormatError(f"unknown model kind {doc['kind']!r}")
