"""Model files: one JSON document per model, tagged with its kind."""

from __future__ import annotations

import json

from .baselines import OvoModel, OvrModel, predict_ovo_batch, predict_ovr_batch
from .data_io import Standardizer
from .errors import InputError, ParseError
from .tree_builder import SvmTree, predict_batch

_KINDS = {"tree": SvmTree, "ovo": OvoModel, "ovr": OvrModel}


def model_kind(model) -> str:
    for kind, cls in _KINDS.items():
        if isinstance(model, cls):
            return kind
    raise TypeError(f"not a model: {type(model).__name__}")


def dumps_model(model, standardizer: Standardizer | None = None) -> str:
    doc = model.to_dict()
    doc["standardizer"] = standardizer.to_dict() if standardizer is not None else None
    return json.dumps(doc, indent=1)


def loads_model(text: str):
    """Returns (model, standardizer or None)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file is not valid JSON: {exc}") from None
    kind = doc.get("model_kind") if isinstance(doc, dict) else None
    if kind not in _KINDS:
        raise InputError(f"unknown model kind {kind!r}")
    std = doc.get("standardizer")
    return _KINDS[kind].from_dict(doc), Standardizer.from_dict(std) if std else None


def save_model(path, model, standardizer: Standardizer | None = None) -> int:
    """Write the model; returns the file size in bytes."""
    text = dumps_model(model, standardizer)
    with open(path, "w") as fh:
        fh.write(text)
    return len(text.encode())


def load_model(path):
    with open(path) as fh:
        return loads_model(fh.read())


def predict_any(model, rows):
    """(labels, planes evaluated, seconds) for any model kind."""
    kind = model_kind(model)
    if kind == "tree":
        return predict_batch(model, rows)
    if kind == "ovo":
        return predict_ovo_batch(model, rows)
    return predict_ovr_batch(model, rows)
