"""One-vs-One and One-vs-Rest on the same proximal solver as the tree."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .data_io import Dataset
from .errors import DimensionError, InputError
from .shard_engine import ExecConfig, LabeledView, run_training_job
from .svm_core import DEFAULT_MU, SvmPlane
from .tree_builder import FORMAT_VERSION, plane_from_dict, plane_to_dict


def _stack(planes: list[SvmPlane]) -> tuple[np.ndarray, np.ndarray]:
    return np.array([p.w for p in planes]), np.array([p.gamma for p in planes])


def _check_classes(data: Dataset) -> list[int]:
    classes = data.present_classes()
    if len(classes) < 2:
        raise InputError(f"need at least 2 classes, found {len(classes)}")
    missing = [data.class_names[c] for c in range(data.n_classes) if c not in classes]
    if missing:
        raise InputError(f"classes with no rows: {missing}")
    return classes


def _as_rows(rows, d: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(-1, d) if rows.size == 0 else rows[None, :]
    if rows.shape[1] != d:
        raise DimensionError(f"expected {d} features, got {rows.shape[1]}")
    return rows


@dataclass(frozen=True)
class OvoModel:
    """Plane for each pair (i, j), i < j; class i is the +1 side."""

    planes: dict
    classes: tuple[int, ...]
    feature_count: int
    class_names: tuple[str, ...] = ()

    @property
    def planes_per_prediction(self) -> int:
        return len(self.planes)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model_kind": "ovo",
            "classes": list(self.classes),
            "class_names": list(self.class_names),
            "feature_count": self.feature_count,
            "planes": [{"pair": list(k), **plane_to_dict(p)} for k, p in self.planes.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OvoModel":
        planes = {tuple(p["pair"]): plane_from_dict(p) for p in d["planes"]}
        return cls(planes, tuple(d["classes"]), int(d["feature_count"]), tuple(d.get("class_names", ())))


@dataclass(frozen=True)
class OvrModel:
    """Plane per class, that class +1 and every other class -1."""

    planes: dict
    classes: tuple[int, ...]
    feature_count: int
    class_names: tuple[str, ...] = ()

    @property
    def planes_per_prediction(self) -> int:
        return len(self.planes)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model_kind": "ovr",
            "classes": list(self.classes),
            "class_names": list(self.class_names),
            "feature_count": self.feature_count,
            "planes": [{"class": k, **plane_to_dict(p)} for k, p in self.planes.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OvrModel":
        planes = {int(p["class"]): plane_from_dict(p) for p in d["planes"]}
        return cls(planes, tuple(d["classes"]), int(d["feature_count"]), tuple(d.get("class_names", ())))


def train_ovo(data: Dataset, mu: float = DEFAULT_MU, execution: ExecConfig = ExecConfig()) -> OvoModel:
    classes = _check_classes(data)
    planes = {}
    for i, j in itertools.combinations(classes, 2):
        view = LabeledView.from_partition(data, [i], [j])
        planes[(i, j)] = run_training_job(view, execution.plan(view.m), mu, execution)
    return OvoModel(planes, tuple(classes), data.d, tuple(data.class_names))


def train_ovr(data: Dataset, mu: float = DEFAULT_MU, execution: ExecConfig = ExecConfig()) -> OvrModel:
    classes = _check_classes(data)
    planes = {}
    for c in classes:
        view = LabeledView.from_partition(data, [c], [k for k in classes if k != c])
        planes[c] = run_training_job(view, execution.plan(view.m), mu, execution)
    return OvrModel(planes, tuple(classes), data.d, tuple(data.class_names))


def _ovo_labels(model: OvoModel, rows: np.ndarray) -> np.ndarray:
    classes = np.asarray(model.classes)
    col = {c: k for k, c in enumerate(model.classes)}
    pairs = list(model.planes)
    w, gamma = _stack([model.planes[p] for p in pairs])
    values = rows @ w.T - gamma
    votes = np.zeros((rows.shape[0], len(classes)), dtype=np.int64)
    mass = np.zeros((rows.shape[0], len(classes)))
    for p, (i, j) in enumerate(pairs):
        v = values[:, p]
        first = v >= 0
        strength = np.abs(v)
        votes[:, col[i]] += first
        votes[:, col[j]] += ~first
        mass[:, col[i]] += np.where(first, strength, 0.0)
        mass[:, col[j]] += np.where(first, 0.0, strength)
    # most votes; then most |decision| mass behind those votes; then smallest id
    tied = votes == votes.max(axis=1, keepdims=True)
    return classes[np.argmax(np.where(tied, mass, -np.inf), axis=1)]


def _ovr_labels(model: OvrModel, rows: np.ndarray) -> np.ndarray:
    classes = np.asarray(model.classes)
    w, gamma = _stack([model.planes[c] for c in model.classes])
    # argmax returns the first maximum, i.e. the smallest class id on ties
    return classes[np.argmax(rows @ w.T - gamma, axis=1)]


def predict_ovo(model: OvoModel, x) -> int:
    return int(_ovo_labels(model, _as_rows(x, model.feature_count))[0])


def predict_ovr(model: OvrModel, x) -> int:
    return int(_ovr_labels(model, _as_rows(x, model.feature_count))[0])


def predict_ovo_batch(model: OvoModel, rows) -> tuple[np.ndarray, int, float]:
    rows = _as_rows(rows, model.feature_count)
    t0 = time.perf_counter()
    labels = _ovo_labels(model, rows)
    return labels, rows.shape[0] * len(model.planes), time.perf_counter() - t0


def predict_ovr_batch(model: OvrModel, rows) -> tuple[np.ndarray, int, float]:
    rows = _as_rows(rows, model.feature_count)
    t0 = time.perf_counter()
    labels = _ovr_labels(model, rows)
    return labels, rows.shape[0] * len(model.planes), time.perf_counter() - t0
