"""Tree vs OvO vs OvR: accuracy, train/test wall time, plane counts.

Timings cover computation only; loading data and writing files are
excluded. Each method is trained and tested ``reps`` times and the median,
min and max are reported.
"""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .baselines import train_ovo, train_ovr
from .data_io import Dataset
from .errors import ParameterError
from .metrics import MulticlassConfusion, multiclass_accuracy
from .persistence import dumps_model, predict_any
from .tree_builder import BuildConfig, build_tree

METHODS = ("tree", "ovo", "ovr")


@dataclass
class MethodResult:
    method: str
    reps: int
    train_seconds_median: float
    train_seconds_min: float
    train_seconds_max: float
    test_seconds_median: float
    test_seconds_min: float
    test_seconds_max: float
    accuracy: float
    planes_trained: int
    planes_evaluated_total: int
    planes_evaluated_per_sample: float
    planes_per_prediction_max: int
    model_size_bytes: int


CSV_COLUMNS = tuple(f.name for f in fields(MethodResult))


@dataclass
class BenchReport:
    methods: dict[str, MethodResult]
    environment: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "methods": {k: asdict(v) for k, v in self.methods.items()},
            "environment": self.environment,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls({k: MethodResult(**v) for k, v in d["methods"].items()}, d["environment"], d["config"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.methods.values():
            w.writerow(asdict(r))
        return buf.getvalue()


def _train(method: str, data: Dataset, config: BuildConfig):
    if method == "tree":
        return build_tree(data, config)
    if method == "ovo":
        return train_ovo(data, config.mu, config.execution)
    if method == "ovr":
        return train_ovr(data, config.mu, config.execution)
    raise ParameterError(f"unknown method {method!r}; choose from {METHODS}")


def _planes_trained(model) -> int:
    return getattr(model, "planes_trained", None) or len(model.planes)


def run_benchmark(train: Dataset, test: Dataset, methods=METHODS, config: BuildConfig = BuildConfig(),
                  reps: int = 1) -> BenchReport:
    if reps < 1:
        raise ParameterError("reps must be >= 1")
    if not methods:
        raise ParameterError("no methods to benchmark")
    results = {}
    for method in methods:
        train_times, test_times = [], []
        for _ in range(reps):
            t0 = time.perf_counter()
            model = _train(method, train, config)
            train_times.append(time.perf_counter() - t0)
            labels, evaluations, seconds = predict_any(model, test.features)
            test_times.append(seconds)
        conf = MulticlassConfusion.from_labels(test.labels, labels, train.n_classes)
        results[method] = MethodResult(
            method=method,
            reps=reps,
            train_seconds_median=statistics.median(train_times),
            train_seconds_min=min(train_times),
            train_seconds_max=max(train_times),
            test_seconds_median=statistics.median(test_times),
            test_seconds_min=min(test_times),
            test_seconds_max=max(test_times),
            accuracy=multiclass_accuracy(conf),
            planes_trained=_planes_trained(model),
            planes_evaluated_total=int(evaluations),
            planes_evaluated_per_sample=evaluations / test.m,
            planes_per_prediction_max=model.planes_per_prediction,
            model_size_bytes=len(dumps_model(model).encode()),
        )
    ex = config.execution
    environment = {
        "backend": ex.backend,
        "threads": ex.threads,
        "shards": ex.num_shards,
        "cpu_count": os.cpu_count(),
        "seed": config.seed,
        "train_shape": [train.m, train.d],
        "test_shape": [test.m, test.d],
        "n_classes": len(np.unique(train.labels)),
        "timing": "compute only, excluding file I/O",
    }
    return BenchReport(results, environment, config.fingerprint())
