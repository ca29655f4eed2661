"""Divide-and-conquer bipartition tree.

Each internal node splits its classes into two halves of sizes floor(n/2)
and ceil(n/2). Every such bipartition gets a plane trained on the training
rows of the node's classes; the plane that scores best on held-out rows
wins, and both halves are split again until single classes remain.
Prediction walks one root-to-leaf path, ceil(log2 n) planes at most.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence, Union

import numpy as np

from .data_io import Dataset, stratified_split
from .errors import CoverageError, DimensionError, InputError, ParameterError
from .metrics import accuracy, split_metric
from .shard_engine import ExecConfig, LabeledView, run_confusion_job, run_training_job
from .svm_core import DEFAULT_MU, SvmPlane

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassPartition:
    """Unordered bipartition, oriented so ``positive`` holds the smallest class id."""

    positive: tuple[int, ...]
    negative: tuple[int, ...]

    def __post_init__(self):
        pos, neg = tuple(sorted(self.positive)), tuple(sorted(self.negative))
        if not pos or not neg:
            raise ParameterError("both sides of a partition must be nonempty")
        if set(pos) & set(neg):
            raise ParameterError("partition sides overlap")
        if abs(len(pos) - len(neg)) > 1:
            raise ParameterError(f"unbalanced partition {pos} | {neg}")
        if min(neg) < min(pos):
            pos, neg = neg, pos
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(sorted(self.positive + self.negative))

    def __str__(self):
        return f"{list(self.positive)} | {list(self.negative)}"


def count_bipartitions(n: int) -> int:
    k = n // 2
    return math.comb(n, k) // 2 if n % 2 == 0 else math.comb(n, k)


def _unrank_combination(pool: Sequence[int], k: int, rank: int) -> list[int]:
    """The rank-th k-subset of ``pool`` in lexicographic order."""
    out = []
    start = 0
    n = len(pool)
    while k:
        for i in range(start, n):
            below = math.comb(n - i - 1, k - 1)
            if rank < below:
                out.append(pool[i])
                start = i + 1
                k -= 1
                break
            rank -= below
    return out


def bipartition_at(classes: Sequence[int], index: int) -> ClassPartition:
    """Candidate ``index`` in the order produced by enumerate_bipartitions."""
    classes = sorted(classes)
    n = len(classes)
    if n < 2:
        raise ParameterError("need at least 2 classes to partition")
    if not 0 <= index < count_bipartitions(n):
        raise IndexError(index)
    k = n // 2
    if n % 2 == 0:
        # fix the smallest id on the enumerated side to avoid counting each split twice
        side = [classes[0]] + _unrank_combination(classes[1:], k - 1, index)
    else:
        side = _unrank_combination(classes, k, index)
    rest = [c for c in classes if c not in side]
    return ClassPartition(tuple(side), tuple(rest))


def enumerate_bipartitions(classes: Sequence[int]) -> list[ClassPartition]:
    """All balanced bipartitions: C(n, n/2)/2 for even n, C(n, floor(n/2)) for odd n.

    Ordered lexicographically by the enumerated side (the one holding the
    smallest id for even n, the smaller side for odd n).
    """
    if len(classes) < 2:
        raise ParameterError("need at least 2 classes to partition")
    if len(set(classes)) != len(classes):
        raise ParameterError("duplicate class ids")
    return [bipartition_at(classes, i) for i in range(count_bipartitions(len(classes)))]


def select_best(scores: Sequence[tuple[int, float]]) -> int:
    """Index with the highest score; ties go to the lowest index."""
    if not scores:
        raise ParameterError("no candidate scores to select from")
    best_idx, best_val = None, -math.inf
    for idx, val in sorted(scores, key=lambda s: s[0]):
        if val > best_val:
            best_idx, best_val = idx, val
    return best_idx


# ---------------------------------------------------------------- tree types


@dataclass(frozen=True)
class Leaf:
    class_id: int


@dataclass(frozen=True)
class Internal:
    plane: SvmPlane
    partition: ClassPartition
    validation_accuracy: float
    validation_score: float
    pos_child: "TreeNode"
    neg_child: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class BuildConfig:
    mu: float = DEFAULT_MU
    validation_fraction: float = 0.2
    seed: int = 0
    selection_metric: str = "accuracy"
    max_candidates: int | None = None
    execution: ExecConfig = field(default_factory=ExecConfig)

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ParameterError(f"mu must be > 0, got {self.mu}")
        if not 0 < self.validation_fraction < 1:
            raise ParameterError("validation_fraction must lie in (0, 1)")
        split_metric(self.selection_metric)
        if self.max_candidates is not None and self.max_candidates < 1:
            raise ParameterError("max_candidates must be >= 1")

    def fingerprint(self) -> dict:
        """Settings that determine the model. Execution settings are left out."""
        d = asdict(self)
        d.pop("execution")
        return d


@dataclass
class BuildStats:
    planes_trained: int = 0
    exhaustive: bool = True


@dataclass(frozen=True)
class SvmTree:
    root: TreeNode
    classes: tuple[int, ...]
    feature_count: int
    config: dict
    class_names: tuple[str, ...] = ()
    planes_trained: int = 0
    exhaustive: bool = True

    def depth(self) -> int:
        def rec(node):
            return 0 if isinstance(node, Leaf) else 1 + max(rec(node.pos_child), rec(node.neg_child))

        return rec(self.root)

    def internal_nodes(self) -> list[Internal]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Internal):
                out.append(node)
                stack += [node.neg_child, node.pos_child]
        return out

    def leaves(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node.class_id)
            else:
                stack += [node.neg_child, node.pos_child]
        return out

    @property
    def planes_per_prediction(self) -> int:
        return self.depth()

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model_kind": "tree",
            "classes": list(self.classes),
            "class_names": list(self.class_names),
            "feature_count": self.feature_count,
            "config": self.config,
            "planes_trained": self.planes_trained,
            "exhaustive": self.exhaustive,
            "root": _node_to_dict(self.root),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmTree":
        if d.get("format_version") != FORMAT_VERSION or d.get("model_kind") != "tree":
            raise InputError("not a version-1 tree document")
        return cls(
            root=_node_from_dict(d["root"]),
            classes=tuple(d["classes"]),
            feature_count=int(d["feature_count"]),
            config=dict(d["config"]),
            class_names=tuple(d.get("class_names", ())),
            planes_trained=int(d.get("planes_trained", 0)),
            exhaustive=bool(d.get("exhaustive", True)),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def plane_to_dict(plane: SvmPlane) -> dict:
    # json writes floats with repr(), the shortest string that round-trips
    return {"w": [float(v) for v in plane.w], "gamma": plane.gamma, "mu": plane.mu}


def plane_from_dict(d: dict) -> SvmPlane:
    return SvmPlane(np.array(d["w"], dtype=np.float64), d["gamma"], d["mu"])


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.class_id}
    return {
        **plane_to_dict(node.plane),
        "partition": {"positive": list(node.partition.positive), "negative": list(node.partition.negative)},
        "validation_accuracy": node.validation_accuracy,
        "validation_score": node.validation_score,
        "pos": _node_to_dict(node.pos_child),
        "neg": _node_to_dict(node.neg_child),
    }


def _node_from_dict(d: dict) -> TreeNode:
    if "leaf" in d:
        return Leaf(int(d["leaf"]))
    part = d["partition"]
    return Internal(
        plane=plane_from_dict(d),
        partition=ClassPartition(tuple(part["positive"]), tuple(part["negative"])),
        validation_accuracy=float(d["validation_accuracy"]),
        validation_score=float(d["validation_score"]),
        pos_child=_node_from_dict(d["pos"]),
        neg_child=_node_from_dict(d["neg"]),
    )


# ---------------------------------------------------------------- training


def _candidate_indices(classes: Sequence[int], config: BuildConfig, stats: BuildStats) -> list[int]:
    total = count_bipartitions(len(classes))
    cap = config.max_candidates
    if cap is None or cap >= total:
        return list(range(total))
    stats.exhaustive = False
    rng = np.random.default_rng([config.seed, *classes])
    return sorted(int(i) for i in rng.choice(total, size=cap, replace=False))


def score_candidates(train: Dataset, validation: Dataset, classes: Sequence[int], config: BuildConfig,
                     indices: Sequence[int] | None = None):
    """Train and score candidate splits of ``classes``.

    Returns a list of (index, partition, plane, confusion) in index order.
    """
    metric_rows = []
    ex = config.execution
    if indices is None:
        indices = range(count_bipartitions(len(classes)))
    for i in indices:
        part = bipartition_at(classes, i)
        view = LabeledView.from_partition(train, part.positive, part.negative)
        plane = run_training_job(view, ex.plan(view.m), config.mu, ex)
        vview = LabeledView.from_partition(validation, part.positive, part.negative)
        conf = run_confusion_job(plane, vview, ex.plan(vview.m), ex)
        metric_rows.append((i, part, plane, conf))
    return metric_rows


def train_node(train: Dataset, validation: Dataset, classes: Sequence[int], config: BuildConfig,
               stats: BuildStats | None = None) -> TreeNode:
    stats = stats if stats is not None else BuildStats()
    classes = sorted(int(c) for c in classes)
    if len(classes) == 1:
        return Leaf(classes[0])
    train_counts = np.bincount(train.labels, minlength=max(classes) + 1)
    val_counts = np.bincount(validation.labels, minlength=max(classes) + 1)
    for c in classes:
        if train_counts[c] == 0:
            raise CoverageError(c, "training")
        if val_counts[c] == 0:
            raise CoverageError(c, "validation")
    node_train, node_val = train.restrict(classes), validation.restrict(classes)

    metric = split_metric(config.selection_metric)
    scored = score_candidates(node_train, node_val, classes, config, _candidate_indices(classes, config, stats))
    stats.planes_trained += len(scored)
    best = select_best([(i, metric(conf)) for i, _, _, conf in scored])
    _, part, plane, conf = next(s for s in scored if s[0] == best)
    return Internal(
        plane=plane,
        partition=part,
        validation_accuracy=accuracy(conf),
        validation_score=metric(conf),
        pos_child=train_node(node_train, node_val, part.positive, config, stats),
        neg_child=train_node(node_train, node_val, part.negative, config, stats),
    )


def build_tree(data: Dataset, config: BuildConfig = BuildConfig()) -> SvmTree:
    classes = data.present_classes()
    if len(classes) < 2:
        raise InputError(f"need at least 2 classes, found {len(classes)}")
    counts = data.class_counts()
    for c in classes:
        if counts[c] < 2:
            raise InputError(f"class {data.class_names[c]!r} has {counts[c]} row; need at least 2")
    train, validation = stratified_split(data, config.validation_fraction, config.seed)
    stats = BuildStats()
    root = train_node(train, validation, classes, config, stats)
    return SvmTree(
        root=root,
        classes=tuple(classes),
        feature_count=data.d,
        config=config.fingerprint(),
        class_names=tuple(data.class_names),
        planes_trained=stats.planes_trained,
        exhaustive=stats.exhaustive,
    )


# ---------------------------------------------------------------- prediction


def _route(tree: SvmTree, rows: np.ndarray) -> tuple[np.ndarray, int]:
    out = np.empty(rows.shape[0], dtype=np.int64)
    evaluations = 0
    stack = [(tree.root, np.arange(rows.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if isinstance(node, Leaf):
            out[idx] = node.class_id
            continue
        if idx.size == 0:
            continue
        evaluations += idx.size
        go_pos = rows[idx] @ node.plane.w - node.plane.gamma >= 0
        stack.append((node.pos_child, idx[go_pos]))
        stack.append((node.neg_child, idx[~go_pos]))
    return out, evaluations


def _as_rows(tree: SvmTree, rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim == 1 and rows.size == 0:
        rows = rows.reshape(0, tree.feature_count)
    if rows.ndim != 2 or rows.shape[1] != tree.feature_count:
        raise DimensionError(f"expected rows with {tree.feature_count} features, got shape {rows.shape}")
    return rows


def predict(tree: SvmTree, x) -> tuple[int, int]:
    """(class id, number of planes evaluated) for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("predict takes a single feature vector")
    labels, evaluations = _route(tree, _as_rows(tree, x[None, :]))
    return int(labels[0]), evaluations


def predict_batch(tree: SvmTree, rows) -> tuple[np.ndarray, int, float]:
    """Labels, total planes evaluated, and elapsed seconds for a matrix of rows."""
    rows = _as_rows(tree, rows)
    t0 = time.perf_counter()
    labels, evaluations = _route(tree, rows)
    return labels, evaluations, time.perf_counter() - t0
