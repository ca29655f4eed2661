"""In-process map/reduce over contiguous row shards.

Map tasks (Gram accumulation, confusion counting) may run on a thread
pool; partial results are always reduced left to right by shard index, so
the output never depends on which task finished first.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Sequence

import numpy as np

from .data_io import Dataset
from .errors import DegenerateInputError, DimensionError, ParameterError
from .metrics import BinaryConfusion
from .svm_core import GramAccumulator, SvmPlane, accumulate_shard, merge, sign_of, solve_plane

MAX_DEFAULT_SHARDS = 16
BACKENDS = ("serial", "threaded")


def default_shards() -> int:
    return max(1, min(os.cpu_count() or 1, MAX_DEFAULT_SHARDS))


@dataclass(frozen=True)
class ExecConfig:
    """How jobs are split and scheduled. ``shards=None`` means default_shards()."""

    shards: int | None = None
    backend: str = "serial"
    threads: int | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ParameterError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.shards is not None and self.shards < 1:
            raise ParameterError("shards must be >= 1")
        if self.threads is not None and self.threads < 1:
            raise ParameterError("threads must be >= 1")

    @property
    def num_shards(self) -> int:
        return self.shards if self.shards is not None else default_shards()

    def plan(self, m: int) -> "ShardPlan":
        return shard_rows(m, self.num_shards)


@dataclass(frozen=True)
class ShardPlan:
    num_shards: int
    ranges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return self.ranges[-1][1]


def shard_rows(m: int, k: int) -> ShardPlan:
    """Split [0, m) into k contiguous ranges whose sizes differ by at most one.

    The first m % k ranges get the extra row.
    """
    if k < 1:
        raise ParameterError(f"number of shards must be >= 1, got {k}")
    if m < 0:
        raise ParameterError(f"row count must be >= 0, got {m}")
    base, extra = divmod(m, k)
    bounds = [0]
    for i in range(k):
        bounds.append(bounds[-1] + base + (1 if i < extra else 0))
    return ShardPlan(k, tuple(zip(bounds[:-1], bounds[1:])))


class LabeledView:
    """Rows of a dataset restricted to a bipartition, with +1/-1 signs.

    Rows whose class is on neither side are dropped.
    """

    def __init__(self, rows, signs):
        self.rows = np.asarray(rows, dtype=np.float64)
        self.signs = np.asarray(signs, dtype=np.int8)
        if self.rows.ndim != 2 or self.signs.shape != (self.rows.shape[0],):
            raise DimensionError("view needs an (m, d) row matrix and m signs")

    @classmethod
    def from_partition(cls, data: Dataset, positive: Iterable[int], negative: Iterable[int]) -> "LabeledView":
        positive, negative = list(positive), list(negative)
        if set(positive) & set(negative):
            raise ParameterError("a class cannot be on both sides of a partition")
        pos = np.isin(data.labels, positive)
        keep = pos | np.isin(data.labels, negative)
        return cls(data.features[keep], np.where(pos[keep], 1, -1))

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


def run_parallel(tasks: Sequence[Callable[[], object]], backend: str = "serial", threads: int | None = None) -> list:
    """Run zero-argument tasks; results come back in task order.

    If tasks fail, the exception of the lowest-indexed failing task is raised.
    """
    if backend not in BACKENDS:
        raise ParameterError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if not tasks:
        return []
    if backend == "serial" or len(tasks) == 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads or default_shards()) as pool:
        futures = [pool.submit(t) for t in tasks]
    return [f.result() for f in futures]


def _map(plan: ShardPlan, fn, cfg: ExecConfig) -> list:
    tasks = [lambda a=a, b=b: fn(a, b) for a, b in plan.ranges]
    return run_parallel(tasks, cfg.backend, cfg.threads)


def _check_plan(plan: ShardPlan, m: int):
    if plan.m != m:
        raise ParameterError(f"shard plan covers {plan.m} rows, view has {m}")


def run_gram_job(view: LabeledView, plan: ShardPlan, cfg: ExecConfig = ExecConfig()) -> GramAccumulator:
    _check_plan(plan, view.m)
    partials = _map(plan, lambda a, b: accumulate_shard(view.rows[a:b], view.signs[a:b], view.d), cfg)
    return reduce(merge, partials)


def run_training_job(view: LabeledView, plan: ShardPlan, mu: float, cfg: ExecConfig = ExecConfig()) -> SvmPlane:
    """Sharded accumulate, ordered merge, then one SPD solve."""
    if view.m == 0:
        raise DegenerateInputError("training view has no rows")
    return solve_plane(run_gram_job(view, plan, cfg), mu)


def _count(plane: SvmPlane, rows, signs) -> BinaryConfusion:
    if rows.shape[0] == 0:
        return BinaryConfusion()
    return BinaryConfusion.from_signs(signs, sign_of(rows @ plane.w - plane.gamma))


def run_confusion_job(plane: SvmPlane, view: LabeledView, plan: ShardPlan, cfg: ExecConfig = ExecConfig()) -> BinaryConfusion:
    if view.d != plane.dim:
        raise DimensionError(f"plane has {plane.dim} features, view has {view.d}")
    _check_plan(plan, view.m)
    partials = _map(plan, lambda a, b: _count(plane, view.rows[a:b], view.signs[a:b]), cfg)
    return reduce(lambda x, y: x + y, partials, BinaryConfusion())
