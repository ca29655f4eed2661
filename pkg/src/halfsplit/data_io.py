"""Datasets: loaders, splitting, scaling and synthetic generators."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, InputError, ParameterError, ParseError

log = logging.getLogger(__name__)


@dataclass(eq=False)
class Dataset:
    """Feature matrix with dense integer class ids 0..n-1.

    ``class_names[k]`` is the original label of class id ``k``. Subsets keep
    the full name table so ids stay comparable across splits.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim == 1 and self.features.size == 0:
            self.features = self.features.reshape(0, 0)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.features.ndim != 2:
            raise InputError("features must be a 2-D matrix")
        if self.labels.shape[0] != self.features.shape[0]:
            raise InputError(
                f"{self.labels.shape[0]} labels for {self.features.shape[0]} rows"
            )
        if not np.all(np.isfinite(self.features)):
            raise InputError("features contain NaN or infinite values")
        if not self.class_names:
            n = int(self.labels.max()) + 1 if self.labels.size else 0
            self.class_names = [str(k) for k in range(n)]
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= len(self.class_names)
        ):
            raise InputError("labels reference unknown class ids")

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def present_classes(self) -> list[int]:
        return [int(c) for c in np.unique(self.labels)]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, index) -> "Dataset":
        index = np.asarray(index)
        if index.dtype != bool:
            index = index.astype(np.int64)
        return Dataset(self.features[index], self.labels[index], list(self.class_names))

    def restrict(self, classes: Sequence[int]) -> "Dataset":
        """Rows whose class is in ``classes``, original order kept."""
        return self.subset(np.flatnonzero(np.isin(self.labels, list(classes))))

    def with_features(self, features) -> "Dataset":
        return Dataset(features, self.labels.copy(), list(self.class_names))


# ---------------------------------------------------------------- loaders


def _finite_float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: non-numeric value {cell!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def _dense_ids(raw_labels: list[str]) -> tuple[np.ndarray, list[str]]:
    names: dict[str, int] = {}
    ids = [names.setdefault(lab, len(names)) for lab in raw_labels]
    return np.array(ids, dtype=np.int64), list(names)


def load_csv(path, label_col: int | str = -1, delimiter: str = ",", header: bool = False) -> Dataset:
    """Read a delimited text file, one sample per line.

    ``label_col`` is a column index (negative counts from the end) or, with
    ``header=True``, a column name. Labels become class ids in order of
    first appearance.
    """
    with open(path, newline="") as fh:
        lines = [r for r in csv.reader(fh, delimiter=delimiter) if r and any(c.strip() for c in r)]
    if not lines:
        raise InputError(f"{path}: empty file")
    names = None
    if header:
        names, lines = [c.strip() for c in lines[0]], lines[1:]
    width = len(names) if names else len(lines[0])
    if isinstance(label_col, str) and not label_col.lstrip("-").isdigit():
        if names is None or label_col not in names:
            raise InputError(f"label column {label_col!r} not found in header")
        label_idx = names.index(label_col)
    else:
        label_idx = int(label_col)
    if not -width <= label_idx < width:
        raise InputError(f"label column {label_col} out of range for {width} columns")
    label_idx %= width
    if width < 2:
        raise InputError("need at least one feature column and a label column")

    feats, raw = [], []
    first_line = 2 if header else 1
    for i, row in enumerate(lines):
        lineno = i + first_line
        if len(row) != width:
            raise ParseError(f"row {lineno}: expected {width} columns, found {len(row)}")
        raw.append(row[label_idx].strip())
        feats.append(
            [_finite_float(c, lineno, j + 1) for j, c in enumerate(row) if j != label_idx]
        )
    labels, class_names = _dense_ids(raw)
    x = np.array(feats, dtype=np.float64).reshape(len(feats), width - 1)
    return Dataset(x, labels, class_names)


def write_csv(data: Dataset, path, delimiter: str = ",", header: bool = False) -> None:
    """Write features then label name, label last. repr() floats round-trip exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        if header:
            w.writerow([f"x{j}" for j in range(data.d)] + ["label"])
        for row, lab in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in row] + [data.class_names[lab]])


def load_libsvm(path) -> Dataset:
    """Sparse ``label idx:val ...`` lines (1-based, strictly ascending) to a dense Dataset."""
    raw, rows = [], []
    width = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            label, *pairs = line.split()
            entries = {}
            last = 0
            for tok in pairs:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise ParseError(f"line {lineno}: malformed entry {tok!r}")
                try:
                    idx = int(idx_s)
                except ValueError:
                    raise ParseError(f"line {lineno}: bad index {idx_s!r}") from None
                if idx <= last:
                    raise ParseError(f"line {lineno}: indices must be ascending and unique")
                last = idx
                entries[idx] = _finite_float(val_s, lineno, idx)
            width = max(width, last)
            raw.append(label)
            rows.append(entries)
    if not rows:
        raise InputError(f"{path}: empty file")
    x = np.zeros((len(rows), width))
    for i, entries in enumerate(rows):
        for idx, val in entries.items():
            x[i, idx - 1] = val
    labels, class_names = _dense_ids(raw)
    return Dataset(x, labels, class_names)


def load_iris() -> Dataset:
    """The 150-row Fisher Iris set bundled with the package."""
    ref = resources.files("halfsplit") / "data" / "iris.csv"
    with resources.as_file(ref) as p:
        return load_csv(p, label_col="species", header=True)


def iris_path() -> Path:
    return Path(str(resources.files("halfsplit") / "data" / "iris.csv"))


# ---------------------------------------------------------------- splitting


def stratified_split_indices(data: Dataset, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < fraction < 1:
        raise ParameterError(f"fraction must lie in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    train, held = [], []
    for c in range(data.n_classes):
        idx = np.flatnonzero(data.labels == c)
        if idx.size == 0:
            continue
        if idx.size < 2:
            raise InputError(f"class {data.class_names[c]!r} has {idx.size} row; need at least 2")
        k = math.ceil(fraction * idx.size)
        if k > idx.size - 1:
            log.warning(
                "class %r: held-out fraction %.3g leaves no training rows; keeping 1",
                data.class_names[c], fraction,
            )
            k = idx.size - 1
        perm = rng.permutation(idx)
        held.append(perm[:k])
        train.append(perm[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(held))


def stratified_split(data: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Per class, hold out ceil(fraction * count) rows chosen by a seeded shuffle."""
    tr, ho = stratified_split_indices(data, fraction, seed)
    return data.subset(tr), data.subset(ho)


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    def transform(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {"mean": [float(v) for v in self.mean], "scale": [float(v) for v in self.scale]}

    @classmethod
    def from_dict(cls, d: dict) -> "Standardizer":
        return cls(np.array(d["mean"], dtype=np.float64), np.array(d["scale"], dtype=np.float64))


def fit_standardizer(data: Dataset) -> Standardizer:
    if data.m == 0:
        raise InputError("cannot fit a standardizer on zero rows")
    mean = data.features.mean(axis=0)
    std = data.features.std(axis=0)
    # constant features would divide by zero
    std[std == 0] = 1.0
    return Standardizer(mean, std)


def apply_standardizer(std: Standardizer, data: Dataset) -> Dataset:
    if data.d != std.mean.shape[0]:
        raise DimensionError(f"standardizer fitted on {std.mean.shape[0]} features, data has {data.d}")
    return data.with_features(std.transform(data.features))


# ---------------------------------------------------------------- synthetic data


@dataclass
class SyntheticSpec:
    """Gaussian clouds around deterministic centers.

    Give either ``counts`` (rows per class) or ``proportions`` with ``total``.
    ``scheme`` is "corners" (vertices of the cube [-scale, scale]^d, needs
    2**d >= n) or "simplex" (scale * e_k, plus the origin when n = d + 1).
    """

    n_classes: int
    d: int
    counts: list[int] | None = None
    proportions: list[float] | None = None
    total: int | None = None
    scheme: str = "corners"
    scale: float = 5.0
    sigma: float = 1.0
    seed: int = 0

    def resolved_counts(self) -> list[int]:
        if self.counts is not None:
            counts = [int(c) for c in self.counts]
        elif self.proportions is not None and self.total is not None:
            counts = proportional_counts(self.proportions, self.total)
        elif self.total is not None:
            counts = proportional_counts([1.0] * self.n_classes, self.total)
        else:
            raise ParameterError("synthetic spec needs counts, or a total (with optional proportions)")
        if len(counts) != self.n_classes:
            raise ParameterError(f"{len(counts)} class counts for {self.n_classes} classes")
        return counts


def proportional_counts(proportions: Sequence[float], total: int) -> list[int]:
    """Largest-remainder rounding of ``total`` by ``proportions``; ties go to lower ids."""
    p = np.asarray(proportions, dtype=np.float64)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or p.sum() <= 0:
        raise ParameterError("proportions must be nonnegative with a positive sum")
    exact = p / p.sum() * total
    base = np.floor(exact).astype(int)
    short = total - int(base.sum())
    order = sorted(range(p.size), key=lambda k: (-(exact[k] - base[k]), k))
    for k in order[:short]:
        base[k] += 1
    return [int(v) for v in base]


def class_centers(n: int, d: int, scheme: str, scale: float) -> np.ndarray:
    if scheme == "corners":
        if n > 2**d:
            raise ParameterError(f"{n} classes do not fit on the corners of a {d}-cube")
        bits = (np.arange(n)[:, None] >> np.arange(d)[None, :]) & 1
        return np.where(bits == 1, scale, -scale).astype(np.float64)
    if scheme == "simplex":
        if d < n - 1:
            raise ParameterError(f"simplex scheme needs d >= n - 1 (n={n}, d={d})")
        centers = np.zeros((n, d))
        for k in range(min(n, d)):
            centers[k, k] = scale
        return centers
    raise ParameterError(f"unknown center scheme {scheme!r}")


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    if spec.n_classes < 2 or spec.d < 1:
        raise ParameterError("need at least 2 classes and 1 feature")
    if spec.sigma < 0:
        raise ParameterError("sigma must be >= 0")
    counts = spec.resolved_counts()
    if min(counts) < 2:
        raise ParameterError("every class needs at least 2 rows")
    centers = class_centers(spec.n_classes, spec.d, spec.scheme, spec.scale)
    rng = np.random.default_rng(spec.seed)
    labels = np.repeat(np.arange(spec.n_classes), counts)
    x = centers[labels] + spec.sigma * rng.standard_normal((labels.size, spec.d))
    perm = rng.permutation(labels.size)
    return Dataset(x[perm], labels[perm], [f"c{k}" for k in range(spec.n_classes)])
