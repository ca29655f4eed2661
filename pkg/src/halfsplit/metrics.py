"""Confusion counts and the scores derived from them.

Binary confusions score a class bipartition (positive side = sign +1);
the multi-class confusion scores final predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UndefinedMetricError


@dataclass(frozen=True)
class BinaryConfusion:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "BinaryConfusion") -> "BinaryConfusion":
        return BinaryConfusion(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )

    def flipped(self) -> "BinaryConfusion":
        """Same predictions scored with the negative side as the positive class."""
        return BinaryConfusion(tp=self.tn, tn=self.tp, fp=self.fn, fn=self.fp)

    @classmethod
    def from_signs(cls, truth, predicted) -> "BinaryConfusion":
        truth = np.asarray(truth)
        predicted = np.asarray(predicted)
        pos_t, pos_p = truth > 0, predicted > 0
        return cls(
            tp=int(np.count_nonzero(pos_t & pos_p)),
            tn=int(np.count_nonzero(~pos_t & ~pos_p)),
            fp=int(np.count_nonzero(~pos_t & pos_p)),
            fn=int(np.count_nonzero(pos_t & ~pos_p)),
        )


def accuracy(c: BinaryConfusion) -> float:
    if c.total == 0:
        raise UndefinedMetricError("accuracy of an empty confusion matrix")
    return (c.tp + c.tn) / c.total


def _ratio(num, den):
    return num / den if den else 0.0


def precision_recall_f1(c: BinaryConfusion) -> tuple[float, float, float]:
    """Zero denominators give 0 rather than raising."""
    p = _ratio(c.tp, c.tp + c.fp)
    r = _ratio(c.tp, c.tp + c.fn)
    return p, r, _ratio(2 * p * r, p + r)


def f1_macro_from_split(c: BinaryConfusion) -> float:
    """Mean of the F1 scores obtained taking each side as the positive class.

    A bipartition has no natural positive side, so the score is symmetric
    under swapping the two.
    """
    return 0.5 * (precision_recall_f1(c)[2] + precision_recall_f1(c.flipped())[2])


SPLIT_METRICS = {
    "accuracy": accuracy,
    "f1": f1_macro_from_split,
    "f1_macro": f1_macro_from_split,
}


def split_metric(name: str):
    try:
        return SPLIT_METRICS[name]
    except KeyError:
        raise ParameterError(
            f"unknown selection metric {name!r}; choose from {sorted(SPLIT_METRICS)}"
        ) from None


class MulticlassConfusion:
    """n x n counts; entry (i, j) counts rows of true class i predicted as j."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(matrix < 0):
            raise ValueError("confusion counts must be nonnegative")
        self.matrix = matrix

    @classmethod
    def from_labels(cls, y_true, y_pred, n_classes: int) -> "MulticlassConfusion":
        y_true = np.asarray(y_true, dtype=np.int64)
        y_pred = np.asarray(y_pred, dtype=np.int64)
        flat = np.bincount(y_true * n_classes + y_pred, minlength=n_classes * n_classes)
        return cls(flat.reshape(n_classes, n_classes))

    @property
    def n_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    def per_class(self) -> list[tuple[float, float, float]]:
        """One-vs-rest (precision, recall, f1) for each class."""
        out = []
        total = self.total
        for k in range(self.n_classes):
            tp = int(self.matrix[k, k])
            fn = int(self.matrix[k].sum()) - tp
            fp = int(self.matrix[:, k].sum()) - tp
            out.append(precision_recall_f1(BinaryConfusion(tp, total - tp - fn - fp, fp, fn)))
        return out


def multiclass_accuracy(mc: MulticlassConfusion) -> float:
    if mc.total == 0:
        raise UndefinedMetricError("accuracy of an empty confusion matrix")
    return float(np.trace(mc.matrix)) / mc.total
