"""Linear proximal SVM.

Training reduces to a single SPD solve

    (I/mu + E^T E) z = E^T D e,    E = [A  -e],  z = (w, gamma)

so the only data-dependent quantities are the Gram statistics E^T E and
E^T D e. Those are additive over rows, which is what lets shards compute
them independently and a reducer add them up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateInputError, DimensionError, ParameterError

DEFAULT_MU = 1.0


@dataclass(frozen=True, eq=False)
class SvmPlane:
    """Separating plane x.w - gamma = 0 with the regularization it was trained at."""

    w: np.ndarray
    gamma: float
    mu: float

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64).reshape(-1)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "mu", float(self.mu))
        if not self.mu > 0:
            raise ParameterError(f"mu must be > 0, got {self.mu}")
        if not (np.all(np.isfinite(w)) and np.isfinite(self.gamma)):
            raise DegenerateInputError("plane coefficients are not finite")

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SvmPlane):
            return NotImplemented
        return (
            self.gamma == other.gamma
            and self.mu == other.mu
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GramAccumulator:
    """Partial E^T E / E^T D e sums over some set of rows.

    ``ete`` is kept exactly symmetric: it is built from its upper triangle
    and merges only add symmetric matrices.
    """

    ete: np.ndarray
    etde: np.ndarray
    row_count: int = 0
    dim: int = field(init=False)

    def __post_init__(self):
        ete = np.array(self.ete, dtype=np.float64)
        etde = np.array(self.etde, dtype=np.float64).reshape(-1)
        p = etde.shape[0]
        if p < 1 or ete.shape != (p, p):
            raise DimensionError(f"ete shape {ete.shape} does not match etde length {p}")
        ete.flags.writeable = False
        etde.flags.writeable = False
        object.__setattr__(self, "ete", ete)
        object.__setattr__(self, "etde", etde)
        object.__setattr__(self, "row_count", int(self.row_count))
        object.__setattr__(self, "dim", p - 1)

    @classmethod
    def zeros(cls, d: int) -> "GramAccumulator":
        return cls(np.zeros((d + 1, d + 1)), np.zeros(d + 1), 0)

    def __eq__(self, other):
        if not isinstance(other, GramAccumulator):
            return NotImplemented
        return (
            self.row_count == other.row_count
            and np.array_equal(self.ete, other.ete)
            and np.array_equal(self.etde, other.etde)
        )

    __hash__ = None


def _symmetrize(m):
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


def augment(rows: np.ndarray) -> np.ndarray:
    """Append the -1 column: E = [A  -e]."""
    rows = np.asarray(rows, dtype=np.float64)
    return np.hstack([rows, -np.ones((rows.shape[0], 1))])


def accumulate_shard(rows, signs, d: int) -> GramAccumulator:
    """Mapper: Gram statistics of one block of labeled rows."""
    rows = np.asarray(rows, dtype=np.float64)
    signs = np.asarray(signs)
    if rows.size == 0 and rows.ndim < 2:
        rows = rows.reshape(0, d)
    if rows.ndim != 2 or rows.shape[1] != d:
        raise DimensionError(f"rows have shape {rows.shape}, expected (m, {d})")
    if signs.shape != (rows.shape[0],):
        raise DimensionError(
            f"{signs.shape[0] if signs.ndim else 'scalar'} signs for {rows.shape[0]} rows"
        )
    if not np.all((signs == 1) | (signs == -1)):
        raise ParameterError("signs must be +1 or -1")
    if rows.shape[0] == 0:
        return GramAccumulator.zeros(d)
    e = augment(rows)
    ete = _symmetrize(e.T @ e)
    etde = e.T @ signs.astype(np.float64)
    return GramAccumulator(ete, etde, rows.shape[0])


def merge(a: GramAccumulator, b: GramAccumulator) -> GramAccumulator:
    """Reducer: add two partial accumulators."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot merge accumulators of dim {a.dim} and {b.dim}")
    return GramAccumulator(a.ete + b.ete, a.etde + b.etde, a.row_count + b.row_count)


def solve_plane(acc: GramAccumulator, mu: float = DEFAULT_MU) -> SvmPlane:
    if not (np.isfinite(mu) and mu > 0):
        raise ParameterError(f"mu must be > 0, got {mu}")
    if acc.row_count < 1:
        raise DegenerateInputError("cannot train a plane from zero rows")
    system = acc.ete + np.eye(acc.dim + 1) / mu
    z = cho_solve(cho_factor(system, lower=False, check_finite=False), acc.etde)
    return SvmPlane(z[:-1], z[-1], mu)


def _check_dim(plane: SvmPlane, x: np.ndarray):
    if x.shape[-1] != plane.dim:
        raise DimensionError(f"feature vector has {x.shape[-1]} entries, plane expects {plane.dim}")


def decision_value(plane: SvmPlane, x) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    _check_dim(plane, x)
    return float(x @ plane.w - plane.gamma)


def decision_values(plane: SvmPlane, rows) -> np.ndarray:
    """Vectorized decision_value over the rows of a matrix."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise DimensionError("expected a 2-D matrix of rows")
    _check_dim(plane, rows)
    return rows @ plane.w - plane.gamma


def sign_of(values):
    # sgn(0) is taken as +1
    return np.where(np.asarray(values) >= 0, 1, -1)


def classify_sign(plane: SvmPlane, x) -> int:
    return 1 if decision_value(plane, x) >= 0 else -1
