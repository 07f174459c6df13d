"""Finite metric spaces, distance vectors, and membership predicates.

A candidate space on n points is a point of [0,1]^C(n,2): the flat
``DistanceVector``.  Vectors satisfying every closed triangle inequality are
the metric ones; a validated space with a full symmetric matrix is a
``FiniteMetricSpace``.  Triangle equality and zero off-diagonal distances are
admitted (membership is decided on the closed region), but zero off-diagonal
pairs are flagged by the validators since they sit on the degenerate
boundary.

Point indices are 1-based everywhere in this API; flat coordinate positions
are 0-based.
"""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidSpaceError
from .indexing import (
    matrix_to_vector,
    n_pairs,
    pair_index,
    pairs_of,
    triangle_triples,
    vector_to_matrix,
)

__all__ = [
    "DistanceVector",
    "FiniteMetricSpace",
    "OnePointExtension",
    "is_metric",
    "in_class_C",
    "in_D_n",
    "conf",
    "first_violated_triple",
    "validate_matrix",
    "load_space",
    "save_space",
    "space_to_dict",
    "space_from_dict",
]


def _as_coords(values, n: int) -> np.ndarray:
    coords = np.ascontiguousarray(values, dtype=np.float64)
    if coords.ndim != 1 or coords.shape[0] != n_pairs(n):
        raise InvalidSpaceError(
            f"expected {n_pairs(n)} coordinates for n={n}, got shape {coords.shape}"
        )
    if coords.size and (coords.min() < 0.0 or coords.max() > 1.0):
        bad = int(np.argmax((coords < 0.0) | (coords > 1.0)))
        i, j = pairs_of(n)[bad]
        raise InvalidSpaceError(
            f"coordinate d({i},{j}) = {coords[bad]!r} outside [0,1]"
        )
    coords.flags.writeable = False
    return coords


@dataclass(frozen=True, eq=False)
class DistanceVector:
    """A point of [0,1]^C(n,2): raw coordinates of a candidate metric space.

    Not necessarily metric; use :func:`is_metric` / :func:`in_D_n` for
    membership tests.
    """

    n: int
    coords: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpaceError("n must be a positive integer")
        object.__setattr__(self, "coords", _as_coords(self.coords, self.n))

    def distance(self, i: int, j: int) -> float:
        """Coordinate d(i, j); zero on the diagonal."""
        if i == j:
            return 0.0
        lo, hi = (i, j) if i < j else (j, i)
        return float(self.coords[pair_index(lo, hi, self.n)])

    def to_space(self) -> "FiniteMetricSpace":
        """Validated space with the same distances (requires metricity)."""
        return FiniteMetricSpace(self.n, vector_to_matrix(self.coords, self.n))


def first_violated_triple(coords: np.ndarray, n: int, tol: float = 0.0):
    """First (i, j, k) in lexicographic order violating the triangle
    inequality beyond ``tol``, or None.  The violated inequality is
    d(a,b) > d(a,c) + d(c,b) + tol for some labeling of the triple."""
    p, q, r = triangle_triples(n)
    if len(p) == 0:
        return None
    bad = coords[p] > coords[q] + coords[r] + tol
    if not bad.any():
        return None
    t = int(np.argmax(bad)) // 3
    triples = [
        (i, j, k)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for k in range(j + 1, n + 1)
    ]
    return triples[t]


def is_metric(d: DistanceVector | np.ndarray, tol: float = 0.0, *, n: int | None = None) -> bool:
    """Whether every triangle inequality holds up to slack ``tol`` (closed:
    equality counts as metric)."""
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    if isinstance(d, DistanceVector):
        coords, n = d.coords, d.n
    else:
        if n is None:
            raise ValueError("n is required when passing raw coordinates")
        coords = np.asarray(d, dtype=np.float64)
    p, q, r = triangle_triples(n)
    if len(p) == 0:
        return True
    return bool(np.all(coords[p] <= coords[q] + coords[r] + tol))


def validate_matrix(mat: np.ndarray) -> list[str]:
    """Diagnostics for a candidate distance matrix; empty means valid.

    Zero off-diagonal entries are admitted but reported, since they lie on
    the degenerate (pseudometric) boundary.
    """
    notes: list[str] = []
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return [f"matrix must be square, got shape {mat.shape}"]
    n = mat.shape[0]
    if np.any(np.diag(mat) != 0.0):
        i = int(np.argmax(np.diag(mat) != 0.0)) + 1
        notes.append(f"nonzero diagonal at point {i}: {mat[i - 1, i - 1]!r}")
    if not np.array_equal(mat, mat.T):
        idx = np.argwhere(mat != mat.T)[0]
        notes.append(f"asymmetry at ({idx[0] + 1},{idx[1] + 1})")
    if np.any(mat < 0.0) or np.any(mat > 1.0):
        idx = np.argwhere((mat < 0.0) | (mat > 1.0))[0]
        notes.append(
            f"entry d({idx[0] + 1},{idx[1] + 1}) = {mat[idx[0], idx[1]]!r} outside [0,1]"
        )
    if notes:
        return notes
    coords = matrix_to_vector(mat)
    triple = first_violated_triple(coords, n)
    if triple is not None:
        i, j, k = triple
        notes.append(
            "triangle inequality violated at triple "
            f"({i},{j},{k}): distances d({i},{j})={mat[i-1,j-1]!r}, "
            f"d({i},{k})={mat[i-1,k-1]!r}, d({j},{k})={mat[j-1,k-1]!r}"
        )
    # boundary flags, not errors
    zero = [
        (i, j) for (i, j) in pairs_of(n) if mat[i - 1, j - 1] == 0.0
    ]
    if zero and not notes:
        warnings.warn(
            f"zero off-diagonal distance at pairs {zero}: degenerate boundary of "
            "the metric region",
            stacklevel=2,
        )
    return notes


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Validated point set with a symmetric distance matrix in [0,1].

    Immutable after construction; all operations on it are pure.
    """

    n: int
    dist: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.dist, dtype=np.float64)
        if self.n < 1 or mat.shape != (self.n, self.n):
            raise InvalidSpaceError(
                f"expected a ({self.n},{self.n}) matrix, got shape {mat.shape}"
            )
        notes = validate_matrix(mat)
        if notes:
            raise InvalidSpaceError(notes[0])
        mat.flags.writeable = False
        object.__setattr__(self, "dist", mat)

    @classmethod
    def from_coords(cls, coords, n: int) -> "FiniteMetricSpace":
        return cls(n, vector_to_matrix(np.asarray(coords, dtype=np.float64), n))

    def distance(self, i: int, j: int) -> float:
        """d(i, j) with 1-based point indices."""
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"point index out of range for n={self.n}")
        return float(self.dist[i - 1, j - 1])

    def to_vector(self) -> DistanceVector:
        return DistanceVector(self.n, matrix_to_vector(self.dist))


def in_class_C(space: FiniteMetricSpace) -> bool:
    """True when every off-diagonal distance lies in [1/2, 1]."""
    if space.n == 1:
        return True
    coords = matrix_to_vector(space.dist)
    return bool(coords.min() >= 0.5)


def in_D_n(d: DistanceVector, delta: float) -> bool:
    """Metric and all coordinates at least 1/2 - delta.

    ``delta`` must lie in (0, 1/2]; 1/2 is admitted as the degenerate cap
    where the coordinate condition is vacuous.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta!r}")
    if not is_metric(d):
        return False
    if d.coords.size == 0:
        return True
    return bool(d.coords.min() >= 0.5 - delta)


def conf(x: FiniteMetricSpace, z: FiniteMetricSpace, v: Sequence[int]) -> float:
    """Configuration distance of the tuple ``v`` (1-based indices into ``z``,
    repeats allowed) against the template ``x``.

    Max over pairs i < j of |d_x(i,j) - d_z(v_i,v_j)|; zero for templates
    with at most one point (empty-max convention).
    """
    if len(v) != x.n:
        raise ValueError(f"tuple length {len(v)} does not match |X| = {x.n}")
    for idx in v:
        if not 1 <= idx <= z.n:
            raise ValueError(f"tuple entry {idx} out of range for n={z.n}")
    best = 0.0
    for i in range(x.n):
        for j in range(i + 1, x.n):
            gap = abs(x.dist[i, j] - z.dist[v[i] - 1, v[j] - 1])
            if gap > best:
                best = gap
    return float(best)


@dataclass(frozen=True, eq=False)
class OnePointExtension:
    """A template pair: ``extension`` adds one point to ``base``.

    Both spaces must lie in class C (off-diagonal distances in [1/2, 1]) and
    the extension restricted to the first |base| points must equal the base
    coordinatewise.  The extra point is index |base| + 1.
    """

    base: FiniteMetricSpace
    extension: FiniteMetricSpace

    def __post_init__(self):
        k = self.base.n
        if self.extension.n != k + 1:
            raise InvalidSpaceError(
                f"extension must have {k + 1} points, got {self.extension.n}"
            )
        if not np.array_equal(self.extension.dist[:k, :k], self.base.dist):
            raise InvalidSpaceError("extension does not restrict to the base space")
        if not in_class_C(self.base) or not in_class_C(self.extension):
            raise InvalidSpaceError(
                "one-point extension templates must have all distances in [1/2, 1]"
            )

    @property
    def new_point_distances(self) -> np.ndarray:
        """Distances from the base points to the extension point."""
        return self.extension.dist[: self.base.n, self.base.n]


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def space_to_dict(space: FiniteMetricSpace) -> dict:
    return {"n": space.n, "d": [float(c) for c in matrix_to_vector(space.dist)]}


def space_from_dict(doc: dict) -> FiniteMetricSpace:
    try:
        n = int(doc["n"])
        coords = doc["d"]
    except (KeyError, TypeError) as exc:
        raise InvalidSpaceError(f"space document must have 'n' and 'd': {exc}")
    return FiniteMetricSpace.from_coords(np.asarray(coords, dtype=np.float64), n)


def save_space(space: FiniteMetricSpace, path: str | Path) -> None:
    """Write a space file; .json gets {"n":..., "d":[...]}, .csv a full
    symmetric matrix with zero diagonal."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in space.dist:
                writer.writerow([repr(float(x)) for x in row])
    else:
        path.write_text(json.dumps(space_to_dict(space)) + "\n")


def load_space(path: str | Path) -> FiniteMetricSpace:
    """Read and validate a space file (.json or .csv by extension).

    Invalid inputs are rejected with a diagnostic naming the first violated
    constraint (for triangle failures, the first violating triple).
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="") as fh:
            rows = [[float(cell) for cell in row] for row in csv.reader(fh) if row]
        mat = np.asarray(rows, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidSpaceError(
                f"{path}: CSV matrix must be square, got shape {mat.shape}"
            )
        return FiniteMetricSpace(mat.shape[0], mat)
    doc = json.loads(path.read_text())
    return space_from_dict(doc)
