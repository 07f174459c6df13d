"""Flat-index bookkeeping for distance vectors.

Coordinates of an n-point space are stored lexicographically by pair:
(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n).  Point indices are 1-based at
the API surface; flat coordinate positions are 0-based.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Flat position of the pair (i, j) with 1 <= i < j <= n."""
    if not (isinstance(i, int) and isinstance(j, int)):
        raise ValueError("point indices must be integers")
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    return (i - 1) * (2 * n - i) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def pairs_of(n: int) -> tuple[tuple[int, int], ...]:
    """All pairs (i, j), 1 <= i < j <= n, in flat order."""
    return tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def triangle_triples(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index arrays (p, q, r) encoding every constraint x[p] <= x[q] + x[r].

    Three rotations per unordered point triple, in lexicographic triple
    order.  Arrays are read-only int64 of length 3 * C(n, 3).
    """
    ps: list[int] = []
    qs: list[int] = []
    rs: list[int] = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                ij = pair_index(i, j, n)
                ik = pair_index(i, k, n)
                jk = pair_index(j, k, n)
                ps += [ij, ik, jk]
                qs += [ik, ij, ij]
                rs += [jk, jk, ik]
    return (
        _frozen(np.asarray(ps, dtype=np.int64)),
        _frozen(np.asarray(qs, dtype=np.int64)),
        _frozen(np.asarray(rs, dtype=np.int64)),
    )


@lru_cache(maxsize=None)
def _triu(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu = np.triu_indices(n, k=1)
    return _frozen(iu[0].copy()), _frozen(iu[1].copy())


def vector_to_matrix(coords: np.ndarray, n: int) -> np.ndarray:
    """Symmetric (n, n) matrix with zero diagonal from flat coordinates."""
    rows, cols = _triu(n)
    mat = np.zeros((n, n), dtype=np.float64)
    mat[rows, cols] = coords
    mat[cols, rows] = coords
    return mat


def matrix_to_vector(mat: np.ndarray) -> np.ndarray:
    """Flat upper-triangular coordinates of a symmetric matrix."""
    n = mat.shape[0]
    rows, cols = _triu(n)
    return np.ascontiguousarray(mat[rows, cols], dtype=np.float64)


def batch_to_matrices(flat: np.ndarray, n: int) -> np.ndarray:
    """(B, C(n,2)) coordinate rows to a (B, n, n) stack of matrices."""
    rows, cols = _triu(n)
    b = flat.shape[0]
    mats = np.zeros((b, n, n), dtype=np.float64)
    mats[:, rows, cols] = flat
    mats[:, cols, rows] = flat
    return mats
