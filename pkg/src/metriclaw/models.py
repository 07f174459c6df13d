"""Builders for finite spaces that approximately satisfy extension-axiom
families, family enumeration over distance grids, and sentence-value
estimation on built spaces.

Any assignment of pairwise distances taking values in [1/2, 1] automatically
satisfies the triangle inequality, so both builders below always return valid
class-C spaces.  The circulant construction gives deterministic exact-zero
witnesses for single-point grid axioms; the i.i.d.-uniform construction is
probabilistically saturated for tuple axioms as the size grows.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .logic import AxiomTask, Formula, build_phi_geq_half, eval_formula
from .sampling import generator
from .spaces import FiniteMetricSpace, OnePointExtension, space_from_dict, space_to_dict

__all__ = [
    "GridSpec",
    "AxiomFamily",
    "VerificationReport",
    "SigmaEstimate",
    "build_circulant",
    "build_random_class_C",
    "build_random_grid",
    "enumerate_grid_tasks",
    "verify_axioms",
    "task_value",
    "estimate_sigma_AS",
    "tasks_to_jsonable",
    "tasks_from_jsonable",
    "load_tasks",
    "save_tasks",
]


@dataclass(frozen=True)
class GridSpec:
    """Arithmetic distance grid {1/2, 1/2+step, ..., 1}, last value clamped to 1."""

    step: float

    def __post_init__(self):
        if not 0.0 < self.step <= 0.5:
            raise ValueError(f"step must lie in (0, 1/2], got {self.step!r}")

    @property
    def values(self) -> tuple[float, ...]:
        vals = []
        v = 0.5
        while v < 1.0 - 1e-12:
            vals.append(round(v, 12))
            v += self.step
        vals.append(1.0)
        return tuple(vals)


@dataclass(frozen=True)
class AxiomFamily:
    """A finite batch of extension axioms, with a human-readable label."""

    tasks: tuple[AxiomTask, ...]
    description: str = ""


def build_circulant(n_points: int, ring_values) -> FiniteMetricSpace:
    """Circulant space: d(i, j) = ring_values[min(|i-j|, N-|i-j|)] with
    1-based ring classes.

    ``ring_values`` must hold floor(N/2) reals in [1/2, 1].  Every point sees
    every ring value, so when the ring covers a grid, each single-point grid
    axiom is satisfied exactly.
    """
    ring = [float(v) for v in ring_values]
    if len(ring) != n_points // 2:
        raise ValueError(
            f"need floor(N/2) = {n_points // 2} ring values, got {len(ring)}"
        )
    for v in ring:
        if not 0.5 <= v <= 1.0:
            raise ValueError(f"ring value {v!r} outside [1/2, 1]")
    mat = np.zeros((n_points, n_points), dtype=np.float64)
    for i in range(n_points):
        for j in range(i + 1, n_points):
            cls = min(j - i, n_points - (j - i))
            mat[i, j] = mat[j, i] = ring[cls - 1]
    return FiniteMetricSpace(n_points, mat)


def build_random_class_C(n_points: int, rng: np.random.Generator) -> FiniteMetricSpace:
    """Space with off-diagonal distances i.i.d. uniform on [1/2, 1]."""
    if n_points < 1:
        raise ValueError("need at least one point")
    mat = np.zeros((n_points, n_points), dtype=np.float64)
    iu = np.triu_indices(n_points, k=1)
    draws = 0.5 + rng.random(len(iu[0])) * 0.5
    mat[iu] = draws
    mat[iu[1], iu[0]] = draws
    return FiniteMetricSpace(n_points, mat)


def build_random_grid(
    n_points: int, values, rng: np.random.Generator
) -> FiniteMetricSpace:
    """Space with off-diagonal distances drawn uniformly from a finite set of
    grid values in [1/2, 1]; used to exercise exact-witness behavior."""
    vals = np.asarray([float(v) for v in values], dtype=np.float64)
    if vals.min() < 0.5 or vals.max() > 1.0:
        raise ValueError("grid values must lie in [1/2, 1]")
    mat = np.zeros((n_points, n_points), dtype=np.float64)
    iu = np.triu_indices(n_points, k=1)
    draws = vals[rng.integers(0, len(vals), size=len(iu[0]))]
    mat[iu] = draws
    mat[iu[1], iu[0]] = draws
    return FiniteMetricSpace(n_points, mat)


def _grid_space(dists: dict[tuple[int, int], float], k: int) -> FiniteMetricSpace:
    mat = np.zeros((k, k), dtype=np.float64)
    for (i, j), v in dists.items():
        mat[i, j] = mat[j, i] = v
    return FiniteMetricSpace(k, mat)


def enumerate_grid_tasks(
    grid: GridSpec, k_max: int, epsilon: float, *, max_tasks: int = 100_000
) -> AxiomFamily:
    """All extension axioms X below Y where X ranges over grid-distance
    templates with at most k_max points and Y extends X by one point with
    grid distances.

    Templates are deduplicated up to relabeling for |X| <= 2 (sorted distance
    multisets); larger templates are enumerated as raw assignments.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    vals = grid.values
    g = len(vals)
    projected = sum(
        (1 if k == 1 else (g if k == 2 else g ** (k * (k - 1) // 2))) * g**k
        for k in range(1, k_max + 1)
    )
    if projected > max_tasks:
        raise ValueError(
            f"grid family of about {projected} tasks exceeds the budget {max_tasks}"
        )
    tasks: list[AxiomTask] = []
    for k in range(1, k_max + 1):
        if k == 1:
            bases = [_grid_space({}, 1)]
        elif k == 2:
            bases = [_grid_space({(0, 1): v}, 2) for v in vals]
        else:
            pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
            bases = [
                _grid_space(dict(zip(pairs, combo)), k)
                for combo in itertools.product(vals, repeat=len(pairs))
            ]
        for base in bases:
            for new_dists in itertools.product(vals, repeat=k):
                ext_mat = np.zeros((k + 1, k + 1), dtype=np.float64)
                ext_mat[:k, :k] = base.dist
                ext_mat[:k, k] = new_dists
                ext_mat[k, :k] = new_dists
                ext = OnePointExtension(base, FiniteMetricSpace(k + 1, ext_mat))
                tasks.append(AxiomTask(ext, epsilon))
    return AxiomFamily(
        tuple(tasks),
        f"grid step {grid.step}, k_max {k_max}, epsilon {epsilon} "
        f"({len(tasks)} tasks)",
    )


def _task_kernel_args(task: AxiomTask):
    base = task.ext.base
    return (
        np.ascontiguousarray(base.dist),
        np.ascontiguousarray(task.ext.new_point_distances),
        task.epsilon,
    )


def task_values_on_matrices(mats: np.ndarray, task: AxiomTask) -> np.ndarray:
    """Extension-axiom sentence values on a (B, n, n) stack of distance
    matrices; exact (same arithmetic as the formula evaluator)."""
    xd, yc, eps = _task_kernel_args(task)
    return kernels.axiom_values(mats, xd, yc, eps)


def task_value(space: FiniteMetricSpace, task: AxiomTask) -> float:
    """Exact value of one extension axiom on one space."""
    mats = np.ascontiguousarray(space.dist)[None, :, :]
    return float(task_values_on_matrices(mats, task)[0])


@dataclass
class VerificationReport:
    """Axiom-family evaluation on one space; max value 0 means the family is
    satisfied exactly."""

    max_value: float
    values: list[float]
    family: AxiomFamily

    def to_jsonable(self) -> dict:
        rows = []
        for task, value in zip(self.family.tasks, self.values):
            rows.append(
                {
                    "k": task.ext.base.n,
                    "epsilon": task.epsilon,
                    "new_point_distances": [
                        float(v) for v in task.ext.new_point_distances
                    ],
                    "value": value,
                }
            )
        return {
            "description": self.family.description,
            "max_value": self.max_value,
            "tasks": rows,
        }


def verify_axioms(space: FiniteMetricSpace, family: AxiomFamily) -> VerificationReport:
    """Evaluate every task sentence exactly on ``space``."""
    mats = np.ascontiguousarray(space.dist)[None, :, :]
    values = [float(task_values_on_matrices(mats, t)[0]) for t in family.tasks]
    return VerificationReport(max(values) if values else 0.0, values, family)


@dataclass
class SigmaEstimate:
    """Sentence values across built spaces; the last-size mean is the point
    estimate and the spread columns let callers judge stability (no
    convergence is claimed)."""

    rows: list[dict]
    point_estimate: float


def estimate_sigma_AS(
    sigma: Formula,
    sizes: list[int],
    seeds: list[int],
    builder: str = "random",
    ring_pattern=None,
) -> SigmaEstimate:
    """Evaluate ``sigma`` on built spaces for each (size, seed).

    ``builder`` is "random" (i.i.d. class-C) or "circulant" (ring pattern
    tiled out to floor(N/2) values; defaults to the quarter grid).
    """
    if builder not in ("random", "circulant"):
        raise ValueError("builder must be 'random' or 'circulant'")
    phi = build_phi_geq_half()
    rows = []
    for size in sizes:
        vals = []
        for seed in seeds:
            if builder == "random":
                space = build_random_class_C(size, generator(seed, size))
            else:
                pattern = list(ring_pattern or (0.5, 0.75, 1.0))
                reps = (size // 2 + len(pattern) - 1) // len(pattern)
                ring = (pattern * max(1, reps))[: size // 2]
                space = build_circulant(size, ring)
            if sigma == phi:
                vals.append(float(kernels.phi_half_values(
                    space.to_vector().coords[None, :])[0]))
            else:
                vals.append(eval_formula(sigma, space))
        arr = np.asarray(vals)
        rows.append(
            {
                "size": size,
                "mean": float(arr.mean()),
                "std": float(arr.std()),
                "min": float(arr.min()),
                "max": float(arr.max()),
                "values": vals,
            }
        )
    return SigmaEstimate(rows, rows[-1]["mean"])


# ---------------------------------------------------------------------------
# task (de)serialization
# ---------------------------------------------------------------------------

def tasks_to_jsonable(family: AxiomFamily) -> dict:
    return {
        "description": family.description,
        "tasks": [
            {
                "epsilon": t.epsilon,
                "base": space_to_dict(t.ext.base),
                "extension": space_to_dict(t.ext.extension),
            }
            for t in family.tasks
        ],
    }


def tasks_from_jsonable(doc: dict) -> AxiomFamily:
    tasks = []
    for row in doc["tasks"]:
        ext = OnePointExtension(
            space_from_dict(row["base"]), space_from_dict(row["extension"])
        )
        tasks.append(AxiomTask(ext, float(row["epsilon"])))
    return AxiomFamily(tuple(tasks), doc.get("description", ""))


def save_tasks(family: AxiomFamily, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tasks_to_jsonable(family), indent=1) + "\n")


def load_tasks(path: str | Path) -> AxiomFamily:
    return tasks_from_jsonable(json.loads(Path(path).read_text()))
