"""Seeded random generation on the metric polytope and its subregions.

The cube sampler realizes Lebesgue measure on [0,1]^C(n,2); conditioning on
the triangle inequalities (by rejection) realizes the uniform law on the
metric region, and rejection from the box [1/2-delta, 1]^C(n,2) realizes the
uniform law on the concentrated region where every distance is at least
1/2 - delta.  For sizes where rejection from the cube is hopeless, a
hit-and-run chain gives approximately uniform metric samples.

Randomness is counter-based (Philox) with substreams derived from
(seed, spawn_key...), so every sampler is a pure function of its seed and
trial index and trials can be partitioned across workers deterministically.
Kernel backends are bit-compatible, so outputs do not depend on whether the
compiled core is in use.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import RejectionBudgetError, ResourceLimitError
from .indexing import n_pairs, pair_index, triangle_triples
from .spaces import DistanceVector

__all__ = [
    "DeltaSchedule",
    "SamplerConfig",
    "generator",
    "sample_cube",
    "sample_M_n_rejection",
    "sample_M_n_hitandrun",
    "sample_D_n",
    "sample_S_like",
    "hit_and_run_chain",
    "metric_fraction",
    "rejection_batch",
    "DEFAULT_REJECTION_BUDGET",
]

DEFAULT_REJECTION_BUDGET = 10_000_000
_BATCH = 4096
_HAR_BLOCK = 4096
_HAR_MAX_RETRIES = 1000


def generator(seed: int, *spawn_key: int) -> np.random.Generator:
    """Philox generator for the substream identified by (seed, spawn_key)."""
    ss = np.random.SeedSequence(
        entropy=int(seed), spawn_key=tuple(int(s) for s in spawn_key)
    )
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class DeltaSchedule:
    """Concentration threshold schedule delta(n) = min(cap, scale * n**-exponent).

    Positive, strictly below 1/2, nonincreasing in n, and tending to zero.
    """

    scale: float = 1.0
    exponent: float = 1.0 / 3.0
    cap: float = 0.49

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if not 0.0 < self.exponent <= 1.0:
            raise ValueError("exponent must lie in (0, 1]")
        if not 0.0 < self.cap < 0.5:
            raise ValueError("cap must lie in (0, 1/2)")

    def delta_at(self, n: int) -> float:
        if n < 1:
            raise ValueError("n must be at least 1")
        return min(self.cap, self.scale * float(n) ** -self.exponent)


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler settings; burn_in/thinning apply only to hit-and-run.

    ``burn_in`` defaults to 50 * C(n,2) and ``thinning`` to C(n,2) when left
    as None (dimension-proportional mixing heuristic).
    """

    seed: int = 0
    method: str = "cube-rejection"
    burn_in: int | None = None
    thinning: int | None = None
    max_rejections: int = DEFAULT_REJECTION_BUDGET

    _METHODS = ("cube-rejection", "box-rejection", "hit-and-run")

    def __post_init__(self):
        if self.method not in self._METHODS:
            raise ValueError(f"method must be one of {self._METHODS}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        if self.thinning is not None and self.thinning < 1:
            raise ValueError("thinning must be positive")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be positive")

    def resolved_burn_in(self, n: int) -> int:
        return 50 * n_pairs(n) if self.burn_in is None else self.burn_in

    def resolved_thinning(self, n: int) -> int:
        return max(1, n_pairs(n)) if self.thinning is None else self.thinning


def sample_cube(n: int, rng: np.random.Generator) -> DistanceVector:
    """One uniform draw from [0,1]^C(n,2)."""
    if n < 2:
        raise ValueError("cube sampling needs n >= 2")
    return DistanceVector(n, rng.random(n_pairs(n)))


def metric_fraction(n: int, draws: int, rng: np.random.Generator) -> float:
    """Fraction of ``draws`` uniform cube points that are metric.

    Estimates the acceptance rate of cube rejection, i.e. the volume of the
    metric region relative to the cube.
    """
    p, q, r = triangle_triples(n)
    m = n_pairs(n)
    accepted = 0
    done = 0
    while done < draws:
        take = min(_BATCH * 16, draws - done)
        batch = rng.random((take, m))
        accepted += int(kernels.triangle_mask(batch, p, q, r, 0.0).sum())
        done += take
    return accepted / draws


def rejection_batch(
    n: int,
    count: int,
    rng: np.random.Generator,
    *,
    lo: float = 0.0,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[np.ndarray, int]:
    """``count`` uniform metric samples from the box [lo, 1]^C(n,2).

    Candidates are drawn in fixed-size batches and accepted in draw order, so
    the output is a deterministic function of the generator state.  Returns
    (rows, attempts) where attempts counts candidates examined up to and
    including the last accepted one.
    """
    if n < 2:
        raise ValueError("rejection sampling needs n >= 2")
    if not 0.0 <= lo < 1.0:
        raise ValueError("lo must lie in [0, 1)")
    m = n_pairs(n)
    p, q, r = triangle_triples(n)
    out = np.empty((count, m), dtype=np.float64)
    have = 0
    attempts = 0
    while have < count:
        take = min(_BATCH, max_rejections - attempts)
        if take <= 0:
            raise RejectionBudgetError(
                f"rejection budget exhausted for n={n}: "
                f"{max_rejections} attempts, {have}/{count} accepted"
            )
        batch = rng.random((take, m))
        if lo != 0.0:
            batch = lo + batch * (1.0 - lo)
        mask = kernels.triangle_mask(batch, p, q, r, 0.0).view(bool)
        hits = np.flatnonzero(mask)
        need = count - have
        if len(hits) >= need:
            out[have : have + need] = batch[hits[:need]]
            attempts += int(hits[need - 1]) + 1
            have = count
        else:
            out[have : have + len(hits)] = batch[hits]
            have += len(hits)
            attempts += take
    return out, attempts


def sample_M_n_rejection(
    n: int,
    rng: np.random.Generator,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[DistanceVector, int]:
    """One exactly-uniform metric sample by cube rejection, plus the attempt
    count (for acceptance-rate estimation)."""
    rows, attempts = rejection_batch(n, 1, rng, lo=0.0, max_rejections=max_rejections)
    return DistanceVector(n, rows[0]), attempts


def sample_D_n(
    n: int,
    delta: float,
    rng: np.random.Generator,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[DistanceVector, int]:
    """One exactly-uniform sample of the concentrated region: uniform on the
    box [1/2-delta, 1]^C(n,2) rejected on the triangle inequality."""
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta!r}")
    rows, attempts = rejection_batch(
        n, 1, rng, lo=0.5 - delta, max_rejections=max_rejections
    )
    return DistanceVector(n, rows[0]), attempts


def _s_like_positions(k: int, n: int):
    first = [pair_index(i, j, n) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    cross = [pair_index(i, j, n) for i in range(1, k + 1) for j in range(k + 1, n + 1)]
    tail = [pair_index(i, j, n) for i in range(k + 1, n + 1) for j in range(i + 1, n + 1)]
    return np.asarray(first, np.int64), np.asarray(cross, np.int64), np.asarray(tail, np.int64)


def sample_S_like(
    k: int,
    n: int,
    delta: float,
    rng: np.random.Generator,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> tuple[DistanceVector, int]:
    """One draw from the proof-shaped product region.

    First-block pairs (both points among the first k) are uniform on [1/2,1];
    cross pairs uniform on [1/2+delta, 1]; the trailing block over the last
    n-k points is uniform on its own box [1/2-delta, 1] rejected on the
    triangle inequality.  The output always lies in the concentrated region
    (cross and first blocks cannot create a triangle violation).
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta!r}")
    first_pos, cross_pos, tail_pos = _s_like_positions(k, n)
    out = np.empty(n_pairs(n), dtype=np.float64)
    u = rng.random(len(first_pos))
    out[first_pos] = 0.5 + u * 0.5
    u = rng.random(len(cross_pos))
    out[cross_pos] = (0.5 + delta) + u * (0.5 - delta)
    attempts = 0
    t = n - k
    if t >= 2:
        rows, attempts = rejection_batch(
            t, 1, rng, lo=0.5 - delta, max_rejections=max_rejections
        )
        out[tail_pos] = rows[0]
    return DistanceVector(n, out), attempts


def hit_and_run_chain(
    n: int,
    cfg: SamplerConfig,
    rng: np.random.Generator,
    count: int,
) -> tuple[np.ndarray, int]:
    """``count`` approximately-uniform metric samples from one hit-and-run
    chain started at the interior point with all coordinates 0.6.

    Discards ``burn_in`` accepted steps, then emits every ``thinning``-th
    state.  Chord attempts that come out numerically empty are retried with
    a fresh direction and counted; more than a fixed retry allowance raises
    a resource error.  Returns (rows, retries).
    """
    if n < 2:
        raise ValueError("hit-and-run needs n >= 2")
    m = n_pairs(n)
    p, q, r = triangle_triples(n)
    burn = cfg.resolved_burn_in(n)
    thin = cfg.resolved_thinning(n)
    needed = burn + thin * count
    x = np.full(m, 0.6)
    valid_states: list[np.ndarray] = []
    have = 0
    retries = 0
    while have < needed:
        dirs = rng.standard_normal((_HAR_BLOCK, m))
        unifs = rng.random(_HAR_BLOCK)
        states, degen = kernels.har_chain(x, dirs, unifs, p, q, r)
        x = states[-1].copy()
        bad = int(degen.sum())
        retries += bad
        if retries > _HAR_MAX_RETRIES:
            raise ResourceLimitError(
                f"hit-and-run chain for n={n} exceeded {_HAR_MAX_RETRIES} "
                "degenerate-chord retries"
            )
        if bad:
            states = states[~degen.view(bool)]
        valid_states.append(states)
        have += states.shape[0]
    chain = np.concatenate(valid_states, axis=0)
    emitted = chain[burn + thin - 1 : burn + thin * count : thin]
    return np.ascontiguousarray(emitted[:count]), retries


def sample_M_n_hitandrun(
    n: int, cfg: SamplerConfig, rng: np.random.Generator
) -> DistanceVector:
    """First emitted state of a hit-and-run chain (see hit_and_run_chain)."""
    rows, _ = hit_and_run_chain(n, cfg, rng, 1)
    return DistanceVector(n, rows[0])
