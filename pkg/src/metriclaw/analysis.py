"""Analytic failure bounds and the Monte Carlo experiment harness.

The bound calculators materialize the explicit pre-asymptotic expressions
behind the concentration argument for extension axioms: for a k-point
template at tolerance epsilon inside the region where all distances are at
least 1/2 - delta, the chance that a fixed k-subset witnesses a failure is at
most

    2^C(k,2) * lambda_A * (((1/2+delta)^k - epsilon^k) / (1/2-delta)^k)^(n-k)

and a union over the at most n^k subsets and the m axioms of a family gives
the reported failure bound.  Experiments estimate the matching empirical
fractions with two-sided 95% Wilson intervals, on exactly-evaluated sentence
values (success criteria are exact "== 0" / strict "<" tests, never a hidden
tolerance).

All experiments are bit-reproducible: trials are split into fixed-size
chunks, each chunk draws from its own counter-based substream, and per-chunk
counters are merged in chunk order, so neither the worker count nor the
kernel backend changes a single output byte.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernels
from .errors import RejectionBudgetError
from .indexing import batch_to_matrices
from .logic import Formula, build_phi_geq_half, eval_on_dvec
from .models import AxiomFamily, task_values_on_matrices
from .sampling import (
    DEFAULT_REJECTION_BUDGET,
    DeltaSchedule,
    SamplerConfig,
    generator,
    hit_and_run_chain,
)
from .spaces import DistanceVector, FiniteMetricSpace

__all__ = [
    "BadEventSpec",
    "ReportRow",
    "ExperimentReport",
    "wilson_interval",
    "per_subset_bound",
    "union_bound",
    "check_ratio_inequality",
    "ratio_inequality_sides",
    "lambda_a_upper",
    "estimate_lambda_A",
    "LambdaAEstimate",
    "specs_for_family",
    "experiment_fact_cs",
    "experiment_theorem_2_2",
    "experiment_cor_2_3",
    "experiment_zero_one",
    "trend_nondecreasing",
]

# two-sided 95%
_Z95 = 1.959963984540054

# trials per substream chunk; fixed so results never depend on --threads
_CHUNK_TRIALS = 250

# largest n for which exact cube rejection is the default uniform sampler
_REJECTION_N_MAX = 5


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """Two-sided 95% Wilson score interval for a binomial fraction."""
    if trials <= 0:
        return 0.0, 1.0
    z2 = _Z95 * _Z95
    phat = successes / trials
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = (
        _Z95
        * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
        / denom
    )
    # boundary cases are exact in real arithmetic; keep them exact in floats
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class BadEventSpec:
    """Parameters of one failure event: template size k, tolerance epsilon,
    concentration threshold delta, task multiplicity m, and the measure (or
    an upper bound) lambda_a of the near-copy region of the template.

    delta = 0 is admitted as the closed boundary of the stated range; the
    bound is continuous there and the ratio inequality becomes an equality.
    epsilon = 1 (the vacuous axiom) is admitted and makes the bound 0.
    """

    k: int
    epsilon: float
    delta: float
    m: int = 1
    lambda_a: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        if not 0.0 <= self.delta < 0.5:
            raise ValueError(f"delta must lie in [0, 1/2), got {self.delta!r}")
        if not 0.0 <= self.lambda_a <= 1.0:
            raise ValueError(f"lambda_a must lie in [0, 1], got {self.lambda_a!r}")
        if self.m < 1:
            raise ValueError("m must be at least 1")


def per_subset_bound(spec: BadEventSpec, n: int) -> float:
    """Failure-probability bound contributed by one fixed k-subset."""
    k, eps, delta = spec.k, spec.epsilon, spec.delta
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    top = (0.5 + delta) ** k - eps**k
    if top <= 0.0:
        return 0.0
    ratio = top / (0.5 - delta) ** k
    return 2.0 ** (k * (k - 1) // 2) * spec.lambda_a * ratio ** (n - k)


def union_bound(specs: list[BadEventSpec], n: int) -> float:
    """Union over the n^k subsets and all tasks, clamped to 1 for reporting."""
    total = 0.0
    for spec in specs:
        total += spec.m * float(n) ** spec.k * per_subset_bound(spec, n)
    return min(1.0, total)


def ratio_inequality_sides(
    k: int, delta, epsilon
) -> tuple[Fraction, Fraction]:
    """Both sides of the bounding inequality as exact rationals:
    left = ((1/2+d)^k - e^k) / (1/2-d)^k, right = ((1/2+d)/(1/2-d))^k - (2e)^k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    d = Fraction(delta)
    e = Fraction(epsilon)
    if not 0 <= d < Fraction(1, 2):
        raise ValueError("delta must lie in [0, 1/2)")
    if not 0 < e <= Fraction(1, 2):
        raise ValueError("epsilon must lie in (0, 1/2]")
    half = Fraction(1, 2)
    left = ((half + d) ** k - e**k) / (half - d) ** k
    right = ((half + d) / (half - d)) ** k - (2 * e) ** k
    return left, right


def check_ratio_inequality(k: int, delta, epsilon) -> bool:
    """Exact check that the per-subset ratio is dominated by the closed form
    used to extract a geometric decay rate.  Equality holds exactly on the
    delta = 0 boundary (any k); for delta > 0 the right side exceeds the left
    by (epsilon/(1/2-delta))^k - (2 epsilon)^k > 0."""
    left, right = ratio_inequality_sides(k, delta, epsilon)
    return left <= right


def lambda_a_upper(k: int, epsilon: float) -> float:
    """Closed-form upper bound min(1, (2 epsilon)^C(k,2)) for the near-copy
    region of any k-point template (each pair coordinate confined to a band
    of width 2 epsilon)."""
    return min(1.0, (2.0 * epsilon) ** (k * (k - 1) // 2))


@dataclass
class LambdaAEstimate:
    fraction: float
    ci_low: float
    ci_high: float
    trials: int


def estimate_lambda_A(
    x: FiniteMetricSpace, epsilon: float, trials: int, rng: np.random.Generator
) -> LambdaAEstimate:
    """Monte Carlo cube measure of {coordinates with Conf_X <= epsilon}.

    Measured on the whole cube [0,1]^C(k,2) (matching how the bound uses it);
    for one-point templates the value is exactly 1 by the empty-max
    convention.
    """
    k = x.n
    if k <= 1:
        return LambdaAEstimate(1.0, 1.0, 1.0, trials)
    template = x.to_vector().coords
    hits = 0
    done = 0
    while done < trials:
        take = min(65536, trials - done)
        batch = rng.random((take, template.shape[0]))
        conf = np.abs(batch - template).max(axis=1)
        hits += int((conf <= epsilon).sum())
        done += take
    lo, hi = wilson_interval(hits, trials)
    return LambdaAEstimate(hits / trials, lo, hi, trials)


def specs_for_family(
    family: AxiomFamily, delta: float, lambda_mode: str = "analytic"
) -> list[BadEventSpec]:
    """One BadEventSpec per task, with lambda_a from the closed-form upper
    bound ("analytic") or fixed at 1 ("unit")."""
    specs = []
    for task in family.tasks:
        k = task.ext.base.n
        lam = lambda_a_upper(k, task.epsilon) if lambda_mode == "analytic" else 1.0
        specs.append(
            BadEventSpec(k=k, epsilon=task.epsilon, delta=delta, m=1, lambda_a=lam)
        )
    return specs


# ---------------------------------------------------------------------------
# experiment harness
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    n: int
    trials: int
    successes: int
    fraction: float
    ci_low: float
    ci_high: float
    analytic_bound: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    """Per-n experiment rows plus the resolved configuration.

    The CSV rendering is byte-stable given (seed, config): floats are printed
    with shortest-round-trip repr and the embedded config line is canonical
    JSON.  Wall time lives only in the JSON rendering.
    """

    kind: str
    rows: list[ReportRow]
    config: dict
    wall_time_s: float = 0.0

    def to_csv_text(self) -> str:
        lines = ["# config " + json.dumps(self.config, sort_keys=True)]
        lines.append("n,trials,successes,fraction,ci_low,ci_high,analytic_bound")
        for row in self.rows:
            bound = "" if row.analytic_bound is None else repr(float(row.analytic_bound))
            lines.append(
                f"{row.n},{row.trials},{row.successes},{repr(float(row.fraction))},"
                f"{repr(float(row.ci_low))},{repr(float(row.ci_high))},{bound}"
            )
        return "\n".join(lines) + "\n"

    def to_jsonable(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "wall_time_s": self.wall_time_s,
            "rows": [
                {
                    "n": row.n,
                    "trials": row.trials,
                    "successes": row.successes,
                    "fraction": row.fraction,
                    "ci_low": row.ci_low,
                    "ci_high": row.ci_high,
                    "analytic_bound": row.analytic_bound,
                    **({"extra": row.extra} if row.extra else {}),
                }
                for row in self.rows
            ],
        }

    def save(self, path: str | Path, fmt: str = "csv") -> None:
        path = Path(path)
        if fmt == "csv":
            path.write_text(self.to_csv_text())
        else:
            path.write_text(json.dumps(self.to_jsonable(), indent=1) + "\n")


def trend_nondecreasing(rows: list[ReportRow]) -> bool:
    """Whether success fractions are nondecreasing up to CI overlap: each
    row's upper CI must reach at least the previous row's lower CI."""
    for prev, cur in zip(rows, rows[1:]):
        if cur.ci_high < prev.ci_low:
            return False
    return True


def _chunks(trials: int) -> list[tuple[int, int]]:
    out = []
    start = 0
    ci = 0
    while start < trials:
        take = min(_CHUNK_TRIALS, trials - start)
        out.append((ci, take))
        start += take
        ci += 1
    return out


def _run_chunks(worker, trials: int, threads: int) -> list:
    chunks = _chunks(trials)
    if threads <= 1:
        return [worker(ci, take) for ci, take in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, ci, take) for ci, take in chunks]
        return [f.result() for f in futures]


def _metric_rows(
    n: int,
    count: int,
    rng: np.random.Generator,
    max_rejections: int,
) -> np.ndarray:
    """``count`` uniform metric vectors: exact cube rejection for small n,
    hit-and-run otherwise."""
    from .sampling import rejection_batch

    if n <= _REJECTION_N_MAX:
        rows, _ = rejection_batch(n, count, rng, lo=0.0, max_rejections=max_rejections)
        return rows
    rows, _ = hit_and_run_chain(n, SamplerConfig(method="hit-and-run"), rng, count)
    return rows


def _experiment(kind, config, n_list, trials, seed, threads, row_fn):
    start = time.perf_counter()
    rows = []
    for row_idx, n in enumerate(n_list):
        rows.append(row_fn(row_idx, n))
    return ExperimentReport(
        kind=kind,
        rows=rows,
        config=config,
        wall_time_s=time.perf_counter() - start,
    )


def _resolve_delta(
    n: int, delta_schedule: DeltaSchedule | None, fixed_delta: float | None
) -> float:
    if fixed_delta is not None:
        if not 0.0 <= fixed_delta <= 0.5:
            raise ValueError("fixed delta must lie in [0, 1/2]")
        return fixed_delta
    return (delta_schedule or DeltaSchedule()).delta_at(n)


def experiment_fact_cs(
    n_list: list[int],
    delta_schedule: DeltaSchedule | None = None,
    trials: int = 1000,
    seed: int = 0,
    *,
    fixed_delta: float | None = None,
    threads: int = 1,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> ExperimentReport:
    """Concentration of uniform metric spaces: per n, the fraction of uniform
    metric samples with every coordinate at least 1/2 - delta(n).

    ``fixed_delta`` overrides the schedule; 0 is allowed and reads as the
    limiting threshold of exactly 1/2.
    """
    sched = delta_schedule or DeltaSchedule()
    config = {
        "kind": "fact-cs",
        "n_list": list(n_list),
        "trials": trials,
        "seed": seed,
        "delta_scale": sched.scale,
        "delta_exp": sched.exponent,
        "delta_cap": sched.cap,
        "fixed_delta": fixed_delta,
    }

    def row_fn(row_idx: int, n: int) -> ReportRow:
        delta = _resolve_delta(n, sched, fixed_delta)
        threshold = 0.5 - delta

        def worker(ci: int, take: int) -> int:
            rng = generator(seed, row_idx, ci)
            rows = _metric_rows(n, take, rng, max_rejections)
            return int((rows.min(axis=1) >= threshold).sum())

        successes = sum(_run_chunks(worker, trials, threads))
        lo, hi = wilson_interval(successes, trials)
        return ReportRow(n, trials, successes, successes / trials, lo, hi)

    return _experiment("fact-cs", config, n_list, trials, seed, threads, row_fn)


def _family_success_counts(
    rows: np.ndarray, n: int, family: AxiomFamily
) -> np.ndarray:
    """Boolean per sample: every task sentence evaluates to exactly zero."""
    mats = batch_to_matrices(rows, n)
    good = np.ones(rows.shape[0], dtype=bool)
    for task in family.tasks:
        vals = task_values_on_matrices(mats, task)
        good &= vals == 0.0
    return good


def _family_config(family: AxiomFamily) -> list[dict]:
    return [
        {
            "k": t.ext.base.n,
            "epsilon": t.epsilon,
            "base_d": [float(v) for v in t.ext.base.to_vector().coords],
            "new_point_distances": [float(v) for v in t.ext.new_point_distances],
        }
        for t in family.tasks
    ]


def experiment_theorem_2_2(
    tasks: AxiomFamily,
    n_list: list[int],
    delta_schedule: DeltaSchedule | None = None,
    trials: int = 1000,
    seed: int = 0,
    *,
    fixed_delta: float | None = None,
    threads: int = 1,
    lambda_mode: str = "analytic",
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> ExperimentReport:
    """Axiom satisfaction on the concentrated region: per n, sample the box
    [1/2-delta(n), 1]^C(n,2) conditioned on metricity and count samples where
    every task sentence is exactly zero.  The analytic_bound column is the
    union failure bound (success is at least 1 - bound)."""
    from .sampling import rejection_batch

    sched = delta_schedule or DeltaSchedule()
    config = {
        "kind": "thm22",
        "n_list": list(n_list),
        "trials": trials,
        "seed": seed,
        "delta_scale": sched.scale,
        "delta_exp": sched.exponent,
        "delta_cap": sched.cap,
        "fixed_delta": fixed_delta,
        "lambda_mode": lambda_mode,
        "tasks": _family_config(tasks),
    }

    def row_fn(row_idx: int, n: int) -> ReportRow:
        delta = _resolve_delta(n, sched, fixed_delta)
        if delta <= 0.0:
            raise ValueError("the concentrated region needs delta > 0")

        def worker(ci: int, take: int) -> int:
            rng = generator(seed, row_idx, ci)
            try:
                rows, _ = rejection_batch(
                    n, take, rng, lo=0.5 - delta, max_rejections=max_rejections
                )
            except RejectionBudgetError as exc:
                raise RejectionBudgetError(f"row n={n}: {exc}") from exc
            return int(_family_success_counts(rows, n, tasks).sum())

        successes = sum(_run_chunks(worker, trials, threads))
        lo, hi = wilson_interval(successes, trials)
        bound = union_bound(specs_for_family(tasks, delta, lambda_mode), n)
        return ReportRow(n, trials, successes, successes / trials, lo, hi, bound)

    return _experiment("thm22", config, n_list, trials, seed, threads, row_fn)


def experiment_cor_2_3(
    tasks: AxiomFamily,
    n_list: list[int],
    trials: int = 1000,
    seed: int = 0,
    *,
    delta_schedule: DeltaSchedule | None = None,
    threads: int = 1,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> ExperimentReport:
    """Axiom satisfaction under the uniform law on all metric spaces.

    When a schedule is given, each row also reports the exact count partition
    of successes into the concentrated region and its complement
    (successes == in-region successes + out-of-region successes, by
    construction)."""
    config = {
        "kind": "cor23",
        "n_list": list(n_list),
        "trials": trials,
        "seed": seed,
        "delta_scale": None if delta_schedule is None else delta_schedule.scale,
        "delta_exp": None if delta_schedule is None else delta_schedule.exponent,
        "tasks": _family_config(tasks),
    }

    def row_fn(row_idx: int, n: int) -> ReportRow:
        delta = None if delta_schedule is None else delta_schedule.delta_at(n)

        def worker(ci: int, take: int):
            rng = generator(seed, row_idx, ci)
            rows = _metric_rows(n, take, rng, max_rejections)
            good = _family_success_counts(rows, n, tasks)
            counts = {"successes": int(good.sum())}
            if delta is not None:
                in_d = rows.min(axis=1) >= 0.5 - delta
                counts["in_D"] = int(in_d.sum())
                counts["success_in_D"] = int((good & in_d).sum())
                counts["success_out_D"] = int((good & ~in_d).sum())
            return counts

        parts = _run_chunks(worker, trials, threads)
        successes = sum(p["successes"] for p in parts)
        lo, hi = wilson_interval(successes, trials)
        extra = {}
        if delta is not None:
            extra = {
                "delta": delta,
                "in_D": sum(p["in_D"] for p in parts),
                "success_in_D": sum(p["success_in_D"] for p in parts),
                "success_out_D": sum(p["success_out_D"] for p in parts),
            }
        return ReportRow(n, trials, successes, successes / trials, lo, hi, None, extra)

    return _experiment("cor23", config, n_list, trials, seed, threads, row_fn)


def experiment_zero_one(
    sigma: Formula,
    sigma_as_estimate: float,
    epsilon: float,
    n_list: list[int],
    trials: int = 1000,
    seed: int = 0,
    *,
    threads: int = 1,
    max_rejections: int = DEFAULT_REJECTION_BUDGET,
) -> ExperimentReport:
    """Per n: fraction of uniform metric samples whose sentence value is
    strictly within epsilon of the supplied almost-sure estimate."""
    from .logic import format_formula

    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    config = {
        "kind": "zero-one",
        "n_list": list(n_list),
        "trials": trials,
        "seed": seed,
        "epsilon": epsilon,
        "sigma": format_formula(sigma),
        "sigma_as": sigma_as_estimate,
    }
    phi = build_phi_geq_half()

    def row_fn(row_idx: int, n: int) -> ReportRow:
        def worker(ci: int, take: int) -> int:
            rng = generator(seed, row_idx, ci)
            rows = _metric_rows(n, take, rng, max_rejections)
            if sigma == phi:
                vals = kernels.phi_half_values(rows)
            else:
                vals = np.array(
                    [
                        eval_on_dvec(sigma, DistanceVector(n, row))
                        for row in rows
                    ]
                )
            return int((np.abs(vals - sigma_as_estimate) < epsilon).sum())

        successes = sum(_run_chunks(worker, trials, threads))
        lo, hi = wilson_interval(successes, trials)
        return ReportRow(n, trials, successes, successes / trials, lo, hi)

    return _experiment("zero-one", config, n_list, trials, seed, threads, row_fn)
