"""Shared test helpers: an independent brute-force formula evaluator, a
seeded random-formula generator, and small space corpora."""
from __future__ import annotations

import random

import numpy as np
import pytest

from metriclaw.logic import (
    AbsDiff,
    Const,
    Dist,
    Inf,
    Max,
    Min,
    Monus,
    Sup,
)
from metriclaw.sampling import generator, rejection_batch
from metriclaw.spaces import FiniteMetricSpace


# ---------------------------------------------------------------------------
# independent oracle: a separately-written recursive loop evaluator
# (dict-copy environments, eager quantifier loops; shares no code with the
# production engine)
# ---------------------------------------------------------------------------

def brute_eval(f, space, env=None):
    env = dict(env or {})
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Dist):
        i, j = env[f.u], env[f.v]
        return float(space.dist[i - 1, j - 1])
    if isinstance(f, Monus):
        a = brute_eval(f.left, space, env)
        b = brute_eval(f.right, space, env)
        return a - b if a > b else 0.0
    if isinstance(f, Min):
        vals = [brute_eval(a, space, env) for a in f.args]
        return min(vals)
    if isinstance(f, Max):
        vals = [brute_eval(a, space, env) for a in f.args]
        return max(vals)
    if isinstance(f, AbsDiff):
        a = brute_eval(f.left, space, env)
        b = brute_eval(f.right, space, env)
        return a - b if a >= b else b - a
    if isinstance(f, Sup):
        return max(
            brute_eval(f.body, space, {**env, f.var: p})
            for p in range(1, space.n + 1)
        )
    if isinstance(f, Inf):
        return min(
            brute_eval(f.body, space, {**env, f.var: p})
            for p in range(1, space.n + 1)
        )
    raise TypeError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# random formulas
# ---------------------------------------------------------------------------

def random_formula(rnd: random.Random, quantifiers: int = 3, depth: int = 4):
    """A random sentence with at most ``quantifiers`` quantifier nodes."""
    counter = [0]

    def go(bound: tuple[str, ...], q_left: int, d: int):
        choices = ["const"]
        if len(bound) >= 1:
            choices += ["dist"] * 3
        if d > 0:
            choices += ["monus", "min", "max", "absdiff"] * 2
            if q_left > 0:
                choices += ["sup", "inf"] * 2
        kind = rnd.choice(choices)
        if kind == "const":
            return Const(round(rnd.random(), 3)), q_left
        if kind == "dist":
            u = rnd.choice(bound)
            v = rnd.choice(bound)
            return Dist(u, v), q_left
        if kind in ("sup", "inf"):
            counter[0] += 1
            var = f"q{counter[0]}"
            body, q_left = go(bound + (var,), q_left - 1, d - 1)
            return (Sup if kind == "sup" else Inf)(var, body), q_left
        if kind in ("monus", "absdiff"):
            left, q_left = go(bound, q_left, d - 1)
            right, q_left = go(bound, q_left, d - 1)
            return (Monus if kind == "monus" else AbsDiff)(left, right), q_left
        arity = rnd.randint(1, 3)
        args = []
        for _ in range(arity):
            arg, q_left = go(bound, q_left, d - 1)
            args.append(arg)
        return (Min if kind == "min" else Max)(tuple(args)), q_left

    # always open with a quantifier so Dist nodes have something to bind to
    counter[0] += 1
    var = f"q{counter[0]}"
    body, _ = go((var,), quantifiers - 1, depth)
    return Sup(var, body)


# ---------------------------------------------------------------------------
# random spaces
# ---------------------------------------------------------------------------

def random_metric_space(n: int, seed: int) -> FiniteMetricSpace:
    """Exactly-uniform random metric space (cube rejection), n <= 6."""
    if n == 1:
        return FiniteMetricSpace(1, np.zeros((1, 1)))
    rows, _ = rejection_batch(n, 1, generator(seed, n))
    return FiniteMetricSpace.from_coords(rows[0], n)


def random_class_c_space(n: int, seed: int) -> FiniteMetricSpace:
    from metriclaw.models import build_random_class_C

    return build_random_class_C(n, generator(seed, n, 17))


@pytest.fixture
def rng0():
    return generator(0)
