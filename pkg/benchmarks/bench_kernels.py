#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the NumPy fallback.

Runs each hot kernel on identical seeded inputs with both backends, checks
that the outputs are bit-identical, and prints a timing table.

    python3 benchmarks/bench_kernels.py

The compiled core must be built first (python3 setup.py build_ext --inplace);
if it is missing the script reports fallback timings only.
"""
import time

import numpy as np

from metriclaw import kernels
from metriclaw.indexing import batch_to_matrices, n_pairs, triangle_triples
from metriclaw.sampling import generator


def _time(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _bits_equal(a, b):
    return np.array_equal(
        np.asarray(a, dtype=np.float64).view(np.uint64),
        np.asarray(b, dtype=np.float64).view(np.uint64),
    )


def main():
    backends = {"python": kernels.load_backend("python")}
    try:
        backends["compiled"] = kernels.load_backend("compiled")
    except ImportError:
        print("compiled core not built; timing the fallback only\n")

    n = 7
    m = n_pairs(n)
    p, q, r = triangle_triples(n)
    rng = generator(2024)
    flat = rng.random((200_000, m))
    dirs = rng.standard_normal((50_000, m))
    unifs = rng.random(50_000)
    x0 = np.full(m, 0.6)

    big_flat = generator(2025).random((20_000, n_pairs(18)))
    big_mats = batch_to_matrices(big_flat, 18)

    rng128 = generator(2026)
    iu = np.triu_indices(128, 1)
    mat128 = np.zeros((1, 128, 128))
    draws = 0.5 + rng128.random(len(iu[0])) * 0.5
    mat128[0][iu] = draws
    mat128[0][iu[1], iu[0]] = draws
    xd2 = np.array([[0.0, 0.75], [0.75, 0.0]])
    yc2 = np.array([0.5, 1.0])

    cases = [
        ("triangle_mask  n=7  200k rows", lambda k: k.triangle_mask(flat, p, q, r, 0.0)),
        ("har_chain      n=7  50k steps", lambda k: k.har_chain(x0, dirs, unifs, p, q, r)[0]),
        ("axiom k=1      n=18 20k mats", lambda k: k.axiom_values(big_mats, np.zeros((1, 1)), np.array([0.6]), 0.2)),
        ("axiom k=2      n=128 1 mat", lambda k: k.axiom_values(mat128, xd2, yc2, 0.2)),
        ("phi_half       n=7  200k rows", lambda k: k.phi_half_values(flat)),
    ]

    width = max(len(name) for name, _ in cases)
    header = f"{'kernel':<{width}}  " + "".join(f"{b:>12}" for b in backends) + (
        "     speedup" if len(backends) == 2 else ""
    )
    print(header)
    print("-" * len(header))
    for name, fn in cases:
        times = {}
        outs = {}
        for bname, impl in backends.items():
            times[bname], outs[bname] = _time(lambda impl=impl: fn(impl))
        row = f"{name:<{width}}  " + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        if len(backends) == 2:
            assert _bits_equal(outs["python"], outs["compiled"]), f"{name}: backends disagree"
            row += f"  {times['python'] / times['compiled']:>9.1f}x"
        print(row)
    if len(backends) == 2:
        print("\nall outputs bit-identical across backends")


if __name__ == "__main__":
    main()
