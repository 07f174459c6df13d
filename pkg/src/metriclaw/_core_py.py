"""NumPy implementations of the hot kernels.

This module mirrors the compiled extension ``metriclaw._core`` exactly: same
functions, same argument layout, bit-identical outputs.  The compiled core is
built with FP contraction off, and every arithmetic expression here is written
elementwise in the same operation order as the C loops, so either backend can
be swapped in without changing any sampled trajectory or evaluated value.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

# Bounds the (chunk, n, n, n) temporary used by the 2-point axiom fast path.
_CHUNK_ELEMS = 8_000_000


def triangle_mask(flat, p, q, r, tol):
    """Per-row flag: 1 where every constraint flat[p] <= flat[q] + flat[r] + tol holds."""
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    if flat.ndim != 2:
        raise ValueError("flat must be 2-d (batch, coords)")
    if len(p) == 0:
        return np.ones(flat.shape[0], dtype=np.uint8)
    ok = flat[:, p] <= flat[:, q] + flat[:, r] + tol
    return ok.all(axis=1).astype(np.uint8)


def har_chain(x0, dirs, unifs, p, q, r):
    """Run hit-and-run attempts in [0,1]^m intersected with x[p] <= x[q] + x[r].

    One attempt consumes one direction row and one uniform.  An attempt whose
    feasible chord comes out empty or unbounded (possible only through
    numerical noise or a zero direction) leaves the state unchanged and is
    flagged in the returned ``degenerate`` array.

    Returns (states, degenerate): the post-attempt states, and uint8 flags.
    """
    x = np.array(x0, dtype=np.float64, copy=True)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    unifs = np.ascontiguousarray(unifs, dtype=np.float64)
    steps, m = dirs.shape
    states = np.empty((steps, m), dtype=np.float64)
    degenerate = np.zeros(steps, dtype=np.uint8)
    for t in range(steps):
        d = dirs[t]
        num = np.concatenate((1.0 - x, x, (x[q] + x[r]) - x[p]))
        den = np.concatenate((d, -d, (d[p] - d[q]) - d[r]))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        hi = np.where(den > 0.0, ratio, np.inf).min()
        lo = np.where(den < 0.0, ratio, -np.inf).max()
        if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
            states[t] = x
            degenerate[t] = 1
            continue
        step = lo + unifs[t] * (hi - lo)
        x = x + step * d
        np.maximum(x, 0.0, out=x)
        np.minimum(x, 1.0, out=x)
        states[t] = x
    return states, degenerate


def _axiom_values_k1(mats, y0, eps):
    gap = np.abs(y0 - mats)
    b2 = np.maximum(gap.min(axis=2) - eps, 0.0)
    vals = np.minimum(eps, b2)
    return vals.max(axis=1)


def _axiom_values_k2(mats, x01, y0, y1, eps):
    nb, n, _ = mats.shape
    out = np.empty(nb, dtype=np.float64)
    chunk = max(1, _CHUNK_ELEMS // (n * n * n))
    for s in range(0, nb, chunk):
        d = mats[s : s + chunk]
        conf_x = np.abs(x01 - d)
        ga = np.abs(y0 - d)
        gb = np.abs(y1 - d)
        # min over the witness point of the two new-pair gaps
        wit = np.maximum(ga[:, :, None, :], gb[:, None, :, :]).min(axis=3)
        conf_y = np.maximum(conf_x, wit)
        vals = np.minimum(
            np.maximum(eps - conf_x, 0.0), np.maximum(conf_y - eps, 0.0)
        )
        out[s : s + chunk] = vals.max(axis=(1, 2))
    return out


def axiom_values(mats, xd, yc, eps):
    """Extension-axiom sentence values on a stack of distance matrices.

    ``xd`` is the k x k distance matrix of the base template, ``yc`` the k
    distances from the template points to the extension point.  Returns one
    value per matrix, equal to what the formula evaluator computes for the
    corresponding sentence (exactly: same IEEE operations).
    """
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    xd = np.ascontiguousarray(xd, dtype=np.float64)
    yc = np.ascontiguousarray(yc, dtype=np.float64)
    nb, n, _ = mats.shape
    k = yc.shape[0]
    if k == 1:
        return _axiom_values_k1(mats, yc[0], eps)
    if k == 2:
        return _axiom_values_k2(mats, xd[0, 1], yc[0], yc[1], eps)
    # generic arity: odometer over point tuples, vectorized over the witness
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    out = np.empty(nb, dtype=np.float64)
    for b in range(nb):
        d = mats[b]
        best = 0.0
        for v in np.ndindex(*([n] * k)):
            conf_x = 0.0
            for i, j in pairs:
                t = abs(xd[i, j] - d[v[i], v[j]])
                if t > conf_x:
                    conf_x = t
            b1 = eps - conf_x
            if b1 <= 0.0:
                continue
            wit = np.abs(yc[:, None] - d[list(v), :]).max(axis=0)
            m2 = np.maximum(conf_x, wit).min()
            b2 = m2 - eps
            if b2 < 0.0:
                b2 = 0.0
            val = b1 if b1 < b2 else b2
            if val > best:
                best = val
        out[b] = best
    return out


def phi_half_values(flat):
    """Values of the all-distances-at-least-one-half sentence on coordinate rows."""
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    if flat.shape[1] == 0:
        return np.zeros(flat.shape[0], dtype=np.float64)
    vals = np.minimum(flat, np.maximum(0.5 - flat, 0.0))
    return np.maximum(vals.max(axis=1), 0.0)
