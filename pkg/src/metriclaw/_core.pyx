# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Mirror of ``metriclaw._core_py``: same functions, bit-identical outputs.
Compiled with -ffp-contract=off so no fused multiply-adds diverge from the
NumPy fallback's operation sequence.
"""
from libc.math cimport INFINITY, fabs, isfinite

import numpy as np

BACKEND = "compiled"


def triangle_mask(object flat_in, object p_in, object q_in, object r_in, double tol):
    """Per-row flag: 1 where every constraint flat[p] <= flat[q] + flat[r] + tol holds."""
    flat = np.ascontiguousarray(flat_in, dtype=np.float64)
    if flat.ndim != 2:
        raise ValueError("flat must be 2-d (batch, coords)")
    cdef const double[:, ::1] x = flat
    p_arr = np.ascontiguousarray(p_in, dtype=np.int64)
    q_arr = np.ascontiguousarray(q_in, dtype=np.int64)
    r_arr = np.ascontiguousarray(r_in, dtype=np.int64)
    cdef Py_ssize_t nb = x.shape[0]
    cdef Py_ssize_t nc = p_arr.shape[0]
    out = np.ones(nb, dtype=np.uint8)
    if nc == 0:
        return out
    cdef const long long[::1] p = p_arr
    cdef const long long[::1] q = q_arr
    cdef const long long[::1] r = r_arr
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t b, c
    with nogil:
        for b in range(nb):
            for c in range(nc):
                if x[b, p[c]] > x[b, q[c]] + x[b, r[c]] + tol:
                    o[b] = 0
                    break
    return out


def har_chain(object x0, object dirs_in, object unifs_in, object p_in, object q_in, object r_in):
    """Run hit-and-run attempts in [0,1]^m intersected with x[p] <= x[q] + x[r].

    Returns (states, degenerate); see the fallback for the full contract.
    """
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    dirs = np.ascontiguousarray(dirs_in, dtype=np.float64)
    unifs = np.ascontiguousarray(unifs_in, dtype=np.float64)
    p_arr = np.ascontiguousarray(p_in, dtype=np.int64)
    q_arr = np.ascontiguousarray(q_in, dtype=np.int64)
    r_arr = np.ascontiguousarray(r_in, dtype=np.int64)
    cdef Py_ssize_t steps = dirs.shape[0]
    cdef Py_ssize_t m = dirs.shape[1]
    cdef Py_ssize_t nc = p_arr.shape[0]
    states_arr = np.empty((steps, m), dtype=np.float64)
    degen_arr = np.zeros(steps, dtype=np.uint8)
    cdef double[::1] x = x_arr
    cdef const double[:, ::1] d = dirs
    cdef const double[::1] u = unifs
    cdef const long long[::1] p = p_arr
    cdef const long long[::1] q = q_arr
    cdef const long long[::1] r = r_arr
    cdef double[:, ::1] states = states_arr
    cdef unsigned char[::1] degen = degen_arr
    cdef Py_ssize_t t, e, c
    cdef double lo, hi, den, num, ratio, step, xe
    with nogil:
        for t in range(steps):
            lo = -INFINITY
            hi = INFINITY
            for e in range(m):
                den = d[t, e]
                num = 1.0 - x[e]
                if den > 0.0:
                    ratio = num / den
                    if ratio < hi:
                        hi = ratio
                elif den < 0.0:
                    ratio = num / den
                    if ratio > lo:
                        lo = ratio
                den = -d[t, e]
                num = x[e]
                if den > 0.0:
                    ratio = num / den
                    if ratio < hi:
                        hi = ratio
                elif den < 0.0:
                    ratio = num / den
                    if ratio > lo:
                        lo = ratio
            for c in range(nc):
                den = (d[t, p[c]] - d[t, q[c]]) - d[t, r[c]]
                if den != 0.0:
                    num = (x[q[c]] + x[r[c]]) - x[p[c]]
                    ratio = num / den
                    if den > 0.0:
                        if ratio < hi:
                            hi = ratio
                    else:
                        if ratio > lo:
                            lo = ratio
            if not (isfinite(lo) and isfinite(hi)) or hi < lo:
                for e in range(m):
                    states[t, e] = x[e]
                degen[t] = 1
                continue
            step = lo + u[t] * (hi - lo)
            for e in range(m):
                xe = x[e] + step * d[t, e]
                if xe < 0.0:
                    xe = 0.0
                if xe > 1.0:
                    xe = 1.0
                x[e] = xe
                states[t, e] = xe
    return states_arr, degen_arr


def axiom_values(object mats_in, object xd_in, object yc_in, double eps):
    """Extension-axiom sentence values on a stack of distance matrices.

    Same contract as the fallback; skips tuples and truncates witness scans
    only where the contribution is exactly zero, so values are unchanged.
    """
    mats = np.ascontiguousarray(mats_in, dtype=np.float64)
    xd = np.ascontiguousarray(xd_in, dtype=np.float64)
    yc = np.ascontiguousarray(yc_in, dtype=np.float64)
    cdef Py_ssize_t nb = mats.shape[0]
    cdef Py_ssize_t n = mats.shape[1]
    cdef Py_ssize_t k = yc.shape[0]
    if k > 12:
        raise ValueError("template arity above 12 is not supported")
    out = np.zeros(nb, dtype=np.float64)
    cdef const double[:, :, ::1] dm = mats
    cdef const double[:, ::1] xv = xd
    cdef const double[::1] yv = yc
    cdef double[::1] o = out
    cdef Py_ssize_t v[12]
    cdef Py_ssize_t b, i, j, w, idx
    cdef double best, conf_x, t, b1, b2, m2, conf_y, val
    cdef bint done
    with nogil:
        for b in range(nb):
            best = 0.0
            for i in range(k):
                v[i] = 0
            done = False
            while not done:
                conf_x = 0.0
                for i in range(k):
                    for j in range(i + 1, k):
                        t = fabs(xv[i, j] - dm[b, v[i], v[j]])
                        if t > conf_x:
                            conf_x = t
                b1 = eps - conf_x
                if b1 > 0.0:
                    m2 = INFINITY
                    for w in range(n):
                        conf_y = conf_x
                        for i in range(k):
                            t = fabs(yv[i] - dm[b, v[i], w])
                            if t > conf_y:
                                conf_y = t
                        if conf_y < m2:
                            m2 = conf_y
                            if m2 <= eps:
                                break
                    b2 = m2 - eps
                    if b2 < 0.0:
                        b2 = 0.0
                    val = b1 if b1 < b2 else b2
                    if val > best:
                        best = val
                idx = k - 1
                while idx >= 0:
                    v[idx] += 1
                    if v[idx] < n:
                        break
                    v[idx] = 0
                    idx -= 1
                if idx < 0:
                    done = True
            o[b] = best
    return out


def phi_half_values(object flat_in):
    """Values of the all-distances-at-least-one-half sentence on coordinate rows."""
    flat = np.ascontiguousarray(flat_in, dtype=np.float64)
    cdef Py_ssize_t nb = flat.shape[0]
    cdef Py_ssize_t m = flat.shape[1]
    out = np.zeros(nb, dtype=np.float64)
    if m == 0:
        return out
    cdef const double[:, ::1] x = flat
    cdef double[::1] o = out
    cdef Py_ssize_t b, e
    cdef double best, half, val
    with nogil:
        for b in range(nb):
            best = 0.0
            for e in range(m):
                half = 0.5 - x[b, e]
                if half < 0.0:
                    half = 0.0
                val = x[b, e] if x[b, e] < half else half
                if val > best:
                    best = val
            o[b] = best
    return out
