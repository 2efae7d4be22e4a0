# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Semantics must match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def cesaro(double complex[:, ::1] M, double complex[::1] v0, Py_ssize_t N, bint keep_orbit):
    cdef Py_ssize_t n = M.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double complex acc
    cur_arr = np.array(v0, dtype=np.complex128)
    nxt_arr = np.empty(n, dtype=np.complex128)
    tot_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] cur = cur_arr
    cdef double complex[::1] nxt = nxt_arr
    cdef double complex[::1] tot = tot_arr
    cdef double complex[:, ::1] orb
    if keep_orbit:
        orbit_arr = np.empty((N, n), dtype=np.complex128)
        orb = orbit_arr
    else:
        orbit_arr = None
    for k in range(N):
        for i in range(n):
            tot[i] += cur[i]
            if keep_orbit:
                orb[k, i] = cur[i]
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = acc + M[i, j] * cur[j]
            nxt[i] = acc
        for i in range(n):
            cur[i] = nxt[i]
    for i in range(n):
        tot[i] = tot[i] / N
    return tot_arr, orbit_arr, cur_arr


cdef int _trace_one(double t, double x, int side, int s, double tau, double L,
                    double t0, double delta, double *w_out, int *wraps_out, int *jumps_out):
    cdef double w = t - s * x
    cdef double cur_t = t
    cdef int cur_side = side
    cdef double T, xT
    cdef int wraps = 0, jumps = 0
    w_out[0] = w
    wraps_out[0] = 0
    jumps_out[0] = 0
    if (cur_t == tau or cur_t == -tau) and fabs(x) <= L and side == 0:
        return 2
    if cur_t <= t0:
        return 0
    while True:
        if cur_t > tau or (cur_t == tau and cur_side == 1):
            T = tau
        elif cur_t > -tau or (cur_t == -tau and cur_side == 1):
            T = -tau
        else:
            break
        xT = s * (T - w)
        if fabs(fabs(xT) - L) < delta:
            return 1
        if fabs(xT) < L:
            if T == tau:
                cur_t = -tau
                w = w - 2.0 * tau
                jumps += 1
            else:
                cur_t = tau
                w = w + 2.0 * tau
                wraps += 1
        else:
            cur_t = T
        cur_side = -1
    w_out[0] = w
    wraps_out[0] = wraps
    jumps_out[0] = jumps
    return 0


def trace_batch(double[::1] t, double[::1] x, int[::1] side, int s,
                double tau, double L, double t0, double delta):
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t i
    w_arr = np.empty(n, dtype=np.float64)
    wr_arr = np.empty(n, dtype=np.intc)
    jm_arr = np.empty(n, dtype=np.intc)
    st_arr = np.empty(n, dtype=np.intc)
    cdef double[::1] w = w_arr
    cdef int[::1] wr = wr_arr
    cdef int[::1] jm = jm_arr
    cdef int[::1] st = st_arr
    for i in range(n):
        st[i] = _trace_one(t[i], x[i], side[i], s, tau, L, t0, delta, &w[i], &wr[i], &jm[i])
    return w_arr, wr_arr, jm_arr, st_arr
