"""Pure-Python reference implementations of the compiled kernels."""

import numpy as np


def cesaro(M, v0, N, keep_orbit):
    """Iterate ``v -> M v`` ``N`` times from ``v0``.

    Returns ``(mean of v_0..v_{N-1}, orbit or None, v_N)``.
    """
    cur = np.array(v0, dtype=complex)
    tot = np.zeros_like(cur)
    orbit = np.empty((N, cur.size), dtype=complex) if keep_orbit else None
    for k in range(N):
        tot += cur
        if keep_orbit:
            orbit[k] = cur
        cur = M @ cur
    return tot / N, orbit, cur


def _trace_one(t, x, side, s, tau, L, t0, delta):
    w = t - s * x
    if (t == tau or t == -tau) and abs(x) <= L and side == 0:
        return w, 0, 0, 2
    if t <= t0:
        return w, 0, 0, 0
    cur_t, cur_side = t, side
    wraps = jumps = 0
    while True:
        if cur_t > tau or (cur_t == tau and cur_side == 1):
            T = tau
        elif cur_t > -tau or (cur_t == -tau and cur_side == 1):
            T = -tau
        else:
            break
        xT = s * (T - w)
        if abs(abs(xT) - L) < delta:
            return t - s * x, 0, 0, 1
        if abs(xT) < L:
            if T == tau:
                cur_t, w = -tau, w - 2.0 * tau
                jumps += 1
            else:
                cur_t, w = tau, w + 2.0 * tau
                wraps += 1
        else:
            cur_t = T
        cur_side = -1
    return w, wraps, jumps, 0


def trace_batch(t, x, side, s, tau, L, t0, delta):
    """Backward-trace each point to the reference surface.

    Returns arrays ``(w_eff, wraps, jumps, status)`` where status 0 is ok,
    1 a critical ray and 2 a point inside a removed strip.
    """
    n = len(t)
    w = np.empty(n)
    wr = np.empty(n, dtype=np.intc)
    jm = np.empty(n, dtype=np.intc)
    st = np.empty(n, dtype=np.intc)
    for i in range(n):
        w[i], wr[i], jm[i], st[i] = _trace_one(
            float(t[i]), float(x[i]), int(side[i]), s, tau, L, t0, delta
        )
    return w, wr, jm, st
