"""Massless Klein-Gordon solutions on Politzer spacetime.

A solution is fixed by its right and left mover profiles on ``t = t0``.  The
value at any admissible point is ``xi_R(u_eff) + xi_L(v_eff)`` with the
effective coordinates obtained by tracing both null lines back to ``t0``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson, quad

from .. import kernels
from ..errors import ContractError, CriticalRayError, DomainError
from .geometry import DELTA0, SIGN, PolitzerGeometry, critical_coordinates
from .profiles import (
    BumpProfile,
    MoverProfile,
    Profile,
    SumProfile,
    merge_intervals,
    profile_from_json,
    profiles_equal,
)


@lru_cache(maxsize=64)
def _critical(geom, chirality):
    return tuple(critical_coordinates(geom, chirality))


class PolitzerField:
    """Immutable field ``(geometry, xiR, xiL)``; admissibility is checked on construction."""

    def __init__(self, geometry, xiR, xiL, delta0=DELTA0):
        if not isinstance(geometry, PolitzerGeometry):
            raise ContractError("geometry must be a PolitzerGeometry")
        for want, prof in (("R", xiR), ("L", xiL)):
            if not isinstance(prof, Profile) or prof.chirality != want:
                raise ContractError(f"xi{want} must be a profile of chirality {want}")
        self.geometry = geometry
        self.xiR = xiR
        self.xiL = xiL
        self.delta0 = float(delta0)
        bad = self.inadmissible()
        if bad:
            raise ContractError(f"field does not vanish near critical coordinates {bad}")

    def inadmissible(self):
        """Critical coordinates whose ``2 delta0`` neighbourhood meets a profile support."""
        bad = []
        width = 2 * self.delta0
        for chir, prof in (("R", self.xiR), ("L", self.xiL)):
            for c in _critical(self.geometry, chir):
                if any(a < c + width and b > c - width for a, b in prof.support()):
                    bad.append((chir, c))
        return bad

    def profile(self, chirality):
        return self.xiR if chirality == "R" else self.xiL

    def _combine(self, other, sign):
        if not isinstance(other, PolitzerField):
            return NotImplemented
        if other.geometry != self.geometry:
            raise ContractError("fields live on different geometries")
        return PolitzerField(
            self.geometry, self.xiR + sign * other.xiR, self.xiL + sign * other.xiL, self.delta0
        )

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return PolitzerField(self.geometry, -self.xiR, -self.xiL, self.delta0)

    def scaled(self, c):
        return PolitzerField(self.geometry, c * self.xiR, c * self.xiL, self.delta0)

    @property
    def is_zero(self):
        return self.xiR.is_zero and self.xiL.is_zero

    def equals(self, other, tol=1e-12):
        return (
            self.geometry == other.geometry
            and profiles_equal(self.xiR, other.xiR, tol)
            and profiles_equal(self.xiL, other.xiL, tol)
        )

    def to_json(self):
        out = self.geometry.to_json()
        out["xiR"] = self.xiR.to_json()
        out["xiL"] = self.xiL.to_json()
        return out


def zero_field(geom):
    return PolitzerField(geom, SumProfile.zero("R"), SumProfile.zero("L"))


def right_mover(geom, prof):
    return PolitzerField(geom, prof, SumProfile.zero("L"))


def left_mover(geom, prof):
    return PolitzerField(geom, SumProfile.zero("R"), prof)


def field_from_json(obj):
    geom = PolitzerGeometry.from_json(obj)
    try:
        xiR = profile_from_json(obj["xiR"], "R")
        xiL = profile_from_json(obj["xiL"], "L")
    except KeyError as exc:
        raise ContractError(f"field JSON missing {exc}") from None
    return PolitzerField(geom, xiR, xiL, float(obj.get("delta0", DELTA0)))


def effective_coordinates(geom, t, x, chirality, side=None, delta=DELTA0, impl=None):
    """Traced coordinates on ``t0`` plus wrap and jump counts, vectorized."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t, x = np.broadcast_arrays(t, x)
    side = np.zeros(t.shape, dtype=np.intc) if side is None else np.broadcast_to(side, t.shape)
    w, wr, jm, st = kernels.trace_batch(
        t.ravel(), x.ravel(), np.asarray(side).ravel(), SIGN[chirality],
        geom.tau, geom.L, geom.t0, delta, impl=impl,
    )
    if np.any(st == 1):
        i = int(np.flatnonzero(st == 1)[0])
        raise CriticalRayError(f"point ({t.ravel()[i]}, {x.ravel()[i]}) lies on a critical ray")
    if np.any(st == 2):
        i = int(np.flatnonzero(st == 2)[0])
        raise DomainError(
            f"point ({t.ravel()[i]}, {x.ravel()[i]}) lies on a removed strip; give side=+1 or -1"
        )
    return w.reshape(t.shape), wr.reshape(t.shape), jm.reshape(t.shape)


def evaluate_batch(field, t, x, side=None, impl=None):
    g = field.geometry
    u, _, _ = effective_coordinates(g, t, x, "R", side, field.delta0, impl)
    v, _, _ = effective_coordinates(g, t, x, "L", side, field.delta0, impl)
    return field.xiR(u) + field.xiL(v)


def evaluate(field, p, side=0):
    """Field value at ``p = (t, x)``; ``side`` picks a one-sided limit on a strip."""
    return float(evaluate_batch(field, [p[0]], [p[1]], [side])[0])


def minkowski_evaluate(field, t, x):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    return field.xiR(t - x) + field.xiL(t + x)


def minkowski_compare(field, p, side=0):
    """``(politzerValue, minkowskiValue, displaced)`` at ``p``."""
    pol = evaluate(field, p, side)
    mink = float(minkowski_evaluate(field, p[0], p[1]))
    return pol, mink, abs(pol - mink) > 1e-12


@dataclass
class RimReport:
    """Gaps in the two strip identities at sampled positions.

    ``exact*`` use one-sided evaluation on the strips, ``limit*`` use
    Richardson-extrapolated limits from off-strip samples at ``eps`` and
    ``2 eps``, and ``raw*`` are plain differences at distance ``eps``.
    """

    x: np.ndarray
    eps: float
    exactInner: np.ndarray
    exactOuter: np.ndarray
    limitInner: np.ndarray
    limitOuter: np.ndarray
    rawInner: np.ndarray
    rawOuter: np.ndarray

    def max_gap(self, kind="limit"):
        a = getattr(self, kind + "Inner")
        b = getattr(self, kind + "Outer")
        return float(max(np.max(a), np.max(b))) if a.size else 0.0

    def to_json(self):
        return {
            "samples": int(self.x.size),
            "eps": self.eps,
            "maxExactGap": self.max_gap("exact"),
            "maxLimitGap": self.max_gap("limit"),
            "maxRawGap": self.max_gap("raw"),
        }


def rim_check(field, xs, eps=1e-6):
    """Check both strip identities at positions ``xs`` with ``|x| <= L``.

    Inner: the limit from below ``S+`` equals the limit from above ``S-``.
    Outer: the limit from below ``S-`` equals the limit from above ``S+``.
    """
    g = field.geometry
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) > g.L):
        raise DomainError("rim samples must satisfy |x| <= L")
    tau = g.tau
    ones = np.ones_like(xs)

    def ev(t, side=0):
        return evaluate_batch(field, t * ones, xs, side * ones.astype(np.intc))

    def limit(t_rim, direction):
        return 2 * ev(t_rim + direction * eps) - ev(t_rim + 2 * direction * eps)

    exact_inner = np.abs(ev(tau, -1) - ev(-tau, 1))
    exact_outer = np.abs(ev(-tau, -1) - ev(tau, 1))
    lim_inner = np.abs(limit(tau, -1) - limit(-tau, 1))
    lim_outer = np.abs(limit(-tau, -1) - limit(tau, 1))
    raw_inner = np.abs(ev(tau - eps) - ev(-tau + eps))
    raw_outer = np.abs(ev(-tau - eps) - ev(tau + eps))
    return RimReport(xs, eps, exact_inner, exact_outer, lim_inner, lim_outer, raw_inner, raw_outer)


def _x_support(prof, chirality, T):
    # characteristic coordinate w maps to x = s (T - w) on the surface t = T
    s = SIGN[chirality]
    return [tuple(sorted((s * (T - a), s * (T - b)))) for a, b in prof.support()]


def _x_breaks(prof, chirality, T):
    s = SIGN[chirality]
    return s * (T - np.asarray(prof.breakpoints(), dtype=float))


def _surface_data(field, T):
    def value(x):
        return field.xiR(T - x) + field.xiL(T + x)

    def dt(x):
        return field.xiR.derivative(T - x) + field.xiL.derivative(T + x)

    supp = merge_intervals(_x_support(field.xiR, "R", T) + _x_support(field.xiL, "L", T))
    breaks = np.concatenate([_x_breaks(field.xiR, "R", T), _x_breaks(field.xiL, "L", T)])
    return value, dt, supp, breaks


def _intersect(a, b):
    out = []
    for a0, a1 in a:
        for b0, b1 in b:
            lo, hi = max(a0, b0), min(a1, b1)
            if hi > lo:
                out.append((lo, hi))
    return merge_intervals(out)


def symplectic_form(f, g, tSurface=None):
    """``int (d_t f) g - f (d_t g) dx`` over a surface ``t = tSurface < -tau``."""
    if f.geometry != g.geometry:
        raise ContractError("fields live on different geometries")
    geom = f.geometry
    T = geom.t0 if tSurface is None else float(tSurface)
    if not T < -geom.tau:
        raise DomainError(f"surface t={T} is not below the lower strip")
    fv, fd, fs, fb = _surface_data(f, T)
    gv, gd, gs, gb = _surface_data(g, T)

    def integrand(x):
        return fd(x) * gv(x) - fv(x) * gd(x)

    total = 0.0
    breaks = np.unique(np.concatenate([fb, gb]))
    for lo, hi in _intersect(fs, gs):
        pts = np.concatenate([[lo], breaks[(breaks > lo) & (breaks < hi)], [hi]])
        for a, b in zip(pts[:-1], pts[1:]):
            val, _ = quad(integrand, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += val
    return float(total)


def split_movers(t, x, phi, dphi, geometry=None, tol=1e-8):
    """Right and left mover profiles of data ``(phi, d_t phi)`` on the surface ``t``.

    ``x`` is the sample grid.  The data must vanish at both ends of the grid
    and ``d_t phi`` must integrate to zero, otherwise the movers are not
    compactly supported.  End values within ``tol`` are set to exact zeros.
    """
    if geometry is not None and not t < -geometry.tau:
        raise DomainError(f"surface t={t} is not below the lower strip")
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    if x.ndim != 1 or x.shape != phi.shape or x.shape != dphi.shape or x.size < 3:
        raise ContractError("x, phi and dphi must be 1-d arrays of equal length >= 3")
    if np.any(np.diff(x) <= 0):
        raise ContractError("x must be strictly increasing")
    scale = max(np.max(np.abs(phi)), np.max(np.abs(dphi)) * (x[-1] - x[0]), 1.0)
    if max(abs(phi[0]), abs(phi[-1]), abs(dphi[0]), abs(dphi[-1])) > tol * scale:
        raise ContractError("data do not vanish at the ends of the grid")
    Pi = cumulative_simpson(dphi, x=x, initial=0.0)
    if abs(Pi[-1]) > tol * scale:
        raise ContractError(f"d_t phi integrates to {Pi[-1]!r}; movers are not compact")
    right = (phi - Pi) / 2
    left = (phi + Pi) / 2
    for arr in (right, left):
        arr[0] = arr[-1] = 0.0
    R = MoverProfile("R", (t - x)[::-1], right[::-1])
    L = MoverProfile("L", t + x, left)
    return R, L


@dataclass(frozen=True)
class WeylElement:
    phase: complex
    field: PolitzerField

    def __post_init__(self):
        if abs(abs(self.phase) - 1) > 1e-12:
            raise ContractError(f"phase {self.phase!r} is not of unit modulus")

    def adjoint(self):
        return WeylElement(np.conj(self.phase), -self.field)


def weyl(field):
    return WeylElement(1.0 + 0j, field)


def weyl_multiply(w1, w2, tSurface=None):
    """Product ``phase1 phase2 exp(i sigma(f1, f2)/2) w(f1 + f2)``."""
    if w1.field.geometry != w2.field.geometry:
        raise ContractError("Weyl elements live on different geometries")
    sigma = symplectic_form(w1.field, w2.field, tSurface)
    phase = complex(w1.phase) * complex(w2.phase) * np.exp(0.5j * sigma)
    return WeylElement(phase / abs(phase), w1.field + w2.field)


def _gaps(geom, chirality, margin, reach):
    crit = list(_critical(geom, chirality))
    edges = [crit[0] - reach] + crit + [crit[-1] + reach]
    return [(a + margin, b - margin) for a, b in zip(edges[:-1], edges[1:]) if b - a > 2 * margin]


def random_profile(rng, geom, chirality, knots_per_gap=10, margin=1e-2):
    """PCHIP profile filling every gap between consecutive critical coordinates."""
    knots, values = [], []
    for a, b in _gaps(geom, chirality, margin, 2 * geom.tau):
        k = np.linspace(a, b, knots_per_gap)
        v = rng.standard_normal(knots_per_gap)
        v[0] = v[-1] = 0.0
        knots.append(k)
        values.append(v)
    return MoverProfile(chirality, np.concatenate(knots), np.concatenate(values))


def random_field(rng, geom, knots_per_gap=10):
    return PolitzerField(
        geom,
        random_profile(rng, geom, "R", knots_per_gap),
        random_profile(rng, geom, "L", knots_per_gap),
    )


def bump_field(rng, geom, margin=1e-2):
    """Sum of smooth bumps, one per gap between critical coordinates."""
    profs = {}
    for chir in ("R", "L"):
        prof = SumProfile.zero(chir)
        for a, b in _gaps(geom, chir, margin, 2 * geom.tau):
            prof = prof + BumpProfile(chir, (a + b) / 2, (b - a) / 2, rng.uniform(0.5, 2.0))
        profs[chir] = prof
    return PolitzerField(geom, profs["R"], profs["L"])
