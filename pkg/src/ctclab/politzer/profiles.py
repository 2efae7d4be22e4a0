"""Compactly supported mover profiles ``xi(w)`` of one characteristic coordinate.

A right mover depends on the retarded coordinate ``u = t - x`` and a left mover
on the advanced coordinate ``v = t + x``.  Profiles support scalar arithmetic;
sums are kept lazily as linear combinations of the original profiles so that
``f + (-f)`` is exactly the zero profile.
"""

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ContractError

CHIRALITIES = ("R", "L")


def _check_chirality(c):
    if c not in CHIRALITIES:
        raise ContractError(f"chirality must be 'R' or 'L', got {c!r}")
    return c


def merge_intervals(intervals, gap=0.0):
    """Sorted union of closed intervals; pieces closer than ``gap`` are joined."""
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + gap:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(iv) for iv in out]


class Profile:
    """Base class: subclasses provide ``_eval``, ``_deriv``, ``support`` and ``breakpoints``."""

    chirality = "R"

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self._eval(w)

    def derivative(self, w):
        w = np.asarray(w, dtype=float)
        return self._deriv(w)

    def terms(self):
        return ((1.0, self),)

    def __add__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        if other.chirality != self.chirality:
            raise ContractError("cannot add profiles of different chirality")
        return SumProfile.combine(self.chirality, self.terms() + other.terms())

    def __mul__(self, c):
        c = float(c)
        return SumProfile.combine(self.chirality, tuple((c * k, p) for k, p in self.terms()))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    @property
    def is_zero(self):
        return False


class MoverProfile(Profile):
    """Monotone piecewise-cubic (PCHIP) profile on a knot grid.

    The values must vanish at both end knots; the profile is zero outside.
    Between two consecutive zero knots the interpolant is identically zero,
    so zero runs split the support.
    """

    def __init__(self, chirality, knots, values, derivativeOfCompactSupport=False):
        self.chirality = _check_chirality(chirality)
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or knots.size < 2 or knots.shape != values.shape:
            raise ContractError("knots and values must be 1-d arrays of equal length >= 2")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ContractError("profile data must be finite")
        if np.any(np.diff(knots) <= 0):
            raise ContractError("knots must be strictly increasing")
        if values[0] != 0 or values[-1] != 0:
            raise ContractError("profile values must vanish at the end knots")
        self.knots = knots
        self.values = values
        self._interp = PchipInterpolator(knots, values, extrapolate=False)
        self._dinterp = self._interp.derivative()
        self.derivativeOfCompactSupport = bool(derivativeOfCompactSupport)
        if self.derivativeOfCompactSupport:
            total = self.integral()
            scale = np.max(np.abs(values)) * (knots[-1] - knots[0])
            if abs(total) > 1e-10 * max(scale, 1.0):
                raise ContractError(f"profile integral {total!r} does not vanish")
        for arr in (self.knots, self.values):
            arr.setflags(write=False)

    def _eval(self, w):
        return np.nan_to_num(self._interp(w), nan=0.0)

    def _deriv(self, w):
        return np.nan_to_num(self._dinterp(w), nan=0.0)

    def integral(self):
        return float(self._interp.integrate(self.knots[0], self.knots[-1]))

    def support(self):
        nz = (self.values[:-1] != 0) | (self.values[1:] != 0)
        pieces = [(self.knots[i], self.knots[i + 1]) for i in np.flatnonzero(nz)]
        return merge_intervals(pieces)

    def breakpoints(self):
        return self.knots

    def to_json(self):
        return {
            "kind": "pchip",
            "chirality": self.chirality,
            "knots": [float(k) for k in self.knots],
            "values": [float(v) for v in self.values],
            "derivativeOfCompactSupport": self.derivativeOfCompactSupport,
        }


def _bump(r):
    inside = np.abs(r) < 1
    q = np.where(inside, 1 - r * r, 1.0)
    return np.where(inside, np.exp(-1 / q), 0.0), q, inside


class BumpProfile(Profile):
    """Smooth bump ``A exp(-1/(1-r^2))`` with ``r = (w - center)/halfWidth``.

    With ``order=1`` the profile is instead ``A b'(r)``, the derivative of a
    compactly supported function (zero total integral).
    """

    def __init__(self, chirality, center, halfWidth, amplitude=1.0, order=0):
        self.chirality = _check_chirality(chirality)
        if not halfWidth > 0:
            raise ContractError("halfWidth must be positive")
        if order not in (0, 1):
            raise ContractError("order must be 0 or 1")
        self.center = float(center)
        self.halfWidth = float(halfWidth)
        self.amplitude = float(amplitude)
        self.order = order
        self.derivativeOfCompactSupport = order == 1

    def _r(self, w):
        return (w - self.center) / self.halfWidth

    def _eval(self, w):
        r = self._r(w)
        b, q, inside = _bump(r)
        if self.order == 0:
            return self.amplitude * b
        return self.amplitude * np.where(inside, b * (-2 * r / q**2), 0.0)

    def _deriv(self, w):
        r = self._r(w)
        b, q, inside = _bump(r)
        g = -2 * r / q**2  # b'/b
        if self.order == 0:
            out = b * g
        else:
            dg = -2 / q**2 - 8 * r * r / q**3
            out = b * (g * g + dg)
        return self.amplitude * np.where(inside, out, 0.0) / self.halfWidth

    def support(self):
        return [(self.center - self.halfWidth, self.center + self.halfWidth)]

    def breakpoints(self):
        return np.array([self.center - self.halfWidth, self.center, self.center + self.halfWidth])

    def to_json(self):
        return {
            "kind": "bump",
            "chirality": self.chirality,
            "center": self.center,
            "halfWidth": self.halfWidth,
            "amplitude": self.amplitude,
            "order": self.order,
        }


class SumProfile(Profile):
    """Linear combination ``sum c_k p_k`` of base profiles of one chirality."""

    def __init__(self, chirality, terms=()):
        self.chirality = _check_chirality(chirality)
        self._terms = tuple(terms)
        self.derivativeOfCompactSupport = all(
            p.derivativeOfCompactSupport for _, p in self._terms
        )

    @classmethod
    def combine(cls, chirality, terms):
        # merge coefficients by object identity, keeping first-seen order
        coef, order = {}, []
        for c, p in terms:
            if id(p) not in coef:
                order.append(p)
                coef[id(p)] = 0.0
            coef[id(p)] += c
        kept = tuple((coef[id(p)], p) for p in order if coef[id(p)] != 0.0)
        if len(kept) == 1 and kept[0][0] == 1.0:
            return kept[0][1]
        return cls(chirality, kept)

    @classmethod
    def zero(cls, chirality):
        return cls(chirality, ())

    def terms(self):
        return self._terms

    @property
    def is_zero(self):
        return not self._terms

    def _eval(self, w):
        out = np.zeros(np.shape(w))
        for c, p in self._terms:
            out = out + c * p(w)
        return out

    def _deriv(self, w):
        out = np.zeros(np.shape(w))
        for c, p in self._terms:
            out = out + c * p.derivative(w)
        return out

    def support(self):
        return merge_intervals([iv for _, p in self._terms for iv in p.support()])

    def breakpoints(self):
        if not self._terms:
            return np.array([])
        return np.unique(np.concatenate([p.breakpoints() for _, p in self._terms]))

    def to_json(self):
        return {
            "kind": "sum",
            "chirality": self.chirality,
            "terms": [{"coef": c, "profile": p.to_json()} for c, p in self._terms],
        }


def profile_from_json(obj, chirality=None):
    try:
        kind = obj.get("kind", "pchip")
        chir = obj.get("chirality", chirality)
        if kind == "pchip":
            return MoverProfile(
                chir, obj["knots"], obj["values"], obj.get("derivativeOfCompactSupport", False)
            )
        if kind == "bump":
            return BumpProfile(
                chir, obj["center"], obj["halfWidth"], obj.get("amplitude", 1.0), obj.get("order", 0)
            )
        if kind == "sum":
            terms = [(float(t["coef"]), profile_from_json(t["profile"], chir)) for t in obj["terms"]]
            return SumProfile.combine(chir, tuple(terms)) if terms else SumProfile.zero(chir)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ContractError(f"malformed profile JSON: {exc}") from None
    raise ContractError(f"unknown profile kind {kind!r}")


def profiles_equal(p, q, tol=1e-12, samples=2001):
    """Numerical equality on the union of both supports."""
    if p.chirality != q.chirality:
        return False
    diff = p - q
    if getattr(diff, "is_zero", False):
        return True
    for a, b in diff.support():
        w = np.union1d(np.linspace(a, b, samples), diff.breakpoints())
        if np.max(np.abs(diff(w))) > tol:
            return False
    return True
