"""Localization of constant-time intervals by their Cauchy data on ``t = t0``.

An interval ``I`` at time ``t`` is traced back along both families of null
lines.  The images are unions of open intervals on ``t = t0`` (in the spatial
coordinate there), cut at the positions of critical null lines.  Two regions
with the same images generate the same field algebra.
"""

from dataclasses import dataclass

from ..errors import AmbiguityError, ContractError, SolverError
from .geometry import SIGN, trace_characteristic
from .field import _critical

ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class SpacetimeRegion:
    """Finite union of open intervals ``(a, b)`` at constant times ``t``."""

    kind: str
    data: tuple

    def __post_init__(self):
        if self.kind == "interval":
            t, a, b = (float(v) for v in self.data)
            if not a < b:
                raise ContractError(f"interval needs a < b, got ({a}, {b})")
            object.__setattr__(self, "data", (t, a, b))
        elif self.kind == "union":
            parts = tuple(self.data)
            if not parts or not all(isinstance(p, SpacetimeRegion) for p in parts):
                raise ContractError("a union needs at least one region")
            object.__setattr__(self, "data", parts)
        else:
            raise ContractError(f"unsupported region kind {self.kind!r}")

    def intervals(self):
        if self.kind == "interval":
            return [self.data]
        return [iv for part in self.data for iv in part.intervals()]

    def to_json(self):
        return {"intervals": [list(iv) for iv in self.intervals()]}


def interval(t, a, b):
    return SpacetimeRegion("interval", (t, a, b))


def union(*regions):
    return SpacetimeRegion("union", tuple(regions))


def region_from_json(obj):
    try:
        ivs = obj["intervals"]
        parts = [interval(*iv) for iv in ivs]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed region JSON: {exc}") from None
    return parts[0] if len(parts) == 1 else union(*parts)


@dataclass(frozen=True)
class LocalizationData:
    cRight: tuple
    cLeft: tuple

    def to_json(self):
        return {"cRight": [list(iv) for iv in self.cRight], "cLeft": [list(iv) for iv in self.cLeft]}


def _merge_open(intervals, tol):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def _cut(intervals, points, tol):
    out = []
    for a, b in intervals:
        inner = sorted(p for p in points if a + tol < p < b - tol)
        edges = [a] + inner + [b]
        out.extend((lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
    return out


def _propagate(geom, s, t, a, b):
    """Coordinate intervals on ``t0`` reached from ``{t} x (a, b)`` along family ``s``."""
    tau, L = geom.tau, geom.L
    # pieces are (w_lo, w_hi, time, side) with side -1 meaning just below a strip
    pending = [(*sorted((t - s * a, t - s * b)), t, 0)]
    done = []
    steps = 0
    while pending:
        steps += 1
        if steps > 10_000:
            raise SolverError("interval propagation did not terminate")
        w0, w1, cur, side = pending.pop()
        if cur <= geom.t0:
            done.append((w0, w1))
            continue
        if cur > tau or (cur == tau and side == 1):
            T = tau
        elif cur > -tau or (cur == -tau and side == 1):
            T = -tau
        else:
            done.append((w0, w1))
            continue
        x0, x1 = sorted((s * (T - w0), s * (T - w1)))
        edges = [x0] + [e for e in (-L, L) if x0 < e < x1] + [x1]
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            wa, wb = sorted((T - s * lo, T - s * hi))
            if abs((lo + hi) / 2) < L:
                if T == tau:
                    pending.append((wa - 2 * tau, wb - 2 * tau, -tau, -1))
                else:
                    pending.append((wa + 2 * tau, wb + 2 * tau, tau, -1))
            else:
                pending.append((wa, wb, T, -1))
    return done


def localization(geom, region, tol=ENDPOINT_TOL):
    """Images of ``region`` on ``t = t0`` for right and left movers."""
    result = {}
    ivs = region.intervals()
    for t, a, b in ivs:
        if abs(t) == geom.tau and a < geom.L and b > -geom.L:
            raise AmbiguityError(f"interval ({a}, {b}) at t={t} meets a removed strip")
    for chir in ("R", "L"):
        s = SIGN[chir]
        pieces = []
        for t, a, b in ivs:
            for w0, w1 in _propagate(geom, s, t, a, b):
                pieces.append(tuple(sorted((s * (geom.t0 - w0), s * (geom.t0 - w1)))))
        cuts = [s * (geom.t0 - c) for c in _critical(geom, chir)]
        merged = _merge_open(pieces, tol)
        result[chir] = tuple(_cut(merged, cuts, tol))
    return LocalizationData(result["R"], result["L"])


def _same(a, b, tol):
    return len(a) == len(b) and all(
        abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for p, q in zip(a, b)
    )


def regions_equal(geom, r1, r2, tol=1e-9):
    d1 = localization(geom, r1)
    d2 = localization(geom, r2)
    return _same(d1.cRight, d2.cRight, tol) and _same(d1.cLeft, d2.cLeft, tol)


@dataclass(frozen=True)
class Diamond:
    center: tuple
    radius: float

    @property
    def waist(self):
        t, x = self.center
        return interval(t, x - self.radius, x + self.radius)


def ctc_diamonds(geom, uSeed, vSeed, radius):
    """Double cones inside ``P_CTC`` sharing the Cauchy data of two seed bands.

    The seeds are the characteristic coordinates of the centre lines of a right
    band and a left band on ``t0``, each of half-width ``radius``.  Their
    forward traces wind through ``P_CTC``; every crossing of a right segment
    with a left segment whose double cone of radius ``radius`` fits strictly
    inside ``P_CTC`` is returned.
    """
    if not radius > 0:
        raise ContractError("radius must be positive")
    for chir, c in (("R", uSeed), ("L", vSeed)):
        for k in _critical(geom, chir):
            if abs(k - c) < radius:
                raise ContractError(f"seed band around {c} contains critical coordinate {k}")
    horizon = geom.tau + 1.0
    segs = {}
    for chir, c in (("R", uSeed), ("L", vSeed)):
        s = SIGN[chir]
        tr = trace_characteristic(geom, (geom.t0, s * (geom.t0 - c)), chir, "forward",
                                  horizon=horizon)
        segs[chir] = tr.segments
    out = []
    for ra, rb in segs["R"]:
        u = ra[0] - ra[1]
        for la, lb in segs["L"]:
            v = la[0] + la[1]
            t, x = (u + v) / 2, (v - u) / 2
            if not (ra[0] <= t <= rb[0] and la[0] <= t <= lb[0]):
                continue
            if abs(t) + radius < geom.tau and abs(x) + radius < geom.L:
                out.append(Diamond((t, x), radius))
    out.sort(key=lambda d: d.center[1])
    return out
