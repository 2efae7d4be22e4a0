"""Politzer spacetime: Minkowski plane with two identified strips.

The strips ``S+ = {t = tau, |x| <= L}`` and ``S- = {t = -tau, |x| <= L}`` are
removed and glued crosswise: the region just below ``S+`` continues just above
``S-`` (inner wrap) and the region just above ``S+`` continues just below
``S-`` (outer jump).  The slab between the strips is the causality-violating
region ``P_CTC``.  Fields are anchored by their Cauchy data on ``t = t0``.

A null line is labelled by its chirality and characteristic coordinate:
``u = t - x`` for right movers (``s = +1``), ``v = t + x`` for left movers
(``s = -1``), so in both cases ``w = t - s x``.
"""

import math
from dataclasses import dataclass, field

from ..errors import ContractError, CriticalRayError, DomainError, SolverError

DELTA0 = 1e-6
SIGN = {"R": 1, "L": -1}


@dataclass(frozen=True)
class PolitzerGeometry:
    tau: float
    L: float
    t0: float

    def __post_init__(self):
        for name in ("tau", "L", "t0"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ContractError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not self.tau > 0:
            raise ContractError(f"tau must be positive, got {self.tau!r}")
        if not self.L > 0:
            raise ContractError(f"L must be positive, got {self.L!r}")
        if not self.t0 < -self.tau:
            raise ContractError(f"t0 must lie below -tau, got t0={self.t0!r}")

    def endpoints(self):
        return [(T, X) for T in (self.tau, -self.tau) for X in (-self.L, self.L)]

    def on_strip(self, t, x):
        return abs(t) == self.tau and abs(x) <= self.L

    def in_ctc(self, t, x):
        return abs(t) < self.tau and abs(x) < self.L

    def to_json(self):
        return {"tau": self.tau, "L": self.L, "t0": self.t0}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["tau"], obj["L"], obj["t0"])
        except (KeyError, TypeError) as exc:
            raise ContractError(f"malformed geometry JSON: {exc}") from None


@dataclass(frozen=True)
class LightRay:
    chirality: str
    coordinate: float
    endpoint: tuple


def lightray_set(geom):
    """The eight null lines through the strip endpoints."""
    rays = []
    for T, X in geom.endpoints():
        rays.append(LightRay("R", T - X, (T, X)))
        rays.append(LightRay("L", T + X, (T, X)))
    return rays


def coordinate(chirality, t, x):
    return t - SIGN[chirality] * x


@dataclass
class CharacteristicTrace:
    chirality: str
    direction: str
    segments: list = field(default_factory=list)
    jumps: list = field(default_factory=list)
    terminal: tuple = None
    coordinate: float = None

    @property
    def wraps(self):
        return sum(1 for j in self.jumps if j[2] == "innerWrap")

    @property
    def outer_jumps(self):
        return sum(1 for j in self.jumps if j[2] == "outerJump")

    def polyline_rows(self):
        """``(t, x, segmentId)`` rows, two per segment."""
        rows = []
        for k, (a, b) in enumerate(self.segments):
            rows.append((a[0], a[1], k))
            rows.append((b[0], b[1], k))
        return rows


def _max_steps(geom):
    return int(math.ceil(geom.L / geom.tau)) + 8


def trace_characteristic(geom, p, chirality, direction="backward", side=0, horizon=None,
                         delta=DELTA0):
    """Follow the null line of ``chirality`` through ``p`` across the identifications.

    ``side`` (+1 above, -1 below) selects the one-sided limit for a point
    lying exactly on a strip.  Backward traces end on ``t = t0``; forward
    traces end at ``horizon``.  Passing within ``delta`` of a strip endpoint
    raises :class:`CriticalRayError`.
    """
    if chirality not in SIGN:
        raise ContractError(f"chirality must be 'R' or 'L', got {chirality!r}")
    if direction not in ("backward", "forward"):
        raise ContractError(f"direction must be 'backward' or 'forward', got {direction!r}")
    t, x = float(p[0]), float(p[1])
    if geom.on_strip(t, x) and side not in (1, -1):
        raise DomainError(f"point ({t}, {x}) lies on a removed strip; give side=+1 or -1")
    s = SIGN[chirality]
    tau, L = geom.tau, geom.L
    w = t - s * x
    tr = CharacteristicTrace(chirality, direction)
    start, cur_t, cur_side = (t, x), t, side
    if direction == "backward":
        if t <= geom.t0:
            end = (geom.t0, s * (geom.t0 - w))
            tr.segments.append((start, end))
            tr.terminal, tr.coordinate = end, w
            return tr
        for _ in range(_max_steps(geom)):
            if cur_t > tau or (cur_t == tau and cur_side == 1):
                T = tau
            elif cur_t > -tau or (cur_t == -tau and cur_side == 1):
                T = -tau
            else:
                end = (geom.t0, s * (geom.t0 - w))
                tr.segments.append((start, end))
                tr.terminal, tr.coordinate = end, w
                return tr
            xT = s * (T - w)
            if abs(abs(xT) - L) < delta:
                raise CriticalRayError(f"trace from ({t}, {x}) passes a strip endpoint at ({T}, {xT})")
            if abs(xT) < L:
                end = (T, xT)
                tr.segments.append((start, end))
                if T == tau:
                    start, rule, w = (-tau, xT), "outerJump", w - 2 * tau
                else:
                    start, rule, w = (tau, xT), "innerWrap", w + 2 * tau
                tr.jumps.append((end, start, rule))
                cur_t = start[0]
            else:
                cur_t = T
            cur_side = -1
        raise SolverError("backward trace did not terminate")

    horizon = max(t, tau) + 2 * (L + tau) if horizon is None else float(horizon)
    if horizon <= t:
        raise ContractError(f"horizon {horizon} must lie above the start time {t}")
    for _ in range(_max_steps(geom)):
        if cur_t < -tau or (cur_t == -tau and cur_side == -1):
            T = -tau
        elif cur_t < tau or (cur_t == tau and cur_side == -1):
            T = tau
        else:
            T = None
        if T is None or T > horizon:
            end = (horizon, s * (horizon - w))
            tr.segments.append((start, end))
            tr.terminal, tr.coordinate = end, w
            return tr
        xT = s * (T - w)
        if abs(abs(xT) - L) < delta:
            raise CriticalRayError(f"trace from ({t}, {x}) passes a strip endpoint at ({T}, {xT})")
        if abs(xT) < L:
            end = (T, xT)
            tr.segments.append((start, end))
            if T == -tau:
                start, rule, w = (tau, xT), "outerJump", w + 2 * tau
            else:
                start, rule, w = (-tau, xT), "innerWrap", w - 2 * tau
            tr.jumps.append((end, start, rule))
            cur_t = start[0]
        else:
            cur_t = T
        cur_side = 1
    raise SolverError("forward trace did not terminate")


def wrap_bound(geom, x):
    """Upper bound on inner wraps of a backward trace starting at position ``x``."""
    return int(math.ceil((geom.L + abs(x)) / (2 * geom.tau))) + 1


def critical_coordinates(geom, chirality, eta=1e-3):
    """Characteristic coordinates on ``t = t0`` whose null lines meet a strip endpoint.

    Points on eight sectors around each endpoint are traced back; each
    sector's image, shifted back to the endpoint itself, is a critical
    coordinate.  Sorted and de-duplicated.
    """
    s = SIGN[chirality]
    found = []
    for T, X in geom.endpoints():
        for k in range(8):
            ang = k * math.pi / 4 + math.pi / 8
            p = (T + eta * math.sin(ang), X + eta * math.cos(ang))
            try:
                tr = trace_characteristic(geom, p, chirality)
            except CriticalRayError:
                continue
            shift = 2 * geom.tau * (tr.wraps - tr.outer_jumps)
            found.append((T - s * X) + shift)
    found.sort()
    out = []
    for c in found:
        if not out or c - out[-1] > 1e-9:
            out.append(c)
    return out
