"""Approximate D-CTC states built from product-state sequences.

Given ``U``, ``rhoA`` and a seed ``rhoB``, the sequence

    phi_1 = rhoA (x) seedB,
    phi_n = rhoA (x) Tr_A(U phi_{n-1} U^dagger)    (n >= 2)

keeps the A-marginal fixed at ``rhoA`` while the B-marginal follows the
Heisenberg-dual dynamics.  Its running mean ``omega_N`` satisfies
``|omega_N(U^dagger b U) - omega_N(b)| <= 2 ||b|| / N`` for every ``b`` on B.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError
from .linalg import (
    BipartiteSpace,
    check_density,
    check_unitary,
    matrix_from_json,
    maximally_mixed,
    operator_norm,
    partial_trace,
    trace_norm,
)


@dataclass(frozen=True)
class JointState:
    space: BipartiteSpace
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (self.space.dim, self.space.dim):
            raise DimensionError(f"joint state has shape {rho.shape}, expected {self.space.dim}")


@dataclass
class ExtensionSequence:
    U: np.ndarray
    rhoA: np.ndarray
    seedB: np.ndarray
    states: list

    @property
    def space(self):
        return self.states[0].space

    def __len__(self):
        return len(self.states)


def restrict(s, part):
    """Marginal on ``part``: ``Tr_B`` for A, ``Tr_A`` for B."""
    if part == "A":
        return partial_trace(s.rho, s.space, "B")
    if part == "B":
        return partial_trace(s.rho, s.space, "A")
    raise ValueError(f"part must be 'A' or 'B', got {part!r}")


def u_transform(s, U):
    """State ``c -> phi(U^dagger c U)``, i.e. density ``U rho U^dagger``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != s.rho.shape:
        raise DimensionError(f"U has shape {U.shape}, state has {s.rho.shape}")
    return JointState(s.space, U @ s.rho @ U.conj().T)


def product_extend(rhoA, rhoB):
    rhoA = np.asarray(rhoA, dtype=complex)
    rhoB = np.asarray(rhoB, dtype=complex)
    return JointState(BipartiteSpace(rhoA.shape[0], rhoB.shape[0]), np.kron(rhoA, rhoB))


def build_sequence(U, rhoA, seedB=None, N=1):
    if int(N) < 1:
        raise ContractError("N must be at least 1")
    U = check_unitary(U)
    rhoA = check_density(rhoA)
    dA = rhoA.shape[0]
    if U.shape[0] % dA:
        raise DimensionError(f"U dimension {U.shape[0]} is not a multiple of dimA={dA}")
    dB = U.shape[0] // dA
    seedB = maximally_mixed(dB) if seedB is None else check_density(seedB)
    if seedB.shape[0] != dB:
        raise DimensionError(f"seedB has dimension {seedB.shape[0]}, expected {dB}")
    states = [product_extend(rhoA, seedB)]
    for _ in range(int(N) - 1):
        nextB = restrict(u_transform(states[-1], U), "B")
        states.append(product_extend(rhoA, nextB))
    return ExtensionSequence(U, rhoA, seedB, states)


def average_state(seq, N=None):
    N = len(seq) if N is None else int(N)
    if not 1 <= N <= len(seq):
        raise ContractError(f"N={N} outside 1..{len(seq)}")
    rho = sum(s.rho for s in seq.states[:N]) / N
    return JointState(seq.space, rho)


def _embed_b(b, dA):
    return np.kron(np.eye(dA), np.asarray(b, dtype=complex))


@dataclass
class DeviationReport:
    N: int
    R: float
    deltas: np.ndarray
    telescoped: np.ndarray
    bound: float

    @property
    def max_delta(self):
        return float(np.max(self.deltas)) if len(self.deltas) else 0.0

    @property
    def telescoping_gap(self):
        return float(np.max(np.abs(self.deltas - self.telescoped))) if len(self.deltas) else 0.0

    @property
    def within_bound(self):
        return self.max_delta <= self.bound


def deviation_bound_check(seq, N, bSamples, R):
    """Compare ``delta(b) = |omega_N(U^dagger b U) - omega_N(b)|`` with ``2R/N``.

    Also evaluates the telescoped form ``|Tr((U phi_N U^dagger - phi_1) b)|/N``
    independently so callers can confirm the two agree.
    """
    N = int(N)
    dA = seq.space.dimA
    omega = average_state(seq, N).rho
    U, Ud = seq.U, seq.U.conj().T
    last = u_transform(seq.states[N - 1], U).rho
    first = seq.states[0].rho
    deltas, tele = [], []
    for b in bSamples:
        if operator_norm(b) > R * (1 + 1e-12):
            raise ContractError(f"sample has norm {operator_norm(b)!r} > R={R!r}")
        B = _embed_b(b, dA)
        deltas.append(abs(np.trace(omega @ (Ud @ B @ U - B))))
        tele.append(abs(np.trace((last - first) @ B)) / N)
    return DeviationReport(N, float(R), np.array(deltas), np.array(tele), 2 * R / N)


def marginal_residual(state, rhoA):
    return float(np.max(np.abs(restrict(state, "A") - rhoA)))


def partial_transpose(rho, space, over="B"):
    t = np.asarray(rho).reshape(space.dimA, space.dimB, space.dimA, space.dimB)
    if over == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(space.dim, space.dim)


def is_ppt(state, tol=1e-10):
    """Peres criterion; decides separability on 2x2 and 2x3 spaces."""
    pt = partial_transpose(state.rho, state.space)
    return bool(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0] >= -tol)


def cauchy_gap(seq, N):
    """``||omega_2N - omega_N||_1``; needs a sequence of length at least 2N."""
    return trace_norm(average_state(seq, 2 * N).rho - average_state(seq, N).rho)


def random_b_samples(rng, dB, k, R):
    """``k`` operators on B with operator norms spread over ``(0, R]``."""
    out = []
    for i in range(k):
        g = rng.standard_normal((dB, dB)) + 1j * rng.standard_normal((dB, dB))
        if i % 2:
            g = g + g.conj().T
        scale = R * (1.0 if i < 2 else rng.uniform(0.1, 1.0))
        out.append(g * (scale / operator_norm(g)))
    return out


def default_grid(n):
    grid = {n}
    k = 1
    while k <= n:
        for m in (1, 2, 5):
            if m * k <= n:
                grid.add(m * k)
        k *= 10
    return sorted(grid)


def run_spec(spec):
    """Execute a run-spec mapping; returns rows ``(N, maxDelta, 2R/N, marginalResidual)``."""
    from .linalg import make_rng

    try:
        U = matrix_from_json(spec["U"])
        rhoA = matrix_from_json(spec["rhoA"])
        n = int(spec["N"])
    except KeyError as exc:
        raise ContractError(f"run spec missing field {exc}") from None
    seedB = spec.get("seedB")
    seedB = None if seedB is None else matrix_from_json(seedB)
    R = float(spec.get("R", 1.0))
    k = int(spec.get("samplesB", 20))
    rng = make_rng(int(spec.get("seed", 0)))
    grid = [int(v) for v in spec.get("Ns", default_grid(n))]
    eps = spec.get("epsilon")
    if eps is not None and "Ns" not in spec:
        # smallest N guaranteed to reach the requested accuracy
        needed = int(np.floor(2 * R / float(eps))) + 1
        if needed <= n:
            grid = sorted(set(grid) | {needed})
    if not grid or max(grid) > n or min(grid) < 1:
        raise ContractError(f"Ns must lie in 1..{n}")
    seq = build_sequence(U, rhoA, seedB, n)
    samples = random_b_samples(rng, seq.space.dimB, k, R)
    rows = []
    for N in grid:
        rep = deviation_bound_check(seq, N, samples, R)
        resid = marginal_residual(average_state(seq, N), seq.rhoA)
        rows.append((N, rep.max_delta, rep.bound, resid))
    return rows
