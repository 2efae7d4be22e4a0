"""The D-CTC consistency condition as a fixed-point problem on the B system.

For a unitary ``U`` on ``H_A (x) H_B`` and a state ``rhoA`` the induced map is

    Phi(rhoB) = Tr_A(U^dagger (rhoA (x) rhoB) U)

Note the ordering ``U^dagger rho U``: states are conjugated by the adjoint
first, not ``U rho U^dagger`` as in most circuit texts.  Swapping ``U`` for
``U^dagger`` converts between the two conventions.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ContractError, DimensionError, SolverError
from .linalg import (
    BipartiteSpace,
    check_density,
    check_unitary,
    matrix_from_json,
    matrix_to_json,
    maximally_mixed,
    null_space,
    partial_trace,
    trace_norm,
    unvec,
    vec,
)


@dataclass(frozen=True)
class CTCChannel:
    space: BipartiteSpace
    U: np.ndarray
    rhoA: np.ndarray

    def __post_init__(self):
        U = check_unitary(self.U)
        if U.shape[0] != self.space.dim:
            raise DimensionError(
                f"U has dimension {U.shape[0]}, joint space has {self.space.dim}"
            )
        rhoA = check_density(self.rhoA)
        if rhoA.shape[0] != self.space.dimA:
            raise DimensionError(f"rhoA has dimension {rhoA.shape[0]}, expected {self.space.dimA}")
        for name, arr in (("U", U), ("rhoA", rhoA)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_matrices(cls, U, rhoA):
        U = np.asarray(U, dtype=complex)
        rhoA = np.asarray(rhoA, dtype=complex)
        dA = rhoA.shape[0]
        if U.shape[0] % dA:
            raise DimensionError(f"U dimension {U.shape[0]} is not a multiple of dimA={dA}")
        return cls(BipartiteSpace(dA, U.shape[0] // dA), U, rhoA)

    def kraus(self):
        """Kraus operators ``K`` with ``Phi(X) = sum K X K^dagger``."""
        dA, dB = self.space.dimA, self.space.dimB
        p, vecs = np.linalg.eigh(self.rhoA)
        Ud = self.U.conj().T.reshape(dA, dB, dA, dB)
        ops = []
        for weight, psi in zip(p, vecs.T):
            if weight <= 0:
                continue
            # block (a, psi) of U^dagger: <a| U^dagger |psi>
            blocks = np.einsum("aibj,b->aij", Ud, psi)
            ops.extend(np.sqrt(weight) * blocks)
        return ops


@dataclass
class FixedPointResult:
    canonical: np.ndarray
    basis: list
    residual: float
    iterations: int = 0
    method: str = "ergodic-projection"

    @property
    def subspace_dim(self):
        return len(self.basis)

    def to_json(self):
        return {
            "residual": self.residual,
            "subspaceDim": self.subspace_dim,
            "iterations": self.iterations,
            "method": self.method,
            "canonical": matrix_to_json(self.canonical),
            "basis": [matrix_to_json(h) for h in self.basis],
        }


def _apply(ch, X):
    joint = np.kron(ch.rhoA, X)
    return partial_trace(ch.U.conj().T @ joint @ ch.U, ch.space, "A")


def ctc_map(ch, rhoB):
    """``Tr_A(U^dagger (rhoA (x) rhoB) U)`` as a validated density matrix."""
    rhoB = np.asarray(rhoB, dtype=complex)
    if rhoB.shape != (ch.space.dimB, ch.space.dimB):
        raise DimensionError(f"rhoB has shape {rhoB.shape}, expected dimB={ch.space.dimB}")
    return check_density(_apply(ch, rhoB))


def channel_superoperator(ch):
    """Matrix ``M`` with ``vec(Phi(X)) = M vec(X)`` for column-stacking ``vec``."""
    d = ch.space.dimB
    M = np.zeros((d * d, d * d), dtype=complex)
    for K in ch.kraus():
        M += np.kron(K.conj(), K)
    return M


def _hermitian_basis(R, d):
    """Orthonormal Hermitian basis of the span of the columns of ``R``.

    The span is assumed closed under the adjoint, so the Hermitian and
    anti-Hermitian parts of each element stay inside it.
    """
    parts = []
    for col in R.T:
        X = unvec(col, d)
        parts.append((X + X.conj().T) / 2)
        parts.append((X - X.conj().T) / 2j)
    real = np.array([np.concatenate([vec(h).real, vec(h).imag]) for h in parts]).T
    u, s, _ = np.linalg.svd(real, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return []
    rank = min(int(np.sum(s > 1e-8 * s[0])), R.shape[1])
    basis = []
    for k in range(rank):
        v = u[: d * d, k] + 1j * u[d * d :, k]
        h = unvec(v, d)
        h = (h + h.conj().T) / 2
        basis.append(h / np.linalg.norm(h))
    return basis


def _project_affine(basis, Y):
    """Hilbert-Schmidt projection of ``Y`` onto ``{X in span(basis): Tr X = 1}``."""
    t = np.array([np.trace(h).real for h in basis])
    c0 = np.array([np.vdot(h, Y).real for h in basis])
    tt = t @ t
    if tt == 0:
        raise SolverError("fixed subspace contains no unit-trace element")
    c = c0 + (1 - c0 @ t) / tt * t
    return sum(ci * h for ci, h in zip(c, basis))


def _as_state(X, tol):
    X = (X + X.conj().T) / 2
    w, v = np.linalg.eigh(X)
    if w[0] < -tol:
        return None
    w = np.clip(w, 0.0, None)
    X = (v * w) @ v.conj().T
    return X / np.trace(X).real


def solve_fixed_points(ch, tol=1e-10, max_cesaro=1_000_000):
    """Solve ``Phi(rho) = rho``.

    The canonical solution is the Cesaro limit from the maximally mixed state,
    obtained in closed form from the ergodic projector ``P = R (L^dagger R)^-1
    L^dagger`` built from right/left null spaces of ``M - I``.
    """
    if tol <= 0:
        raise ContractError("tol must be positive")
    d = ch.space.dimB
    M = channel_superoperator(ch)
    eye = np.eye(d * d)
    R = null_space(M - eye, tol)
    if R.shape[1] == 0:
        raise SolverError(f"no fixed direction found at tol={tol}; loosen the tolerance")
    basis = _hermitian_basis(R, d)
    seed = maximally_mixed(d)

    def residual(X):
        return float(np.linalg.norm(unvec(M @ vec(X), d) - X))

    Lf = null_space(M.conj().T - eye, tol)
    if Lf.shape[1] == R.shape[1]:
        G = Lf.conj().T @ R
        if np.linalg.cond(G) < 1e12:
            P = R @ np.linalg.solve(G, Lf.conj().T)
            cand = _as_state(unvec(P @ vec(seed), d), tol)
            if cand is not None and residual(cand) <= tol:
                return FixedPointResult(cand, basis, residual(cand))

    cand = _as_state(_project_affine(basis, seed), tol)
    if cand is not None and residual(cand) <= tol:
        return FixedPointResult(cand, basis, residual(cand), method="affine-projection")

    N = 1000
    while N <= max_cesaro:
        avg, _, _ = kernels.cesaro(M, vec(seed), N)
        polished = _as_state(_project_affine(basis, unvec(avg, d)), tol)
        if polished is not None and residual(polished) <= tol:
            return FixedPointResult(polished, basis, residual(polished), N, "cesaro")
        N *= 10
    raise SolverError(f"no positive unit-trace fixed point reached at tol={tol}")


def cesaro_iterate(ch, rhoB0, N, keep_orbit=True):
    """Orbit ``Phi^n(rhoB0)`` for ``n < N`` and its running mean.

    Returns ``(average, orbit)``; ``orbit`` has shape ``(N, dimB, dimB)`` or is
    ``None`` when ``keep_orbit`` is false.
    """
    if int(N) < 1:
        raise ContractError("N must be at least 1")
    d = ch.space.dimB
    rho0 = check_density(rhoB0)
    if rho0.shape[0] != d:
        raise DimensionError(f"rhoB0 has dimension {rho0.shape[0]}, expected {d}")
    M = channel_superoperator(ch)
    avg, orbit, _ = kernels.cesaro(M, vec(rho0), int(N), keep_orbit)
    average = check_density(unvec(avg, d))
    if orbit is not None:
        orbit = orbit.reshape(int(N), d, d).transpose(0, 2, 1)
    return average, orbit


def verify_dctc(ch, rhoB):
    """Trace-norm residual ``||Phi(rhoB) - rhoB||_1``."""
    rhoB = np.asarray(rhoB, dtype=complex)
    if rhoB.shape != (ch.space.dimB, ch.space.dimB):
        raise DimensionError(f"rhoB has shape {rhoB.shape}, expected dimB={ch.space.dimB}")
    return trace_norm(_apply(ch, rhoB) - rhoB)


def channel_from_json(obj):
    try:
        dA, dB = int(obj["dimA"]), int(obj["dimB"])
        U = matrix_from_json(obj["U"])
        rhoA = matrix_from_json(obj["rhoA"])
    except KeyError as exc:
        raise ContractError(f"channel JSON missing field {exc}") from None
    return CTCChannel(BipartiteSpace(dA, dB), U, rhoA)


def channel_to_json(ch):
    return {
        "dimA": ch.space.dimA,
        "dimB": ch.space.dimB,
        "U": matrix_to_json(ch.U),
        "rhoA": matrix_to_json(ch.rhoA),
    }


def random_channel(rng, dimA, dimB):
    from .linalg import random_density, random_unitary

    return CTCChannel(
        BipartiteSpace(dimA, dimB),
        random_unitary(rng, dimA * dimB),
        random_density(rng, dimA),
    )
