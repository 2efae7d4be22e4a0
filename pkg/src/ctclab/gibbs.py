"""Gibbs states of the harmonic oscillator in the high-temperature limit.

With levels ``E_n = n + 1/2`` the Gibbs state at inverse temperature ``beta``
gives every finite-rank projector an expectation of at most ``rank / Z_beta``,
which vanishes as ``beta -> 0``.  Any fixed density matrix instead gives the
projectors ``p_k`` onto the lowest ``k`` levels expectations tending to one.
So the high-temperature limit is not a density-matrix state.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, TruncationError


def _check_beta(beta):
    beta = float(beta)
    if not beta > 0 or not math.isfinite(beta):
        raise DomainError(f"beta must be positive and finite, got {beta!r}")
    return beta


def partition_function(beta):
    """``Z = sum_n exp(-beta (n + 1/2)) = exp(-beta/2) / (1 - exp(-beta))``."""
    beta = _check_beta(beta)
    return math.exp(-beta / 2) / -math.expm1(-beta)


def partial_partition_sum(beta, n):
    """Sum over the lowest ``n`` levels, accumulated with ``math.fsum``."""
    beta = _check_beta(beta)
    return math.fsum(np.exp(-beta * (np.arange(n) + 0.5)))


def tail_bound(beta, n):
    """``sum_{m >= n} exp(-beta (m + 1/2))``, the weight dropped by keeping ``n`` levels."""
    beta = _check_beta(beta)
    return math.exp(-beta * (n + 0.5)) / -math.expm1(-beta)


def default_truncation(beta):
    return max(200, math.ceil(30 / _check_beta(beta)))


@dataclass(frozen=True)
class OscillatorGibbs:
    beta: float
    truncation: int = None

    def __post_init__(self):
        beta = _check_beta(self.beta)
        n = default_truncation(beta) if self.truncation is None else int(self.truncation)
        if n < 1:
            raise ContractError(f"truncation must be at least 1, got {n}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "truncation", n)

    @property
    def Z(self):
        return partition_function(self.beta)

    def weights(self):
        """Boltzmann weights of the kept levels (unnormalized)."""
        return np.exp(-self.beta * (np.arange(self.truncation) + 0.5))

    def relative_tail(self):
        """Dropped fraction of ``Z``; equals ``exp(-beta * truncation)``."""
        return tail_bound(self.beta, self.truncation) / self.Z


class FiniteRankObservable:
    """Operator with finitely many nonzero entries in the energy eigenbasis.

    Diagonal operators are stored by their diagonal only.
    """

    def __init__(self, matrix=None, diagonal=None):
        if (matrix is None) == (diagonal is None):
            raise ContractError("give exactly one of matrix or diagonal")
        if matrix is not None:
            m = np.asarray(matrix, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.size == 0:
                raise ContractError(f"observable must be a square matrix, got shape {m.shape}")
            self.matrix = m
            self.matrix.setflags(write=False)
            self.diagonalWeights = np.diag(m).copy()
        else:
            d = np.asarray(diagonal, dtype=complex)
            if d.ndim != 1 or d.size == 0:
                raise ContractError("diagonal must be a non-empty 1-d array")
            self.matrix = None
            self.diagonalWeights = d.copy()
        if not np.all(np.isfinite(self.diagonalWeights)):
            raise ContractError("observable has non-finite entries")

    @classmethod
    def diagonal(cls, weights):
        return cls(diagonal=weights)

    @property
    def dim(self):
        return self.diagonalWeights.size

    @property
    def norm(self):
        if self.matrix is None:
            return float(np.max(np.abs(self.diagonalWeights)))
        return float(np.linalg.norm(self.matrix, 2))

    @property
    def s(self):
        """``sum_n <psi_n, p psi_n>``; the rank for a projector."""
        return float(np.sum(self.diagonalWeights).real)

    def is_projector(self, tol=1e-10):
        if self.matrix is None:
            d = self.diagonalWeights
            return bool(np.all(np.minimum(np.abs(d), np.abs(d - 1)) <= tol))
        m = self.matrix
        return bool(
            np.max(np.abs(m @ m - m)) <= tol and np.max(np.abs(m - m.conj().T)) <= tol
        )


def lowest_levels_projector(k):
    """Projector ``p_k`` onto the lowest ``k`` levels (rank ``k``)."""
    if int(k) < 1:
        raise ContractError(f"k must be at least 1, got {k}")
    return FiniteRankObservable.diagonal(np.ones(int(k)))


def ground_projector():
    return lowest_levels_projector(1)


def truncated_identity(n):
    return FiniteRankObservable.diagonal(np.ones(int(n)))


@dataclass(frozen=True)
class Expectation:
    value: float
    errorBound: float


def gibbs_expectation(g, a, tol=1e-12, with_bound=False):
    """``(1/Z) sum_n exp(-beta E_n) <psi_n, a psi_n>`` over the kept levels.

    The error from dropped levels is at most ``||a|| * tail / Z``; a larger
    value than ``tol`` raises :class:`TruncationError`.
    """
    if a.dim > g.truncation:
        raise TruncationError(f"observable has {a.dim} levels, truncation keeps {g.truncation}")
    bound = a.norm * g.relative_tail()
    if bound > tol:
        raise TruncationError(f"tail error bound {bound:.3g} exceeds tolerance {tol:.3g}")
    w = g.weights()[: a.dim]
    total = np.sum(w * a.diagonalWeights)
    value = total.real if total.imag == 0 else total
    value = value / g.Z
    return Expectation(value, bound) if with_bound else value


def projector_decay_scan(p, betas, tol=1e-12):
    """Rows ``(beta, omega_beta(p), s / Z_beta)`` over a descending ``betas`` grid."""
    betas = [_check_beta(b) for b in betas]
    if any(b2 >= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ContractError("betas must be strictly descending")
    rows = []
    for beta in betas:
        g = OscillatorGibbs(beta)
        rows.append((beta, float(gibbs_expectation(g, p, tol)), p.s / g.Z))
    return rows


def normality_contradiction_report(betas, kMax, betaStar=1.0, ks=None):
    """Two incompatible limits for the projectors ``p_k``.

    ``densityColumn`` holds ``Tr(rho p_k)`` for the Gibbs density matrix at
    ``betaStar``, which tends to one in ``k``.  ``gibbsTable`` holds
    ``omega_beta(p_k)`` for each ``beta``, which tends to zero as ``beta``
    decreases for every fixed ``k``.
    """
    kMax = int(kMax)
    rho = OscillatorGibbs(betaStar)
    density = [
        (k, float(gibbs_expectation(rho, lowest_levels_projector(k)))) for k in range(1, kMax + 1)
    ]
    ks = sorted({1, kMax} if ks is None else {int(k) for k in ks})
    table = []
    for beta in betas:
        g = OscillatorGibbs(beta)
        for k in ks:
            val = float(gibbs_expectation(g, lowest_levels_projector(k)))
            table.append((float(beta), k, val, k / g.Z))
    return {
        "betaStar": float(betaStar),
        "densityColumn": density,
        "gibbsTable": table,
        "identity": [(float(b), identity_expectation(b)) for b in betas],
    }


def identity_expectation(beta):
    """Expectation of the identity truncated to the default kept levels."""
    g = OscillatorGibbs(beta)
    return float(gibbs_expectation(g, truncated_identity(g.truncation)))
