"""Comparable correlations on a tripartite space ``H1 (x) H2 (x) H3``.

The unitary acts on factors 1 and 2 (embedded as ``U12 (x) I3``), so it
commutes with every observable of factor 3.  Two routes measure how far the
correlations of ``psi`` and ``U psi`` between factors 1 and 3 differ:

* the modulus estimates with parameter ``q`` (:func:`min_q`), solved exactly
  per observable pair;
* the two-sided norm bounds with constant ``K`` (:func:`min_K`), measured by
  sweeping the relative phase of ``a1`` and ``a3``.

When the factor-1 marginal is invariant under ``U`` the two agree through
``K**2 = q + 1``.  Sampled observables only give lower bounds on the true
supremum over the algebras.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError
from .linalg import (
    matrix_from_json,
    matrix_to_json,
    random_state_vector,
    random_unitary,
)

GOLDEN = (np.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class CorrelationInstance:
    dims: tuple
    psi: np.ndarray
    U12: np.ndarray
    samplesA1: tuple
    samplesA3: tuple

    def __post_init__(self):
        d1, d2, d3 = (int(d) for d in self.dims)
        psi = np.asarray(self.psi, dtype=complex).reshape(-1)
        if psi.size != d1 * d2 * d3:
            raise DimensionError(f"psi has {psi.size} entries, expected {d1 * d2 * d3}")
        if abs(np.linalg.norm(psi) - 1) > 1e-12:
            raise ContractError("psi is not a unit vector")
        U12 = np.asarray(self.U12, dtype=complex)
        if U12.shape != (d1 * d2, d1 * d2):
            raise DimensionError(f"U12 has shape {U12.shape}, expected {(d1 * d2,) * 2}")
        if np.max(np.abs(U12.conj().T @ U12 - np.eye(d1 * d2))) > 1e-10:
            raise ContractError("U12 is not unitary")
        for name, samples, d in (("samplesA1", self.samplesA1, d1), ("samplesA3", self.samplesA3, d3)):
            mats = tuple(np.asarray(a, dtype=complex) for a in samples)
            if not mats or any(a.shape != (d, d) for a in mats):
                raise DimensionError(f"{name} must be a non-empty list of {d}x{d} matrices")
            object.__setattr__(self, name, mats)
        object.__setattr__(self, "dims", (d1, d2, d3))
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "U12", U12)

    @property
    def U(self):
        return np.kron(self.U12, np.eye(self.dims[2]))

    def embed1(self, a):
        d1, d2, d3 = self.dims
        return np.kron(a, np.eye(d2 * d3))

    def embed3(self, a):
        d1, d2, d3 = self.dims
        return np.kron(np.eye(d1 * d2), a)


@dataclass
class ComparabilityReport:
    minQ: float
    minK: float
    passed: bool
    worstPair: tuple
    perPairData: list = field(default_factory=list)

    def to_json(self):
        return {
            "minQ": self.minQ,
            "minK": self.minK,
            "passed": self.passed,
            "worstPair": list(self.worstPair),
            "minQIsLowerBound": True,
        }


def gell_mann(d):
    """Identity plus the ``d**2 - 1`` generalized Gell-Mann matrices (Paulis at d=2)."""
    mats = [np.eye(d, dtype=complex)]
    for j, k in itertools.combinations(range(d), 2):
        s = np.zeros((d, d), dtype=complex)
        s[j, k] = s[k, j] = 1
        a = np.zeros((d, d), dtype=complex)
        a[j, k], a[k, j] = -1j, 1j
        mats += [s, a]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2 / (l * (l + 1)))).astype(complex))
    return mats


def default_samples(rng, d, n_random=50):
    """Matrix units, Hermitian generators and seeded Ginibre matrices."""
    units = []
    for j in range(d):
        for k in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = 1
            units.append(e)
    rand = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(n_random)
    ]
    return units + gell_mann(d) + rand


def _marginal1(inst, vec):
    d1 = inst.dims[0]
    m = vec.reshape(d1, -1)
    return m @ m.conj().T


def check_invariance(inst, tol=1e-10):
    """Whether ``<psi, U^dagger a U psi> = <psi, a psi>`` for every sampled a1 and a3."""
    U = inst.U
    phi = U @ inst.psi
    for a, emb in itertools.chain(
        ((a, inst.embed1) for a in inst.samplesA1), ((a, inst.embed3) for a in inst.samplesA3)
    ):
        A = emb(a)
        gap = abs(np.vdot(phi, A @ phi) - np.vdot(inst.psi, A @ inst.psi))
        if gap > tol * max(np.linalg.norm(a, 2), 1e-300):
            return False
    return True


def _require_invariant(inst, tol=1e-9):
    # Both routes use <a1* a1> before and after U, so the whole factor-1
    # marginal must be invariant, not just the sampled expectations.
    rho = _marginal1(inst, inst.psi)
    rho_u = _marginal1(inst, inst.U @ inst.psi)
    if np.max(np.abs(rho - rho_u)) > tol:
        raise ContractError("U does not preserve the factor-1 marginal of psi")


def _sample_vectors(inst, vec):
    A1 = np.array([inst.embed1(a) @ vec for a in inst.samplesA1])
    A3 = np.array([inst.embed3(a) @ vec for a in inst.samplesA3])
    return A1, A3


def _q_one_sided(alpha, beta, gamma):
    """Smallest ``q >= 0`` with ``|alpha - q beta| <= q gamma`` (elementwise).

    Squaring gives ``(gamma^2 - |beta|^2) q^2 + 2 Re(alpha conj(beta)) q -
    |alpha|^2 = 0``; its nonnegative root is written in the cancellation-free
    form ``C / (B + sqrt(B^2 + A C))``.  An ``alpha`` at rounding level
    relative to ``gamma`` counts as zero.
    """
    A = np.maximum(gamma**2 - np.abs(beta) ** 2, 0.0)
    B = np.real(alpha * np.conj(beta))
    C = np.abs(alpha) ** 2
    den = B + np.sqrt(B**2 + A * C)
    zero = np.abs(alpha) <= 1e-13 * gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(zero, 0.0, np.where(den > 0, C / den, np.inf))
    return q


def pair_q(inst):
    """Per-pair minimal ``q`` for each of the two estimates; arrays of shape ``(n1, n3)``."""
    _require_invariant(inst)
    psi = inst.psi
    phi = inst.U @ psi
    X1, X3 = _sample_vectors(inst, psi)
    Y1, Y3 = _sample_vectors(inst, phi)
    d = X1.conj() @ X3.T  # <psi, a1* a3 psi>
    c = Y1.conj() @ Y3.T  # <psi, U* a1* a3 U psi>
    s = (np.sum(np.abs(X1) ** 2, axis=1)[:, None] + np.sum(np.abs(X3) ** 2, axis=1)[None, :])
    q1 = _q_one_sided(c - d, d, s / 2)
    q2 = _q_one_sided(d - c, c, s / 2)
    return q1, q2


def min_q(inst):
    """Smallest ``q`` making both modulus estimates hold over all sampled pairs.

    Returns ``(q, (i, j))`` with the index of the pair attaining it.
    """
    q1, q2 = pair_q(inst)
    q = np.maximum(q1, q2)
    i, j = np.unravel_index(int(np.argmax(q)), q.shape)
    return float(q[i, j]), (int(i), int(j))


def _ratios(Y1, Y3, X1, X3, theta, floor):
    """Norm ratios for operators ``e^{i theta} a1 + a3``.

    Pairs where both norms fall below ``floor`` are treated as ``0/0`` and
    contribute a ratio of one.
    """
    ph = np.exp(1j * theta)[..., None]
    num = np.linalg.norm(ph * Y1 + Y3, axis=-1)
    den = np.linalg.norm(ph * X1 + X3, axis=-1)
    both = (num <= floor) & (den <= floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(both, 1.0, np.where(den > 0, num / den, np.inf))
        r2 = np.where(both, 1.0, np.where(num > 0, den / num, np.inf))
    return r1, r2


def _golden_max(f, lo, hi, iters=40):
    """Vectorized golden-section maximization of unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo.copy(), hi.copy()
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 >= f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
        xn = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        fn = f(xn)
        x1, x2 = np.where(left, xn, x2), np.where(left, x1, xn)
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
    return np.maximum(f1, f2)


def pair_K(inst, phaseGridSize=256, refine=True):
    """Per-pair supremum over the phase of both norm ratios; shape ``(n1, n3)``.

    The grid maximum is polished by golden-section search between the grid
    neighbours of the best phase (each ratio has a single maximum on the
    circle).
    """
    if phaseGridSize < 16:
        raise ContractError("phaseGridSize must be at least 16")
    _require_invariant(inst)
    psi = inst.psi
    phi = inst.U @ psi
    X1, X3 = _sample_vectors(inst, psi)
    Y1, Y3 = _sample_vectors(inst, phi)
    n1, n3 = X1.shape[0], X3.shape[0]
    # pair-broadcast views of shape (n1, n3, dim)
    X1b, X3b = X1[:, None, :], X3[None, :, :]
    Y1b, Y3b = Y1[:, None, :], Y3[None, :, :]
    scale = np.linalg.norm(X1, axis=1)[:, None] + np.linalg.norm(X3, axis=1)[None, :]
    floor = 1e-7 * scale
    step = 2 * np.pi / phaseGridSize
    grid = np.arange(phaseGridSize) * step
    best = np.full((2, n1, n3), -np.inf)
    arg = np.zeros((2, n1, n3), dtype=int)
    for k0 in range(0, phaseGridSize, 32):
        th = grid[k0 : k0 + 32]
        r = _ratios(
            Y1b[..., None, :], Y3b[..., None, :], X1b[..., None, :], X3b[..., None, :],
            th, floor[..., None],
        )
        for w in range(2):
            k = np.argmax(r[w], axis=-1)
            v = np.take_along_axis(r[w], k[..., None], axis=-1)[..., 0]
            upd = v > best[w]
            best[w] = np.where(upd, v, best[w])
            arg[w] = np.where(upd, k0 + k, arg[w])
    if refine:
        for w in range(2):
            ok = np.isfinite(best[w])
            centre = grid[arg[w]]

            def f(theta, w=w):
                return _ratios(Y1b, Y3b, X1b, X3b, theta, floor)[w]

            polished = _golden_max(f, centre - step, centre + step)
            best[w] = np.where(ok, np.maximum(best[w], polished), best[w])
    return np.maximum(best[0], best[1])


def min_K(inst, phaseGridSize=256, refine=True):
    """Smallest ``K >= 1`` for the two-sided norm bounds; returns ``(K, (i, j))``."""
    K = pair_K(inst, phaseGridSize, refine)
    i, j = np.unravel_index(int(np.argmax(K)), K.shape)
    return max(1.0, float(K[i, j])), (int(i), int(j))


def verify_lemma(inst, tol=1e-3, phaseGridSize=256, keep_pairs=False):
    """Check ``minK**2 == minQ + 1`` to relative tolerance ``tol``."""
    q1, q2 = pair_q(inst)
    qp = np.maximum(q1, q2)
    Kp = pair_K(inst, phaseGridSize)
    q = float(np.max(qp))
    K = max(1.0, float(np.max(Kp)))
    worst = tuple(int(v) for v in np.unravel_index(int(np.argmax(qp)), qp.shape))
    if np.isfinite(q) and np.isfinite(K):
        passed = abs(K**2 - (q + 1)) <= tol * (q + 1)
    else:
        passed = False
    per_pair = []
    if keep_pairs:
        for i, j in np.ndindex(qp.shape):
            per_pair.append(((i, j), float(q1[i, j]), float(q2[i, j]), float(Kp[i, j])))
    return ComparabilityReport(q, K, bool(passed), worst, per_pair)


def _instance(rng, dims, psi, U12, n_random):
    d1, _, d3 = dims
    return CorrelationInstance(
        tuple(dims),
        psi,
        U12,
        tuple(default_samples(rng, d1, n_random)),
        tuple(default_samples(rng, d3, n_random)),
    )


def identity_instance(rng, dims=(2, 2, 2), n_random=50):
    d1, d2, d3 = dims
    psi = random_state_vector(rng, d1 * d2 * d3)
    return _instance(rng, dims, psi, np.eye(d1 * d2, dtype=complex), n_random)


def local_instance(rng, dims=(2, 2, 2), n_random=50):
    """``U = I1 (x) V`` with ``V`` Haar on factor 2."""
    d1, d2, d3 = dims
    psi = random_state_vector(rng, d1 * d2 * d3)
    U12 = np.kron(np.eye(d1), random_unitary(rng, d2))
    return _instance(rng, dims, psi, U12, n_random)


def random_instance(rng, dims=(2, 2, 2), n_random=50):
    """Entangled ``psi`` and a ``U`` that preserves its factor-1 marginal.

    ``U12 = sum_k |e_k><e_k| (x) exp(i phi_k) V``, a gate controlled on the
    eigenbasis of the factor-1 marginal, with random phases and Haar ``V``.
    """
    d1, d2, d3 = dims
    psi = random_state_vector(rng, d1 * d2 * d3)
    m = psi.reshape(d1, -1)
    _, E = np.linalg.eigh(m @ m.conj().T)
    phases = np.exp(2j * np.pi * rng.uniform(size=d1))
    W = (E * phases) @ E.conj().T
    U12 = np.kron(W, random_unitary(rng, d2))
    return _instance(rng, dims, psi, U12, n_random)


def instance_from_json(obj, rng=None):
    from .linalg import make_rng

    try:
        dims = tuple(int(d) for d in obj["dims"])
        psi = np.array([complex(re, im) for re, im in obj["psi"]])
        U12 = matrix_from_json(obj["U12"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed instance JSON: {exc}") from None
    if len(dims) != 3:
        raise DimensionError("dims must have three entries")
    rng = rng or make_rng(int(obj.get("seed", 0)))
    n_random = int(obj.get("randomSamples", 50))
    s1 = obj.get("samplesA1")
    s3 = obj.get("samplesA3")
    s1 = [matrix_from_json(m) for m in s1] if s1 else default_samples(rng, dims[0], n_random)
    s3 = [matrix_from_json(m) for m in s3] if s3 else default_samples(rng, dims[2], n_random)
    return CorrelationInstance(dims, psi, U12, tuple(s1), tuple(s3))


def instance_to_json(inst, include_samples=False):
    out = {
        "dims": list(inst.dims),
        "psi": [[float(z.real), float(z.imag)] for z in inst.psi],
        "U12": matrix_to_json(inst.U12),
    }
    if include_samples:
        out["samplesA1"] = [matrix_to_json(a) for a in inst.samplesA1]
        out["samplesA3"] = [matrix_to_json(a) for a in inst.samplesA3]
    return out
