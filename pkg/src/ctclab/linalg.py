"""Dense complex linear algebra on small bipartite spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Joint indices of
``H_A (x) H_B`` follow the Kronecker convention ``i = iA * dimB + iB``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError

DIM_CAP = 4096
TOL = 1e-10


@dataclass(frozen=True)
class BipartiteSpace:
    dimA: int
    dimB: int

    def __post_init__(self):
        if int(self.dimA) < 1 or int(self.dimB) < 1:
            raise DimensionError(f"dimensions must be positive, got {self.dimA}, {self.dimB}")

    @property
    def dim(self):
        return self.dimA * self.dimB


def as_matrix(m):
    """Return ``m`` as a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ContractError("matrix has non-finite entries")
    return a


def _square(m):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def tensor_product(a, b, cap=DIM_CAP):
    """Kronecker product ``a (x) b`` with ``a`` as the major index."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise DimensionError(f"joint dimension {max(rows, cols)} exceeds cap {cap}")
    return np.kron(a, b)


def partial_trace(m, space, over):
    """Trace out subsystem ``over`` (``"A"`` or ``"B"``) of an operator on ``space``.

    Returns a ``dimB x dimB`` matrix for ``over="A"`` and ``dimA x dimA`` for
    ``over="B"``.
    """
    m = _square(m)
    dA, dB = space.dimA, space.dimB
    if m.shape[0] != dA * dB:
        raise DimensionError(f"matrix of size {m.shape[0]} does not live on {dA}x{dB}")
    t = m.reshape(dA, dB, dA, dB)
    if over == "A":
        return np.einsum("ijik->jk", t)
    if over == "B":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"over must be 'A' or 'B', got {over!r}")


def is_hermitian(m, tol=TOL):
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def hermitian_eigensystem(h, tol=1e-8):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns) of ``h``."""
    h = _square(h)
    if not is_hermitian(h, tol):
        raise ContractError("hermitian_eigensystem called on a non-Hermitian matrix")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return w, v


def null_space(m, tol=TOL):
    """Orthonormal basis (columns) of the numerical kernel of ``m``.

    A right singular vector belongs to the basis when its singular value is at
    most ``tol * max(sigma_max, 1)``, so matrices that are zero up to rounding
    have the full space as kernel.
    """
    m = as_matrix(m)
    _, s, vh = np.linalg.svd(m)
    n = m.shape[1]
    smax = s[0] if s.size else 0.0
    full = np.zeros(n)
    full[: s.size] = s
    keep = full <= tol * max(smax, 1.0)
    return vh.conj().T[:, keep]


def operator_norm(m):
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(m), 2))


def trace_norm(m):
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False)))


def vec(m):
    """Column-stacking vectorization."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, d):
    return np.asarray(v).reshape(d, d, order="F")


def check_unitary(u, tol=TOL):
    """Validate and return ``u`` as a unitary matrix."""
    u = _square(u)
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > tol:
        raise ContractError("matrix is not unitary within tolerance")
    return u


def check_density(rho, tol=TOL):
    """Validate a density matrix and return a cleaned copy.

    Eigenvalues in ``[-tol, 0)`` are clipped to zero and the trace is
    renormalized to one; anything worse raises :class:`ContractError`.
    """
    rho = _square(rho)
    if not is_hermitian(rho, tol):
        raise ContractError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ContractError(f"density matrix has trace {np.trace(rho).real!r}, expected 1")
    h = (rho + rho.conj().T) / 2
    w, v = np.linalg.eigh(h)
    if w[0] < -tol:
        raise ContractError(f"density matrix has negative eigenvalue {w[0]!r}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        h = (v * w) @ v.conj().T
    return h / np.trace(h).real


def maximally_mixed(d):
    return np.eye(d, dtype=complex) / d


def pure_state(index, d):
    rho = np.zeros((d, d), dtype=complex)
    rho[index, index] = 1.0
    return rho


# Standard gates; CNOT has control on factor A and target on factor B.
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def swap(d):
    """SWAP on ``C^d (x) C^d``."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def random_unitary(rng, d):
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(rng, d, rank=None):
    """Random density matrix ``G G^dagger / Tr`` from a ``d x rank`` Ginibre ``G``."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state_vector(rng, d):
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def make_rng(seed):
    """PCG64 bit generator; the algorithm is fixed so seeded runs reproduce."""
    return np.random.Generator(np.random.PCG64(seed))


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ContractError(f"malformed matrix JSON: {exc}") from None
    if rows < 1 or cols < 1 or len(data) != rows * cols:
        raise DimensionError(f"matrix JSON holds {len(data)} entries for {rows}x{cols}")
    flat = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    if not np.all(np.isfinite(flat)):
        raise ContractError("matrix JSON has non-finite entries")
    return flat.reshape(rows, cols)
