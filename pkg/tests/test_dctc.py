import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import assert_close
from ctclab.dctc import (
    CTCChannel,
    cesaro_iterate,
    channel_from_json,
    channel_superoperator,
    channel_to_json,
    ctc_map,
    random_channel,
    solve_fixed_points,
    verify_dctc,
)
from ctclab.errors import ContractError, DimensionError, SolverError
from ctclab.linalg import (
    CNOT,
    PAULI_X,
    BipartiteSpace,
    make_rng,
    maximally_mixed,
    pure_state,
    random_density,
    random_unitary,
    swap,
    trace_norm,
    unvec,
    vec,
)

KET0 = pure_state(0, 2)
KET1 = pure_state(1, 2)
QUBITS = BipartiteSpace(2, 2)


def brute_force_map(U, rhoA, rhoB):
    """Tr_A(U^dagger (rhoA x rhoB) U) by explicit index sums."""
    dA, dB = rhoA.shape[0], rhoB.shape[0]
    joint = np.zeros((dA * dB, dA * dB), dtype=complex)
    for a1 in range(dA):
        for b1 in range(dB):
            for a2 in range(dA):
                for b2 in range(dB):
                    joint[a1 * dB + b1, a2 * dB + b2] = rhoA[a1, a2] * rhoB[b1, b2]
    out = U.conj().T @ joint @ U
    red = np.zeros((dB, dB), dtype=complex)
    for a in range(dA):
        red += out[a * dB:(a + 1) * dB, a * dB:(a + 1) * dB]
    return red


def cnot_channel(rhoA):
    return CTCChannel(QUBITS, CNOT, rhoA)


class TestCtcMap:
    def test_identity_dynamics(self, rng):
        ch = CTCChannel(BipartiteSpace(2, 3), np.eye(6), random_density(rng, 2))
        rho = random_density(rng, 3)
        assert_close(ctc_map(ch, rho), rho, 1e-14)

    def test_swap_returns_rhoA(self, rng):
        rhoA = random_density(rng, 3)
        ch = CTCChannel(BipartiteSpace(3, 3), swap(3), rhoA)
        assert_close(ctc_map(ch, random_density(rng, 3)), rhoA, 1e-14)

    def test_cnot_flips_target(self, rng):
        ch = cnot_channel(KET1)
        rho = random_density(rng, 2)
        expected = PAULI_X @ rho @ PAULI_X
        assert_close(ctc_map(ch, rho), expected, 1e-14)
        assert_close(brute_force_map(CNOT, KET1, rho), expected, 1e-14)

    @pytest.mark.parametrize("dA,dB", [(2, 2), (2, 3), (3, 2), (4, 4)])
    def test_matches_brute_force(self, rng, dA, dB):
        U = random_unitary(rng, dA * dB)
        rhoA, rhoB = random_density(rng, dA), random_density(rng, dB)
        ch = CTCChannel(BipartiteSpace(dA, dB), U, rhoA)
        assert_close(ctc_map(ch, rhoB), brute_force_map(U, rhoA, rhoB), 1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            ctc_map(cnot_channel(KET0), np.eye(3) / 3)

    @given(st.sampled_from([2, 3]), st.sampled_from([2, 3, 4]), st.integers(0, 2**32 - 1))
    def test_trace_and_positivity(self, dA, dB, seed):
        r = make_rng(seed)
        ch = random_channel(r, dA, dB)
        out = ctc_map(ch, random_density(r, dB))
        assert abs(np.trace(out) - 1) <= 1e-10
        assert np.linalg.eigvalsh(out)[0] >= -1e-10


class TestChannelValidation:
    def test_rejects_non_unitary(self):
        with pytest.raises(ContractError):
            CTCChannel(QUBITS, np.diag([1, 1, 1, 2.0]), KET0)

    def test_rejects_wrong_dimension(self):
        with pytest.raises(DimensionError):
            CTCChannel(BipartiteSpace(2, 3), CNOT, KET0)

    def test_rejects_bad_rhoA(self):
        with pytest.raises(ContractError):
            CTCChannel(QUBITS, CNOT, np.diag([0.7, 0.7]))

    def test_immutable(self):
        ch = cnot_channel(KET0)
        with pytest.raises(ValueError):
            ch.U[0, 0] = 2


class TestSuperoperator:
    def test_identity(self):
        ch = CTCChannel(BipartiteSpace(2, 3), np.eye(6), KET0)
        assert_close(channel_superoperator(ch), np.eye(9), 1e-15)

    def test_swap_on_matrix_units(self, rng):
        rhoA = random_density(rng, 2)
        M = channel_superoperator(CTCChannel(QUBITS, swap(2), rhoA))
        for i in range(2):
            for j in range(2):
                E = np.zeros((2, 2))
                E[i, j] = 1
                expected = rhoA * (i == j)
                assert_close(unvec(M @ vec(E), 2), expected, 1e-14)

    def test_matches_map(self, rng):
        for _ in range(10):
            ch = random_channel(rng, 3, 2)
            rho = random_density(rng, 2)
            assert_close(unvec(channel_superoperator(ch) @ vec(rho), 2), ctc_map(ch, rho), 1e-12)

    def test_trace_preserving(self, rng):
        ch = random_channel(rng, 2, 4)
        M = channel_superoperator(ch)
        vI = vec(np.eye(4))
        assert_close(vI.conj() @ M, vI.conj(), 1e-12)

    def test_linear(self, rng):
        ch = random_channel(rng, 2, 3)
        M = channel_superoperator(ch)
        x, y = rng.standard_normal(9), rng.standard_normal(9)
        assert_close(M @ (2 * x - 3j * y), 2 * (M @ x) - 3j * (M @ y), 1e-12)


def bloch_state(v):
    from ctclab.linalg import PAULI_Y, PAULI_Z

    return (np.eye(2) + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z) / 2


class TestSolver:
    def test_swap(self, rng):
        rhoA = random_density(rng, 2)
        res = solve_fixed_points(CTCChannel(QUBITS, swap(2), rhoA))
        assert_close(res.canonical, rhoA, 1e-12)
        # the fixed set is the single point rhoA; its linear span is one direction
        assert res.subspace_dim == 1

    def test_cnot_mixed_control_grid_oracle(self):
        ch = cnot_channel(np.eye(2) / 2)
        res = solve_fixed_points(ch)
        assert_close(res.canonical, np.eye(2) / 2, 1e-12)
        grid = np.linspace(-1, 1, 9)
        for x in grid:
            for y in grid:
                for z in grid:
                    if x * x + y * y + z * z > 1:
                        continue
                    rho = bloch_state((x, y, z))
                    oracle = (rho + PAULI_X @ rho @ PAULI_X) / 2
                    assert_close(ctc_map(ch, rho), oracle, 1e-14)
                    fixed = verify_dctc(ch, rho) <= 1e-12
                    commutes = np.max(np.abs(rho @ PAULI_X - PAULI_X @ rho)) <= 1e-12
                    assert fixed == commutes
        # commutant of sigma_x among Hermitian 2x2 matrices is span{I, X}
        assert res.subspace_dim == 2

    def test_identity_keeps_maximally_mixed(self):
        res = solve_fixed_points(CTCChannel(BipartiteSpace(2, 3), np.eye(6), KET0))
        assert_close(res.canonical, np.eye(3) / 3, 1e-12)
        assert res.subspace_dim == 9

    def test_basis_properties(self, rng):
        ch = cnot_channel(np.diag([0.3, 0.7]))
        res = solve_fixed_points(ch)
        M = channel_superoperator(ch)
        for h in res.basis:
            assert_close(h, h.conj().T, 1e-12)
            assert np.linalg.norm(unvec(M @ vec(h), 2) - h) <= 1e-10 * np.linalg.norm(h)
        G = np.array([[np.trace(a.conj().T @ b) for b in res.basis] for a in res.basis])
        assert_close(G, np.eye(len(res.basis)), 1e-10)

    def test_residual_is_reported(self, rng):
        ch = random_channel(rng, 3, 3)
        res = solve_fixed_points(ch)
        direct = np.linalg.norm(ctc_map(ch, res.canonical) - res.canonical)
        assert res.residual == pytest.approx(direct, abs=1e-13)
        assert res.residual <= 1e-10

    def test_nonpositive_tol(self):
        with pytest.raises(ContractError):
            solve_fixed_points(cnot_channel(KET0), tol=0)

    def test_too_tight_tol_is_solver_error(self):
        ch = random_channel(make_rng(3), 4, 4)
        with pytest.raises(SolverError):
            solve_fixed_points(ch, tol=1e-300)

    def test_json(self, rng):
        ch = random_channel(rng, 2, 3)
        back = channel_from_json(channel_to_json(ch))
        assert np.array_equal(back.U, ch.U)
        obj = solve_fixed_points(ch).to_json()
        assert obj["subspaceDim"] >= 1 and obj["canonical"]["rows"] == 3

    def test_json_missing_field(self):
        with pytest.raises(ContractError):
            channel_from_json({"dimA": 2, "dimB": 2})


class TestCesaro:
    def test_identity(self, rng):
        rho = random_density(rng, 3)
        ch = CTCChannel(BipartiteSpace(2, 3), np.eye(6), KET0)
        for N in (1, 7, 50):
            avg, orbit = cesaro_iterate(ch, rho, N)
            assert_close(avg, rho, 1e-13)
            assert orbit.shape == (N, 3, 3)

    def test_cnot_period_two(self):
        ch = cnot_channel(KET1)
        avg, orbit = cesaro_iterate(ch, KET0, 6)
        for n in range(6):
            assert_close(orbit[n], KET0 if n % 2 == 0 else KET1, 1e-15)
        assert_close(avg, np.eye(2) / 2, 1e-15)

    def test_orbit_is_iterated_map(self, rng):
        ch = random_channel(rng, 2, 3)
        rho0 = random_density(rng, 3)
        _, orbit = cesaro_iterate(ch, rho0, 5)
        cur = rho0
        for n in range(5):
            assert_close(orbit[n], cur, 1e-13)
            cur = ctc_map(ch, cur)

    def test_residual_decays_like_one_over_n(self, rng):
        for _ in range(10):
            ch = random_channel(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)))
            d = ch.space.dimB
            for N in (1, 10, 100):
                avg, _ = cesaro_iterate(ch, random_density(rng, d), N, keep_orbit=False)
                assert verify_dctc(ch, avg) <= 2 / N + 1e-12

    def test_rejects_zero_steps(self):
        with pytest.raises(ContractError):
            cesaro_iterate(cnot_channel(KET0), KET0, 0)

    def test_error_to_canonical_follows_exact_law(self, rng):
        # the mean of N iterates differs from the ergodic projection by
        # (1/N) (I - M')^-1 (I - M'^N) (v - P v) with M' = M restricted off the fixed space
        for _ in range(5):
            ch = random_channel(rng, 2, 2)
            d = ch.space.dimB
            M = channel_superoperator(ch)
            canon = solve_fixed_points(ch).canonical
            v = vec(maximally_mixed(d))
            off = v - vec(canon)
            eye = np.eye(d * d)
            # M' acts as M on the complement; the fixed component is already removed
            resolvent = np.linalg.inv(eye - M + np.outer(vec(canon), vec(np.eye(d)).conj()))
            for N in (1000, 100000):
                avg, _ = cesaro_iterate(ch, maximally_mixed(d), N, keep_orbit=False)
                decay = off - np.linalg.matrix_power(M, N) @ off
                predicted = unvec(resolvent @ decay, d) / N
                assert_close(avg - canon, predicted, 1e-11)
                assert trace_norm(avg - canon) <= 2 * trace_norm(unvec(resolvent @ off, d)) / N

    def test_unique_fixed_point_converges(self, rng):
        # swap after a local unitary on A: the map is constant, so the limit is unique
        rhoA = np.eye(3) / 3
        U = swap(3) @ np.kron(random_unitary(rng, 3), np.eye(3))
        ch = CTCChannel(BipartiteSpace(3, 3), U, rhoA)
        canon = solve_fixed_points(ch).canonical
        avg, _ = cesaro_iterate(ch, maximally_mixed(3), 100000, keep_orbit=False)
        assert trace_norm(avg - canon) <= 1e-6
