import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctclab.errors import ContractError, DomainError, TruncationError
from ctclab.gibbs import (
    FiniteRankObservable,
    OscillatorGibbs,
    default_truncation,
    gibbs_expectation,
    ground_projector,
    identity_expectation,
    lowest_levels_projector,
    normality_contradiction_report,
    partial_partition_sum,
    partition_function,
    projector_decay_scan,
    tail_bound,
    truncated_identity,
)

# 50-digit mpmath evaluations of the closed forms, frozen
Z_AT_ONE = 0.95951737566747185975
GROUND = {
    1.0: 0.632120558828557678,
    0.1: 0.0951625819640404268,
    0.01: 0.00995016625083194643,
    0.001: 0.000999500166625008332,
}
P5_AT_1E4 = 0.000499875020830729427


class TestPartitionFunction:
    def test_ln2(self):
        assert partition_function(math.log(2)) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_beta_one(self):
        assert partition_function(1.0) == pytest.approx(Z_AT_ONE, rel=1e-15)
        assert partial_partition_sum(1.0, 60) == pytest.approx(Z_AT_ONE, abs=1e-12)

    def test_ground_state_dominance(self):
        assert partition_function(50.0) / math.exp(-25.0) == pytest.approx(1, abs=1e-10)

    @pytest.mark.parametrize("beta", [0.0, -1.0, math.inf, math.nan])
    def test_domain(self, beta):
        with pytest.raises(DomainError):
            partition_function(beta)

    @given(st.floats(1e-3, 20), st.integers(1, 5000))
    def test_partial_plus_tail(self, beta, n):
        Z = partition_function(beta)
        total = partial_partition_sum(beta, n) + tail_bound(beta, n)
        assert total == pytest.approx(Z, rel=1e-12)
        assert partial_partition_sum(beta, n) <= Z * (1 + 1e-15)

    def test_partial_sums_increase(self):
        sums = [partial_partition_sum(0.3, n) for n in range(1, 50)]
        assert all(b > a for a, b in zip(sums, sums[1:]))


class TestState:
    def test_default_truncation(self):
        assert default_truncation(1.0) == 200
        assert default_truncation(1e-3) == 30000
        assert OscillatorGibbs(1e-2).truncation == 3000

    def test_relative_tail(self):
        g = OscillatorGibbs(0.5, 40)
        assert g.relative_tail() == pytest.approx(math.exp(-20), rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ContractError):
            OscillatorGibbs(1.0, 0)
        with pytest.raises(DomainError):
            OscillatorGibbs(-1.0)


class TestObservables:
    def test_projector(self):
        p = lowest_levels_projector(5)
        assert p.is_projector() and p.s == 5 and p.norm == 1 and p.dim == 5

    def test_dense_matrix(self):
        v = np.array([1, 1j, 0]) / np.sqrt(2)
        p = FiniteRankObservable(np.outer(v, v.conj()))
        assert p.is_projector() and p.s == pytest.approx(1)
        assert not FiniteRankObservable(np.diag([0.5, 1.0])).is_projector()

    def test_invalid(self):
        with pytest.raises(ContractError):
            FiniteRankObservable()
        with pytest.raises(ContractError):
            FiniteRankObservable(np.ones((2, 3)))
        with pytest.raises(ContractError):
            lowest_levels_projector(0)
        with pytest.raises(ContractError):
            FiniteRankObservable.diagonal([np.inf])


class TestExpectation:
    @pytest.mark.parametrize("beta", sorted(GROUND))
    def test_ground_state(self, beta):
        value = gibbs_expectation(OscillatorGibbs(beta), ground_projector())
        assert value == pytest.approx(GROUND[beta], rel=1e-12)
        assert value == pytest.approx(-math.expm1(-beta), rel=1e-12)

    def test_identity(self):
        for beta in (1.0, 0.1, 1e-3, 1e-4):
            assert abs(identity_expectation(beta) - 1) <= 1e-12

    def test_complement(self):
        g = OscillatorGibbs(0.2)
        p0 = gibbs_expectation(g, ground_projector())
        rest = gibbs_expectation(g, FiniteRankObservable.diagonal(np.r_[0.0, np.ones(g.truncation - 1)]))
        assert p0 + rest == pytest.approx(1, abs=1e-12)

    def test_bound_reported(self):
        e = gibbs_expectation(OscillatorGibbs(1.0), ground_projector(), with_bound=True)
        assert e.errorBound == pytest.approx(math.exp(-200), rel=1e-10)

    def test_truncation_errors(self):
        with pytest.raises(TruncationError):
            gibbs_expectation(OscillatorGibbs(1.0, 10), ground_projector())
        with pytest.raises(TruncationError):
            gibbs_expectation(OscillatorGibbs(1.0, 200), truncated_identity(201))

    def test_off_diagonal_entries_do_not_contribute(self):
        m = np.zeros((3, 3))
        m[0, 1] = m[1, 0] = 1.0
        assert gibbs_expectation(OscillatorGibbs(1.0), FiniteRankObservable(m)) == 0

    @given(st.floats(1e-3, 5), st.integers(1, 50))
    def test_projector_bounds(self, beta, k):
        g = OscillatorGibbs(beta)
        v = gibbs_expectation(g, lowest_levels_projector(k))
        assert 0 <= v <= k / g.Z
        assert v <= 1 + 1e-15  # one rounding step above 1 at most
        # closed form: 1 - exp(-k beta)
        assert v == pytest.approx(-math.expm1(-k * beta), rel=1e-11)


class TestScans:
    BETAS = [1.0, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-4]

    def test_decay(self):
        rows = projector_decay_scan(lowest_levels_projector(3), self.BETAS)
        assert all(w <= b for _, w, b in rows)
        values = [w for _, w, _ in rows]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-3

    def test_needs_descending(self):
        with pytest.raises(ContractError):
            projector_decay_scan(ground_projector(), [0.1, 1.0])

    def test_p5_small_beta(self):
        v = gibbs_expectation(OscillatorGibbs(1e-4), lowest_levels_projector(5))
        assert v == pytest.approx(P5_AT_1E4, rel=1e-10)
        assert v <= 5 / partition_function(1e-4)

    def test_report(self):
        rep = normality_contradiction_report([1.0, 0.1, 0.01], kMax=40, ks=[1, 5, 40])
        density = [v for _, v in rep["densityColumn"]]
        assert density[-1] >= 1 - 1e-10
        assert all(b >= a for a, b in zip(density, density[1:]))
        for beta, k, value, bound in rep["gibbsTable"]:
            assert value <= bound
        by_k = {}
        for beta, k, value, _ in rep["gibbsTable"]:
            by_k.setdefault(beta, []).append(value)
        for values in by_k.values():
            assert values == sorted(values)
        assert all(abs(v - 1) <= 1e-12 for _, v in rep["identity"])
