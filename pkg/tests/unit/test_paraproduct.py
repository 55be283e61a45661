# Author: Green Mountain Systems AI Inc.

"""Unit tests for the paraproduct evaluators and the sign structure."""

import numpy as np
import pytest

from a2_lab.engines.paraproduct import (
    lower_bound_diagnostics,
    pi_pistar_pairing,
    pi_quadratic,
    pi_quadratic_bruteforce,
    pi_quadratic_fast,
    pi_quadratic_materialized,
    pistar_norm_materialized,
    random_diagnostics,
    stopping_angle,
    witness_norm_sq,
    witness_vector,
)
from a2_lab.engines.weight_forge import build_weight
from a2_lab.errors import BudgetExceededError, DomainError
from a2_lab.models.construction import ConstructionParams
from a2_lab.models.core import EvaluatorKind, WitnessChoice

A0 = np.array([1.0, 0.0])


class TestWitness:
    """Tests for the witness vector and its norm."""

    def test_vectors(self):
        np.testing.assert_array_equal(witness_vector(WitnessChoice.A0), [1.0, 0.0])
        np.testing.assert_array_equal(witness_vector(WitnessChoice.A0_PLUS_B0), [1.0, 1.0])

    def test_norm_matches_root_average(self, model_q4):
        _, v = model_q4.materialize()
        for b in (A0, np.array([1.0, 1.0])):
            expected = float(b @ v.mean() @ b)
            assert witness_norm_sq(model_q4, b) == pytest.approx(expected, rel=1e-9)


class TestQuadraticForm:
    """Tests for ||Pi f||^2 evaluators."""

    @pytest.mark.parametrize("Q", [4.0, 16.0])
    def test_fast_matches_bruteforce(self, Q):
        model = build_weight(ConstructionParams(Q=Q, delta0=1e-3, n_max=8))
        for b in (A0, np.array([1.0, 1.0])):
            fast = pi_quadratic_fast(model, b)
            brute = pi_quadratic_bruteforce(model, b)
            assert fast.total == pytest.approx(brute.total, rel=1e-9)
            assert fast.offdiag == pytest.approx(brute.offdiag, rel=1e-9)

    def test_pair_details_sum_to_offdiagonal(self, model_q16):
        for report in (pi_quadratic_fast(model_q16, A0), pi_quadratic_bruteforce(model_q16, A0)):
            assert set(report.pairs) == {(1, 2), (1, 3), (2, 3)}
            assert sum(report.pairs.values()) == pytest.approx(report.offdiag, rel=1e-12)

    def test_bruteforce_matches_leaf_integral(self, model_q4):
        brute = pi_quadratic_bruteforce(model_q4, A0)
        assert pi_quadratic_materialized(model_q4, A0) == pytest.approx(brute.total, rel=1e-8)

    def test_control_has_no_offdiagonal_mass(self, control_q16):
        assert pi_quadratic_bruteforce(control_q16, A0).offdiag == 0.0
        assert pi_quadratic_fast(control_q16, A0).offdiag == 0.0

    def test_rotations_add_mass(self, model_q16):
        assert pi_quadratic_fast(model_q16, A0).offdiag != 0.0

    def test_dispatch(self, model_q16):
        fast = pi_quadratic(model_q16, A0, EvaluatorKind.FRAME_RECURSION)
        brute = pi_quadratic(model_q16, A0, EvaluatorKind.BRUTE)
        assert fast.method == EvaluatorKind.FRAME_RECURSION
        assert brute.method == EvaluatorKind.BRUTE
        with pytest.raises(DomainError):
            pi_quadratic(model_q16, A0, "simulated")

    def test_budget(self, monkeypatch, model_q16):
        monkeypatch.setenv("A2_LAB_PAIR_BUDGET", "1")
        with pytest.raises(BudgetExceededError) as exc_info:
            pi_quadratic_bruteforce(model_q16, A0)
        assert exc_info.value.budget == 1

    def test_ratio_properties(self, model_q16):
        report = pi_quadratic_fast(model_q16, A0)
        assert report.total == pytest.approx(report.diagonal + 2.0 * report.offdiag)
        assert report.ratio**2 * report.norm_f_sq == pytest.approx(report.total)


class TestSignStructure:
    """Tests for (Pi f, Pi* f)."""

    def test_pairing_nonpositive(self):
        model = build_weight(ConstructionParams(Q=16.0, delta0=1e-3, n_max=8))
        report = pi_pistar_pairing(model, A0)
        assert report.pairing <= 0.0
        assert report.difference_norm_sq >= report.pi_norm_sq

    def test_matches_leaf_integrals(self, model_q4):
        report = pi_pistar_pairing(model_q4, A0)
        pistar_sq, pairing = pistar_norm_materialized(model_q4, A0)
        assert report.pistar_norm_sq == pytest.approx(pistar_sq, rel=1e-8)
        assert report.pairing == pytest.approx(pairing, rel=1e-8, abs=1e-12 * pistar_sq)

    def test_signs_keys(self, model_q16):
        signs = pi_pistar_pairing(model_q16, A0).signs()
        assert set(signs) == {"diagonal", "minus_half", "plus_half", "crossed"}


class TestDiagnostics:
    """Tests for the lower bound diagnostics."""

    def test_stopping_angle(self, model_q16):
        theta0, theta1 = model_q16.theta(0), model_q16.theta(1)
        assert stopping_angle(model_q16, 2, 0b10) == pytest.approx(theta0 - theta1)
        assert stopping_angle(model_q16, 0, 0) == 0.0

    def test_neighbour_differences(self, model_q16):
        record = lower_bound_diagnostics(model_q16, 1, 1, 3, 0b110)
        assert record.stop_diff_error <= 1e-8
        assert record.terminal_diff_error <= 1e-8
        assert record.residual == pytest.approx(record.term - record.main_term)

    def test_rejects_bad_pairs(self, model_q16):
        with pytest.raises(DomainError):
            lower_bound_diagnostics(model_q16, 2, 0, 2, 0)
        with pytest.raises(DomainError):
            lower_bound_diagnostics(model_q16, 1, 0, 3, 0b110)

    def test_random_diagnostics(self, model_q16, rng):
        records = random_diagnostics(model_q16, rng, 5)
        assert len(records) == 5
        assert all(1 <= r.n < r.k < model_q16.n_max for r in records)

    def test_random_diagnostics_needs_depth(self, rng):
        model = build_weight(ConstructionParams(Q=4.0, delta0=1e-2, n_max=2))
        with pytest.raises(DomainError):
            random_diagnostics(model, rng, 1)
