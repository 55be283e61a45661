# Author: Green Mountain Systems AI Inc.

"""Unit tests for the counterexample weight construction."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from a2_lab.engines.weight_forge import (
    build_eigen_table,
    build_weight,
    dyadic_A2,
    dyadic_A2_bruteforce,
    dyadic_A2_materialized,
    rotation_step,
    stretch_step,
    verify_model,
)
from a2_lab.errors import DepthExceededError, DomainError
from a2_lab.models.construction import ConstructionParams
from a2_lab.models.core import NodeKind, SeedConvention
from a2_lab.models.dyadic import DyadicInterval
from a2_lab.models.matrices import Spectral2


class TestConstructionParams:
    """Tests for ConstructionParams validation."""

    def test_defaults(self, params_q16):
        assert params_q16.q == 0.1
        assert params_q16.r == pytest.approx(2.0 - 1.0 / 16.0)
        assert params_q16.convention == SeedConvention.SYMMETRIC

    def test_delta0_must_be_below_q(self):
        with pytest.raises(ValidationError):
            ConstructionParams(Q=16.0, delta0=0.1, n_max=2, q=0.05)

    def test_q_below_one_rejected(self):
        with pytest.raises(ValidationError):
            ConstructionParams(Q=0.5, delta0=1e-3, n_max=2)

    def test_symmetric_seeds(self, params_q16):
        alpha, beta, alpha_sharp, beta_sharp = params_q16.seeds()
        assert (alpha * beta_sharp).to_float() == pytest.approx(16.0)
        assert alpha_sharp == alpha
        assert (beta / alpha).to_float() == pytest.approx((1e-3 / 0.1) ** 2)

    def test_alpha0_fixed_seeds(self):
        params = ConstructionParams(
            Q=16.0, delta0=1e-3, n_max=2, convention=SeedConvention.ALPHA0_FIXED, alpha0=3.0
        )
        alpha, beta, alpha_sharp, beta_sharp = params.seeds()
        assert alpha.to_float() == 3.0
        assert (alpha * beta_sharp).to_float() == pytest.approx(16.0)
        assert (alpha_sharp * beta).to_float() == pytest.approx(16.0)


class TestPrimitiveSteps:
    """Tests for the rotation and stretch steps."""

    def test_rotation_children_average_back(self):
        v = Spectral2.build(0.2, 400.0, 0.04)
        w = Spectral2.build(0.2, 0.04, 400.0)
        vp, vm, wp, wm = rotation_step(v, w, 0.1)
        mean_v = (vp.to_sym() + vm.to_sym()).scale(0.5)
        mean_w = (wp.to_sym() + wm.to_sym()).scale(0.5)
        assert mean_v.allclose(v.to_sym(), rtol=1e-12)
        assert mean_w.allclose(w.to_sym(), rtol=1e-12)
        assert vp.phi - v.phi == pytest.approx(math.atan(0.1 * math.sqrt(0.04 / 400.0)))

    def test_rotation_needs_ordered_eigenvalues(self):
        v = Spectral2.build(0.0, 1.0, 2.0)
        with pytest.raises(DomainError):
            rotation_step(v, v.inverse(), 0.1)

    def test_rotation_needs_common_frame(self):
        v = Spectral2.build(0.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            rotation_step(v, v.inverse().rotate(0.3), 0.1)

    def test_stretch_products(self):
        Q, s = 16.0, 0.99
        x, y = 8.0, s * Q / 8.0
        (xp, yp), (xm, ym) = stretch_step(x, y, s, Q)
        assert xp * yp == pytest.approx(Q)
        assert 1.0 <= xm * ym <= 2.0
        assert (xp + xm) / 2 == pytest.approx(x)
        assert (yp + ym) / 2 == pytest.approx(y)

    def test_stretch_rejects_bad_s(self):
        with pytest.raises(DomainError):
            stretch_step(1.0, 1.0, 0.5, 16.0)


class TestEigenTable:
    """Tests for the per-generation eigenvalue table."""

    def test_length_and_rows(self, params_q16):
        table = build_eigen_table(params_q16)
        assert len(table) == params_q16.n_max + 1
        rows = table.rows()
        assert [row["n"] for row in rows] == ["0", "1", "2", "3", "4"]
        assert set(rows[0]) >= {"alpha", "beta", "delta", "theta", "s"}

    def test_growth(self, params_q16):
        table = build_eigen_table(params_q16)
        r = params_q16.r
        for n in range(len(table) - 1):
            assert table.alpha[n + 1] > table.alpha[n] * r * (1 - 1e-12)
            assert table.beta[n + 1] < table.beta[n] / r * (1 + 1e-12)

    def test_s_range(self, params_q16):
        table = build_eigen_table(params_q16)
        assert all(0.985 < s <= 1.0 + 1e-12 for s in table.s)

    def test_control_has_no_rotation(self):
        params = ConstructionParams(Q=16.0, delta0=1e-3, n_max=3, rotate=False)
        table = build_eigen_table(params)
        assert all(d.is_zero() for d in table.delta)
        assert all(s == pytest.approx(1.0) for s in table.s)


class TestWeightModel:
    """Tests for WeightModel navigation and materialization."""

    def test_node_kinds(self, model_q16):
        assert model_q16.node("").kind == NodeKind.STOPPING
        assert model_q16.node("1").kind == NodeKind.ROTATED
        assert model_q16.node("10").kind == NodeKind.TERMINAL
        node = model_q16.node("11")
        assert node.kind == NodeKind.STOPPING
        assert node.generation == 1
        assert model_q16.node("100").kind == NodeKind.LEAF

    def test_invalid_path(self, model_q16):
        with pytest.raises(ValueError):
            model_q16.node("012")

    def test_stopping_and_terminal_intervals(self, model_q16):
        assert model_q16.stopping_intervals(1) == [DyadicInterval(2, 1), DyadicInterval(2, 3)]
        assert model_q16.terminal_intervals(0) == [DyadicInterval(2, 0), DyadicInterval(2, 2)]
        assert len(model_q16.stopping_intervals(3)) == 8

    def test_rotation_angles_opposite(self, model_q16):
        plus = model_q16.node("1")
        minus = model_q16.node("0")
        assert plus.angle == pytest.approx(-minus.angle)
        assert plus.angle == pytest.approx(model_q16.theta(0))

    def test_leaves_are_pointwise_inverse(self, model_q4):
        w, v = model_q4.materialize()
        assert w.depth == model_q4.depth
        products = np.einsum("nij,njk->nik", w.values, v.values)
        np.testing.assert_allclose(products, np.broadcast_to(np.eye(2), products.shape), atol=1e-8)

    def test_materialized_averages_match_nodes(self, model_q4):
        w, v = model_q4.materialize()
        for path in ("", "1", "10", "11", "0110"):
            node = model_q4.node(path)
            interval = DyadicInterval.from_path(path)
            expected_w = node.w.to_sym().to_array()
            expected_v = node.v.to_sym().to_array()
            np.testing.assert_allclose(w.average_on(interval), expected_w, rtol=1e-9, atol=1e-9)
            np.testing.assert_allclose(
                v.average_on(interval),
                expected_v,
                rtol=1e-9,
                atol=1e-9 * np.abs(expected_v).max(),
            )

    def test_depth_cap(self, monkeypatch):
        monkeypatch.setenv("A2_LAB_DEPTH_CAP", "6")
        model = build_weight(ConstructionParams(Q=4.0, delta0=1e-2, n_max=3))
        with pytest.raises(DepthExceededError):
            model.materialize()


class TestDyadicA2:
    """Tests for the dyadic A2 measurement."""

    def test_bounded_by_q(self, model_q16):
        assert dyadic_A2(model_q16) <= 16.0 * (1 + 1e-10)

    def test_attained_on_stopping_intervals(self, model_q16):
        assert dyadic_A2(model_q16) == pytest.approx(16.0, rel=1e-10)

    def test_bruteforce_agrees(self, model_q4):
        assert dyadic_A2_bruteforce(model_q4) == pytest.approx(dyadic_A2(model_q4), rel=1e-4)

    def test_materialized_agrees(self, model_q4):
        w, v = model_q4.materialize()
        assert dyadic_A2_materialized(w, v) == pytest.approx(dyadic_A2(model_q4), rel=1e-4)


class TestVerifyModel:
    """Tests for verify_model."""

    def test_all_checks_pass(self, model_q16):
        report = verify_model(model_q16)
        assert report.passed, report.failed()
        assert set(report.checks) >= {
            "product_identity",
            "ratio_identity",
            "growth",
            "s_range",
            "martingale",
            "dyadic_a2",
            "lowner",
        }

    def test_control_passes(self, control_q16):
        assert verify_model(control_q16).passed

    def test_q4_passes(self, model_q4):
        assert verify_model(model_q4).passed
