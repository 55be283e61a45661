# Author: Green Mountain Systems AI Inc.

"""Unit tests for dyadic shifts, paraproducts and weighted norms."""

from functools import partial

import numpy as np
import pytest

from a2_lab.engines.dyadic_core import haar_analyze
from a2_lab.engines.families import SparseFamily, internal_family, stopping_family
from a2_lab.engines.shifts import (
    apply_paraproduct,
    apply_shift,
    operator_norm_estimate,
    sparse_defect,
    square_function_estimate,
    square_function_norm,
    weighted_norm,
    weighted_pairing,
    witness,
)
from a2_lab.errors import DepthExceededError, DomainError
from a2_lab.models.core import FamilyKind, ShiftKind
from a2_lab.models.dyadic import DyadicInterval, PiecewiseFn
from a2_lab.models.reports import KernelConstants


def inner(f: PiecewiseFn, g: PiecewiseFn) -> float:
    depth = max(f.depth, g.depth)
    a, b = f.upsample(depth), g.upsample(depth)
    return float(np.sum(a.values * b.values)) * a.cell_length


def random_scalar(rng: np.random.Generator, depth: int) -> PiecewiseFn:
    return PiecewiseFn(depth, DyadicInterval.root(), rng.standard_normal(1 << depth))


class TestHaarShifts:
    """Tests for the full Haar shifts."""

    def test_sha_on_haar(self, root):
        out = apply_shift(ShiftKind.SHA, PiecewiseFn.haar(root, depth=1))
        table = haar_analyze(out)
        assert float(table.coefficient(root.plus)) == pytest.approx(1.0)
        assert float(table.coefficient(root.minus)) == pytest.approx(-1.0)
        assert float(table.coefficient(root)) == pytest.approx(0.0)

    def test_odd_shift_ignores_even_levels(self, root):
        out = apply_shift(ShiftKind.S_ODD, PiecewiseFn.haar(root, depth=1))
        assert np.allclose(out.values, 0.0)

    def test_odd_shift_on_odd_level(self, root):
        out = apply_shift(ShiftKind.S_ODD, PiecewiseFn.haar(root.plus, depth=2))
        table = haar_analyze(out)
        assert float(table.coefficient(root.plus.plus)) == pytest.approx(1.0)
        assert float(table.coefficient(root.plus.minus)) == pytest.approx(-1.0)

    def test_even_shift_on_even_level(self, root):
        out = apply_shift(ShiftKind.S_EVEN, PiecewiseFn.haar(root, depth=1))
        assert float(haar_analyze(out).coefficient(root.plus)) == pytest.approx(1.0)

    def test_odd_shift_adjoint(self, rng):
        f, g = random_scalar(rng, 5), random_scalar(rng, 6)
        lhs = inner(apply_shift(ShiftKind.S_ODD, f), g)
        rhs = inner(f, apply_shift(ShiftKind.S_ODD_ADJOINT, g))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_output_has_zero_mean(self, rng):
        f = random_scalar(rng, 5)
        for kind in (ShiftKind.SHA, ShiftKind.S_ODD, ShiftKind.S0_ODD, ShiftKind.S_EVEN):
            assert float(apply_shift(kind, f).mean()) == pytest.approx(0.0, abs=1e-12)

    def test_hdy_is_combination(self, rng):
        f = random_scalar(rng, 5)
        constants = KernelConstants(c0=-0.2, c1=0.3, c2=-0.7)
        hdy = apply_shift(ShiftKind.HDY, f, constants=constants)
        s = apply_shift(ShiftKind.S_ODD, f)
        s_adj = apply_shift(ShiftKind.S_ODD_ADJOINT, f)
        s0 = apply_shift(ShiftKind.S0_ODD, f)
        expected = s.scale(0.3) - s_adj.scale(0.3) + s0.scale(-0.7)
        assert hdy.allclose(expected, atol=1e-12)

    def test_vector_valued(self, rng, root):
        f = PiecewiseFn(4, root, rng.standard_normal((16, 2)))
        out = apply_shift("sha", f)
        first = apply_shift("sha", PiecewiseFn(4, root, f.values[:, 0].copy()))
        np.testing.assert_allclose(out.values[:, 0], first.values, atol=1e-13)


class TestSparseShifts:
    """Tests for the family-restricted shifts."""

    def test_left_shift_adjoint(self, rng, model_q16):
        family = stopping_family(model_q16)
        f, g = random_scalar(rng, 8), random_scalar(rng, 8)
        lhs = inner(apply_shift(ShiftKind.S_L, f, family=family), g)
        rhs = inner(f, apply_shift(ShiftKind.S_L_ADJOINT, g, family=family))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_sparse_sha_matches_full_on_single_interval(self, root):
        f = PiecewiseFn.haar(root, depth=1)
        family = SparseFamily(FamilyKind.STOPPING, [root])
        sparse = apply_shift(ShiftKind.SHA_SPARSE, f, family=family)
        full = apply_shift(ShiftKind.SHA, f)
        assert sparse.allclose(full, atol=1e-13)

    def test_missing_inputs(self, random_fn):
        with pytest.raises(DomainError):
            apply_shift(ShiftKind.S_L, random_fn)
        with pytest.raises(DomainError):
            apply_shift(ShiftKind.HDY, random_fn)
        with pytest.raises(DomainError):
            apply_shift(ShiftKind.PI, random_fn)

    def test_unknown_kind(self, random_fn):
        with pytest.raises(DomainError):
            apply_shift("not-a-shift", random_fn)


class TestSparseCounterparts:
    """Full shifts against their family-restricted forms on the witness."""

    @pytest.fixture
    def witness_q16(self, model_q16) -> PiecewiseFn:
        _, v = model_q16.materialize()
        return witness(v, np.array([1.0, 1.0]))

    @pytest.fixture
    def generations(self, model_q16) -> SparseFamily:
        """S_1 .. S_{n_max}, whose parents are the rotated nodes."""
        return stopping_family(model_q16, 1, model_q16.n_max)

    @pytest.mark.parametrize(
        "full,sparse",
        [(ShiftKind.S_ODD, ShiftKind.S_SPARSE), (ShiftKind.S0_ODD, ShiftKind.S0_SPARSE)],
    )
    def test_odd_shifts(self, witness_q16, generations, full, sparse):
        a = apply_shift(full, witness_q16)
        b = apply_shift(sparse, witness_q16, family=generations)
        assert a.allclose(b, atol=1e-10 * float(np.abs(a.values).max()))
        assert sparse_defect(full, sparse, witness_q16, generations) < 1e-10

    def test_hdy(self, witness_q16, generations, kernel_constants):
        defect = sparse_defect(
            ShiftKind.HDY, ShiftKind.HDY_SPARSE, witness_q16, generations, kernel_constants
        )
        assert defect < 1e-10

    def test_sha_needs_every_internal_node(self, witness_q16, model_q16):
        defect = sparse_defect(
            ShiftKind.SHA, ShiftKind.SHA_SPARSE, witness_q16, internal_family(model_q16)
        )
        assert defect < 1e-10

    def test_sha_over_generations_misses_terminal_mass(self, witness_q16, generations):
        """The root and terminal coefficients of the witness are nonzero."""
        defect = sparse_defect(ShiftKind.SHA, ShiftKind.SHA_SPARSE, witness_q16, generations)
        assert defect > 1e-3

    def test_sparse_shift_splits_into_paraproducts(self, rng, model_q16, generations):
        f = PiecewiseFn(7, DyadicInterval.root(), rng.standard_normal((128, 2)))
        s = apply_shift(ShiftKind.S_SPARSE, f, family=generations)
        pi, pi1, pi2, pi3 = (
            apply_paraproduct(f, generations, kind)
            for kind in (ShiftKind.PI, ShiftKind.PI1, ShiftKind.PI2, ShiftKind.PI3)
        )
        combined = (pi + pi1 - pi2 - pi3).scale(2.0**-0.5)
        assert s.allclose(combined, atol=1e-12)

class TestParaproducts:
    """Tests for Pi and its relatives."""

    def test_pi_on_constant(self, root):
        f = PiecewiseFn.constant(np.array([1.0, 2.0]), 1)
        out = apply_paraproduct(f, SparseFamily(FamilyKind.STOPPING, [root]))
        np.testing.assert_allclose(out.values, [[-1.0, -2.0], [1.0, 2.0]])

    def test_pi_adjoint(self, rng, model_q16):
        family = stopping_family(model_q16)
        f, g = random_scalar(rng, 9), random_scalar(rng, 9)
        lhs = inner(apply_paraproduct(f, family), g)
        rhs = inner(f, apply_paraproduct(g, family, ShiftKind.PI_ADJOINT))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_controlled_parts_supported_on_family(self, rng, root):
        interval = DyadicInterval(2, 3)
        family = SparseFamily(FamilyKind.STOPPING, [interval])
        f = random_scalar(rng, 4)
        out = apply_paraproduct(f, family, ShiftKind.PI3)
        left = interval.sibling()
        local = out.restrict(left)
        assert float(np.abs(local.values).sum()) > 0.0
        assert np.allclose(out.values[:8], 0.0)

    def test_rejects_shift_kind(self, random_fn, root):
        with pytest.raises(DomainError):
            apply_paraproduct(random_fn, SparseFamily(FamilyKind.STOPPING, [root]), ShiftKind.SHA)

    def test_depth_cap(self, monkeypatch, random_fn):
        monkeypatch.setenv("A2_LAB_DEPTH_CAP", "6")
        family = SparseFamily(FamilyKind.STOPPING, [DyadicInterval(7, 0)])
        with pytest.raises(DepthExceededError):
            apply_paraproduct(random_fn, family)


class TestWeightedNorms:
    """Tests for weighted pairings, witnesses and operator norm estimates."""

    def test_identity_weight(self, rng, root):
        weight = PiecewiseFn.constant(np.eye(2), 3)
        f = PiecewiseFn(3, root, rng.standard_normal((8, 2)))
        expected = float(np.sum(f.values**2)) / 8
        assert weighted_norm(weight, f) ** 2 == pytest.approx(expected)

    def test_grid_mismatch(self, root):
        weight = PiecewiseFn.constant(np.eye(2), 1)
        f = PiecewiseFn.constant(np.ones(2), 1, root.plus)
        with pytest.raises(DomainError):
            weighted_pairing(weight, f, f)

    def test_witness_norm(self, model_q4):
        """||W^-1 b||^2_W = (b, <W^-1>_{I0} b)."""
        w, v = model_q4.materialize()
        b = np.array([1.0, 0.0])
        f = witness(v, b)
        expected = float(b @ v.mean() @ b)
        assert weighted_norm(w, f) ** 2 == pytest.approx(expected, rel=1e-9)

    def test_operator_norm_of_identity(self, rng):
        weight = PiecewiseFn.constant(np.diag([2.0, 3.0]), 3)
        assert operator_norm_estimate(lambda f: f, weight, rng, tests=5) == pytest.approx(1.0)

    def test_operator_norm_includes_candidates(self, rng, model_q4):
        w, v = model_q4.materialize()
        f = witness(v, np.array([1.0, 1.0]))
        shift = partial(apply_shift, ShiftKind.S_ODD)
        ratio = weighted_norm(w, shift(f)) / weighted_norm(w, f)
        assert operator_norm_estimate(shift, w, rng, tests=0, candidates=[f]) == pytest.approx(ratio)
        assert operator_norm_estimate(shift, w, rng, tests=3, candidates=[f]) >= ratio

    def test_square_function_constant_weight(self, root):
        """For W = I and g = 1 each family interval contributes |I|."""
        weight = PiecewiseFn.constant(np.eye(2), 3)
        g = PiecewiseFn.constant(np.array([1.0, 0.0]), 3)
        family = SparseFamily(FamilyKind.STOPPING, [root, root.plus])
        expected = np.sqrt(1.0 + 0.5)
        assert square_function_norm(family, weight, g) == pytest.approx(expected)

    def test_square_function_estimate(self, rng, root):
        weight = PiecewiseFn.constant(np.eye(2), 3)
        g = PiecewiseFn.constant(np.array([1.0, 0.0]), 3)
        family = SparseFamily(FamilyKind.STOPPING, [root, root.plus])
        only_g = square_function_estimate(family, weight, rng, tests=0, candidates=[g])
        assert only_g == pytest.approx(np.sqrt(1.5))
        assert square_function_estimate(family, weight, rng, tests=4, candidates=[g]) >= only_g

    def test_square_function_depth_limit(self, root):
        weight = PiecewiseFn.constant(np.eye(2), 13)
        g = PiecewiseFn.constant(np.array([1.0, 0.0]), 13)
        with pytest.raises(DepthExceededError):
            square_function_norm(SparseFamily(FamilyKind.STOPPING, [root]), weight, g)
