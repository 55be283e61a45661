# Author: Green Mountain Systems AI Inc.

"""Unit tests for dyadic intervals, piecewise functions and Haar tools."""

from fractions import Fraction

import numpy as np
import pytest

from a2_lab.engines.dyadic_core import (
    affine_pullback,
    expectation,
    haar_analyze,
    haar_synthesize,
    in_range_delta2,
    martingale_diff,
    martingale_diff2,
)
from a2_lab.errors import DepthExceededError
from a2_lab.models.dyadic import DyadicInterval, PiecewiseFn, dyadic_decimal


class TestDyadicInterval:
    """Tests for DyadicInterval navigation and geometry."""

    def test_children_and_parent(self, root):
        assert root.minus == DyadicInterval(1, 0)
        assert root.plus == DyadicInterval(1, 1)
        assert root.plus.minus.parent() == root.plus
        assert DyadicInterval(3, 5).sibling() == DyadicInterval(3, 4)

    def test_root_has_no_parent(self, root):
        with pytest.raises(ValueError):
            root.parent()

    def test_negative_level_rejected(self):
        with pytest.raises(ValueError):
            DyadicInterval(-1, 0)

    def test_from_path(self):
        assert DyadicInterval.from_path("101") == DyadicInterval(3, 5)
        assert DyadicInterval.from_path("") == DyadicInterval.root()

    def test_exact_geometry(self):
        interval = DyadicInterval(3, 5)
        assert interval.left == Fraction(5, 8)
        assert interval.right == Fraction(3, 4)
        assert interval.length == Fraction(1, 8)
        assert str(interval) == "[0.625, 0.75)"

    def test_contains_and_offset(self, root):
        inner = DyadicInterval(4, 13)
        assert root.plus.contains(inner)
        assert not root.minus.contains(inner)
        assert inner.offset_in(root.plus) == 5
        with pytest.raises(ValueError):
            inner.offset_in(root.minus)

    def test_descendants(self, root):
        assert list(root.plus.descendants(2)) == [DyadicInterval(3, i) for i in range(4, 8)]

    def test_outside_root(self):
        assert DyadicInterval(2, 3).is_inside_root()
        assert not DyadicInterval(2, 4).is_inside_root()
        assert not DyadicInterval(1, -1).is_inside_root()

    def test_dyadic_decimal_is_exact(self):
        assert dyadic_decimal(Fraction(1, 1 << 40)) == "0.0000000000009094947017729282379150390625"


class TestPiecewiseFn:
    """Tests for PiecewiseFn."""

    def test_indicator(self, root):
        f = PiecewiseFn.indicator(DyadicInterval(2, 1), depth=3)
        np.testing.assert_array_equal(f.values, [0, 0, 1, 1, 0, 0, 0, 0])

    def test_indicator_too_coarse(self):
        with pytest.raises(ValueError):
            PiecewiseFn.indicator(DyadicInterval(3, 1), depth=2)

    def test_haar_is_normalized(self, root):
        h = PiecewiseFn.haar(root.plus, depth=4)
        assert float(np.sum(h.values**2)) * h.cell_length == pytest.approx(1.0)
        assert float(h.mean()) == pytest.approx(0.0)

    def test_shape_validation(self, root):
        with pytest.raises(ValueError):
            PiecewiseFn(3, root, np.zeros(7))

    def test_averages_and_restrict(self, random_fn, root):
        sub = DyadicInterval(2, 3)
        local = random_fn.restrict(sub)
        assert local.origin == sub
        assert local.depth == 3
        np.testing.assert_allclose(random_fn.average_on(sub), local.mean())
        np.testing.assert_allclose(random_fn.averages(2)[3], local.mean())

    def test_average_below_grid(self, random_fn):
        """Intervals finer than the grid read the containing cell."""
        cell = random_fn.cell_interval(7)
        assert random_fn.average_on(cell.plus.minus) == random_fn.values[7]

    def test_upsample_keeps_values(self, random_fn):
        up = random_fn.upsample(7)
        assert up.allclose(random_fn)
        with pytest.raises(ValueError):
            random_fn.upsample(2)

    def test_grid_mismatch(self, root):
        a = PiecewiseFn.constant(1.0, 2, root.plus)
        b = PiecewiseFn.constant(1.0, 2, root.minus)
        with pytest.raises(ValueError):
            a + b

    def test_matvec(self, root):
        m = PiecewiseFn.constant(np.array([[2.0, 0.0], [0.0, 3.0]]), 1)
        x = PiecewiseFn.constant(np.array([1.0, 1.0]), 2)
        y = m.matvec(x)
        assert y.depth == 2
        np.testing.assert_allclose(y.values, np.tile([2.0, 3.0], (4, 1)))

    def test_dump_rows(self):
        rows = PiecewiseFn.indicator(DyadicInterval(1, 1)).dump_rows()
        assert rows[0] == {"left": "0", "right": "0.5", "v0": "0.0"}
        assert rows[1]["v0"] == "1.0"


class TestHaar:
    """Tests for Haar analysis and synthesis."""

    def test_synthesis_inverts_analysis(self, random_fn):
        assert haar_synthesize(haar_analyze(random_fn)).allclose(random_fn, atol=1e-13)

    def test_parseval(self, random_fn):
        table = haar_analyze(random_fn)
        energy = float(table.mean**2) + sum(float(np.sum(c**2)) for c in table.coefficients)
        assert energy == pytest.approx(float(np.sum(random_fn.values**2)) * random_fn.cell_length)

    def test_coefficient_of_haar_function(self, root):
        interval = DyadicInterval(2, 1)
        table = haar_analyze(PiecewiseFn.haar(interval, depth=5))
        assert float(table.coefficient(interval)) == pytest.approx(1.0)
        assert float(table.coefficient(root)) == pytest.approx(0.0)
        assert float(table.coefficient(DyadicInterval(7, 0))) == 0.0

    def test_vector_valued(self, rng, root):
        f = PiecewiseFn(4, root, rng.standard_normal((16, 2)))
        assert haar_synthesize(haar_analyze(f)).allclose(f, atol=1e-13)


class TestMartingaleDifferences:
    """Tests for expectations and martingale differences."""

    def test_expectation(self, random_fn):
        e0 = expectation(random_fn, 0)
        np.testing.assert_allclose(e0.values, np.full(32, random_fn.values.mean()))
        assert expectation(random_fn, 9) is random_fn

    def test_first_difference_is_haar_projection(self, random_fn, root):
        table = haar_analyze(random_fn)
        h = PiecewiseFn.haar(root, depth=5)
        expected = h.scale(float(table.coefficient(root)))
        assert martingale_diff(random_fn, root).allclose(expected, atol=1e-13)

    def test_second_difference_telescopes(self, random_fn, root):
        d2 = martingale_diff2(random_fn, root.plus)
        d1 = martingale_diff(random_fn, root.plus)
        d1_children = martingale_diff(random_fn, root.plus.minus) + martingale_diff(
            random_fn, root.plus.plus
        )
        assert d2.allclose(d1 + d1_children, atol=1e-13)

    def test_supported_on_interval(self, random_fn, root):
        d2 = martingale_diff2(random_fn, root.minus)
        assert np.all(d2.values[16:] == 0.0)
        assert float(d2.restrict(root.minus).mean()) == pytest.approx(0.0, abs=1e-14)

    def test_range_membership(self, rng, root):
        values = rng.standard_normal(4)
        f = PiecewiseFn(2, root, values - values.mean())
        assert in_range_delta2(f, root)
        assert not in_range_delta2(PiecewiseFn.constant(1.0, 2), root)
        assert not in_range_delta2(PiecewiseFn(3, root, rng.standard_normal(8)), root)

    def test_depth_exceeded(self, root):
        with pytest.raises(DepthExceededError) as exc_info:
            martingale_diff2(PiecewiseFn.constant(0.0, 1), root)
        assert exc_info.value.requested == 2
        assert exc_info.value.allowed == 1

    def test_affine_pullback(self, random_fn):
        target = DyadicInterval(3, 2)
        moved = affine_pullback(random_fn, target)
        assert moved.origin == target
        np.testing.assert_array_equal(moved.values, random_fn.values)
