# Author: Green Mountain Systems AI Inc.

"""Dyadic operators acting on piecewise-constant vector functions.

Operators fall into two groups:
- Haar shifts (Sha, odd S, S*, S0, even S', H^dy and their sparse forms)
  act on Haar coefficient tables and gain at most one level of depth;
- paraproduct-type operators (Pi, Pi*, Pi_1..Pi_3) combine averages over a
  sparse family with L-infinity normalized Haar functions or indicators.

Vector functions are acted on componentwise. Sparse forms take a family of
stopping intervals I; I-hat is the dyadic parent of I and L(I) its left
sibling.
"""

import logging
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from ..config import get_settings
from ..errors import DepthExceededError, DomainError
from ..models.core import ShiftKind
from ..models.dyadic import DyadicInterval, PiecewiseFn
from ..models.reports import KernelConstants
from . import mat2
from .dyadic_core import HaarTable, haar_analyze, haar_synthesize
from .families import SparseFamily
from .weight_forge import WeightModel

logger = logging.getLogger(__name__)

FULL_KINDS = {
    ShiftKind.SHA,
    ShiftKind.S_ODD,
    ShiftKind.S_ODD_ADJOINT,
    ShiftKind.S0_ODD,
    ShiftKind.S_EVEN,
    ShiftKind.HDY,
}
PARAPRODUCT_KINDS = {
    ShiftKind.PI,
    ShiftKind.PI_ADJOINT,
    ShiftKind.PI1,
    ShiftKind.PI2,
    ShiftKind.PI3,
}


# =============================================================================
# Grid helpers
# =============================================================================


def _check_depth(depth: int) -> None:
    cap = get_settings().depth_cap
    if depth > cap:
        raise DepthExceededError(depth, cap, "operator output depth")


def _zero_table(depth: int, origin: DyadicInterval, shape: tuple[int, ...]) -> HaarTable:
    return HaarTable(
        depth,
        origin,
        np.zeros(shape),
        [np.zeros(((1 << rel),) + shape) for rel in range(depth)],
    )


def _add_coefficient(table: HaarTable, interval: DyadicInterval, value: np.ndarray) -> None:
    rel = interval.level - table.origin.level
    table.coefficients[rel][interval.offset_in(table.origin)] += value


def _sum_tables(*terms: tuple[float, HaarTable]) -> HaarTable:
    first = terms[0][1]
    out = _zero_table(first.depth, first.origin, first.mean.shape)
    for weight, table in terms:
        for rel in range(out.depth):
            out.coefficients[rel] += weight * table.coefficients[rel]
    return out


def _family_rel_depth(f: PiecewiseFn, family: SparseFamily, extra: int) -> int:
    deepest = max((I.level - f.origin.level for I in family.intervals), default=0)
    depth = max(f.depth + 1, deepest + extra)
    _check_depth(depth)
    return depth


def witness(v: PiecewiseFn, b: np.ndarray) -> PiecewiseFn:
    """f = W^-1 b as a piecewise function, from the materialized inverse weight."""
    b = np.asarray(b, dtype=float)
    return PiecewiseFn(v.depth, v.origin, v.values @ b)


# =============================================================================
# Haar shifts
# =============================================================================


def _full_shift_table(kind: ShiftKind, table: HaarTable) -> HaarTable:
    """Coefficient bookkeeping of Sha, S, S*, S0 and S' on a whole table."""
    out = _zero_table(table.depth + 1, table.origin, table.mean.shape)
    base = table.origin.level
    for rel in range(table.depth):
        odd = (base + rel) % 2 == 1
        c = table.coefficients[rel]
        nxt = table.coefficients[rel + 1] if rel + 1 < table.depth else None
        if kind == ShiftKind.SHA or (kind == ShiftKind.S_ODD and odd) or (
            kind == ShiftKind.S_EVEN and not odd
        ):
            out.coefficients[rel + 1][1::2] += c
            out.coefficients[rel + 1][0::2] -= c
        elif kind == ShiftKind.S_ODD_ADJOINT and odd and nxt is not None:
            out.coefficients[rel] += nxt[1::2] - nxt[0::2]
        elif kind == ShiftKind.S0_ODD and odd and nxt is not None:
            out.coefficients[rel + 1][0::2] += nxt[1::2]
            out.coefficients[rel + 1][1::2] -= nxt[0::2]
    return out


def _sparse_shift_table(
    kind: ShiftKind, table: HaarTable, family: SparseFamily, depth: int, adjoint: bool = False
) -> HaarTable:
    """Coefficient bookkeeping of the family-restricted shifts.

    ``adjoint`` with S_SPARSE gives its adjoint, sum (f, h_{I-hat+} - h_{I-hat-}) h_{I-hat}.
    """
    out = _zero_table(depth, table.origin, table.mean.shape)
    for I in family.intervals:
        if kind == ShiftKind.SHA_SPARSE:
            c = table.coefficient(I)
            _add_coefficient(out, I.plus, c)
            _add_coefficient(out, I.minus, -c)
            continue
        left = I.sibling()
        if kind == ShiftKind.S_L:
            _add_coefficient(out, left, table.coefficient(I))
            continue
        if kind == ShiftKind.S_L_ADJOINT:
            _add_coefficient(out, I, table.coefficient(left))
            continue
        parent = I.parent()
        if kind == ShiftKind.S_SPARSE and adjoint:
            _add_coefficient(out, parent, table.coefficient(I) - table.coefficient(left))
        elif kind == ShiftKind.S_SPARSE:
            c = table.coefficient(parent)
            _add_coefficient(out, I, c)
            _add_coefficient(out, left, -c)
        elif kind == ShiftKind.S0_SPARSE:
            _add_coefficient(out, left, table.coefficient(I))
            _add_coefficient(out, I, -table.coefficient(left))
    return out


def _hdy_table(table: HaarTable, constants: KernelConstants) -> HaarTable:
    s = _full_shift_table(ShiftKind.S_ODD, table)
    s_adj = _full_shift_table(ShiftKind.S_ODD_ADJOINT, table)
    s0 = _full_shift_table(ShiftKind.S0_ODD, table)
    return _sum_tables((constants.c1, s), (-constants.c1, s_adj), (constants.c2, s0))


# =============================================================================
# Paraproduct-type operators
# =============================================================================


def _cells(fn_depth: int, origin: DyadicInterval, interval: DyadicInterval) -> slice:
    rel = interval.level - origin.level
    span = 1 << (fn_depth - rel)
    start = interval.offset_in(origin) * span
    return slice(start, start + span)


def _add_hat(
    values: np.ndarray, depth: int, origin: DyadicInterval, I: DyadicInterval, vec: np.ndarray
) -> None:
    values[_cells(depth, origin, I.plus)] += vec
    values[_cells(depth, origin, I.minus)] -= vec


def apply_paraproduct(
    f: PiecewiseFn, family: SparseFamily, kind: ShiftKind = ShiftKind.PI
) -> PiecewiseFn:
    """Pi f = sum_{I in family} <f>_I h-hat_I and its relatives.

    Kinds:
        PI: sum <f>_I h-hat_I
        PI_ADJOINT: sum <f h-hat_I>_I 1_I
        PI1: sum <f>_{L(I)} h-hat_{L(I)}
        PI2: sum <f>_{L(I)} h-hat_I
        PI3: sum <f>_I h-hat_{L(I)}

    Raises:
        DepthExceededError: If the output grid would exceed the depth cap
        DomainError: If the kind is not a paraproduct kind
    """
    if kind not in PARAPRODUCT_KINDS:
        raise DomainError(f"Unknown paraproduct kind: {kind}")
    depth = max(f.depth, max((I.level - f.origin.level + 1 for I in family.intervals), default=0))
    _check_depth(depth)
    g = f.upsample(depth)
    out = np.zeros_like(g.values)
    for I in family.intervals:
        if kind == ShiftKind.PI:
            _add_hat(out, depth, g.origin, I, g.average_on(I))
        elif kind == ShiftKind.PI_ADJOINT:
            coef = 0.5 * (g.average_on(I.plus) - g.average_on(I.minus))
            out[_cells(depth, g.origin, I)] += coef
        else:
            left = I.sibling()
            source = I if kind == ShiftKind.PI3 else left
            target = I if kind == ShiftKind.PI2 else left
            _add_hat(out, depth, g.origin, target, g.average_on(source))
    return PiecewiseFn(depth, g.origin, out)


# =============================================================================
# Dispatcher
# =============================================================================


def apply_shift(
    kind: Union[ShiftKind, str],
    f: PiecewiseFn,
    family: Optional[SparseFamily] = None,
    constants: Optional[KernelConstants] = None,
) -> PiecewiseFn:
    """Apply a dyadic operator to a piecewise function.

    Args:
        kind: Operator kind
        f: Input function, scalar or vector valued
        family: Stopping intervals for the sparse and paraproduct kinds
        constants: c1, c2 for the H^dy kinds

    Returns:
        The image as a piecewise function on the same origin

    Raises:
        DomainError: If the kind is unknown or a needed input is missing
        DepthExceededError: If the output grid would exceed the depth cap
    """
    try:
        kind = ShiftKind(kind)
    except ValueError as exc:
        raise DomainError(f"Unknown operator kind: {kind}") from exc

    if kind in PARAPRODUCT_KINDS:
        if family is None:
            raise DomainError(f"{kind.value} needs a sparse family")
        return apply_paraproduct(f, family, kind)

    if kind in (ShiftKind.HDY, ShiftKind.HDY_SPARSE) and constants is None:
        raise DomainError(f"{kind.value} needs kernel constants c1, c2")

    table = haar_analyze(f)
    if kind in FULL_KINDS:
        _check_depth(f.depth + 1)
        if kind == ShiftKind.HDY:
            assert constants is not None
            return haar_synthesize(_hdy_table(table, constants))
        return haar_synthesize(_full_shift_table(kind, table))

    if family is None:
        raise DomainError(f"{kind.value} needs a sparse family")
    depth = _family_rel_depth(f, family, 2)
    if kind == ShiftKind.HDY_SPARSE:
        assert constants is not None
        s = _sparse_shift_table(ShiftKind.S_SPARSE, table, family, depth)
        s_adj = _sparse_shift_table(ShiftKind.S_SPARSE, table, family, depth, adjoint=True)
        s0 = _sparse_shift_table(ShiftKind.S0_SPARSE, table, family, depth)
        return haar_synthesize(
            _sum_tables((constants.c1, s), (-constants.c1, s_adj), (constants.c2, s0))
        )
    return haar_synthesize(_sparse_shift_table(kind, table, family, depth))


# =============================================================================
# Weighted pairings and norms
# =============================================================================


def _as_weight(weight: Union[WeightModel, PiecewiseFn]) -> PiecewiseFn:
    if isinstance(weight, WeightModel):
        return weight.materialize()[0]
    return weight


def weighted_pairing(
    weight: Union[WeightModel, PiecewiseFn], f: PiecewiseFn, g: PiecewiseFn
) -> float:
    """Integral of (W f, g) over the common refinement of the three grids.

    Raises:
        DomainError: If the grids have different origins
    """
    w = _as_weight(weight)
    if not (w.origin == f.origin == g.origin):
        raise DomainError(f"grid mismatch: origins {w.origin}, {f.origin}, {g.origin}")
    depth = max(w.depth, f.depth, g.depth)
    wv, fv, gv = (x.upsample(depth).values for x in (w, f, g))
    cell = 2.0 ** -(w.origin.level + depth)
    return float(np.einsum("nij,nj,ni->", wv, fv, gv) * cell)


def weighted_norm(weight: Union[WeightModel, PiecewiseFn], f: PiecewiseFn) -> float:
    return max(weighted_pairing(weight, f, f), 0.0) ** 0.5


def _test_functions(
    weight: PiecewiseFn,
    rng: np.random.Generator,
    tests: int,
    candidates: Sequence[PiecewiseFn],
) -> Iterator[PiecewiseFn]:
    yield from candidates
    for _ in range(tests):
        yield PiecewiseFn(weight.depth, weight.origin, rng.standard_normal((weight.cells, 2)))


def operator_norm_estimate(
    operator: Callable[[PiecewiseFn], PiecewiseFn],
    weight: PiecewiseFn,
    rng: np.random.Generator,
    tests: Optional[int] = None,
    candidates: Sequence[PiecewiseFn] = (),
) -> float:
    """Largest ||T f||_W / ||f||_W over random vector test functions on the weight grid.

    ``candidates`` (e.g. the witness) join the random draws in the maximum.
    """
    tests = get_settings().random_tests if tests is None else tests
    best = 0.0
    for f in _test_functions(weight, rng, tests, candidates):
        norm = weighted_norm(weight, f)
        if norm > 0:
            best = max(best, weighted_norm(weight, operator(f)) / norm)
    logger.debug("operator norm estimate over %d tests: %.6g", tests, best)
    return best


# =============================================================================
# Square function
# =============================================================================


def square_function_norm(family: SparseFamily, weight: PiecewiseFn, g: PiecewiseFn) -> float:
    """||S_1 g||_{L2} with S_1 g(x)^2 = sum_{I in family} <|W(x)^{1/2} W^{-1/2} g|>_I^2 1_I(x).

    The inner average runs over y in I for each fixed cell x, so the cost per
    interval is quadratic in its cell count.

    Raises:
        DepthExceededError: If the grid is too fine for the pairwise average
    """
    limit = min(get_settings().depth_cap, 12)
    depth = max(weight.depth, g.depth)
    if depth > limit:
        raise DepthExceededError(depth, limit, "square function grid")
    w = weight.upsample(depth)
    gv = g.upsample(depth)
    roots = mat2.sqrtm_array(w.values)
    inv_roots = mat2.inv_array(roots)
    u = np.einsum("nij,nj->ni", inv_roots, gv.values)
    total = np.zeros(w.cells)
    for I in family.intervals:
        cells = _cells(depth, w.origin, I)
        vecs = np.einsum("xij,yj->xyi", roots[cells], u[cells])
        avg = np.linalg.norm(vecs, axis=2).mean(axis=1)
        total[cells] += avg * avg
    return float(np.sqrt(total.sum() * w.cell_length))


def square_function_estimate(
    family: SparseFamily,
    weight: PiecewiseFn,
    rng: np.random.Generator,
    tests: Optional[int] = None,
    candidates: Sequence[PiecewiseFn] = (),
) -> float:
    """Largest ||S_1 g||_{L2} / ||g||_{L2} over random test functions and ``candidates``.

    Raises:
        DepthExceededError: If the grid is too fine for the pairwise average
    """
    tests = get_settings().random_tests if tests is None else tests
    best = 0.0
    for g in _test_functions(weight, rng, tests, candidates):
        norm = float(np.sqrt(np.sum(g.values**2) * g.cell_length))
        if norm > 0:
            best = max(best, square_function_norm(family, weight, g) / norm)
    return best


# =============================================================================
# Sparse counterparts
# =============================================================================


def sparse_defect(
    full: ShiftKind,
    sparse: ShiftKind,
    f: PiecewiseFn,
    family: SparseFamily,
    constants: Optional[KernelConstants] = None,
) -> float:
    """max |T f - T_S f| over cells, relative to max |T f|."""
    a = apply_shift(full, f, constants=constants)
    b = apply_shift(sparse, f, family=family, constants=constants)
    depth = max(a.depth, b.depth)
    av, bv = a.upsample(depth).values, b.upsample(depth).values
    scale = float(np.abs(av).max())
    return float(np.abs(av - bv).max()) / scale if scale > 0 else float(np.abs(bv).max())
