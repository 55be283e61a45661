# Author: Green Mountain Systems AI Inc.

"""Periodization, iterated quasi-periodization and remodeling of weight pairs.

The iterated forms follow one recursion. A starting interval I of order k
carries the structure of f on its target J = F(I) in D_{2k-1}: I is cut into
2**N_k copies holding the two levels of f below J, and the grandchildren of
every copy become starting intervals of order k + 1 targeting the matching
grandchildren of J. Quasi-periodization fills the two boundary copies with
<f>_J and stops there.

Weights are remodeled by one quasi-periodization of the pair followed by
repair rounds on the exceptional cells E with F(E) = J. A round splits E into
grandchildren; the middle two receive exact compressed copies of (W, V) on J
and the outer two stay exceptional, holding the means. After r rounds E holds

    B_r = [B_{r-1}, copy_J, copy_J, B_{r-1}],   B_0 = (<W>_J, <V>_J),

which ``RemodeledWeights`` keeps symbolically over the first-pass grid.
"""

import bisect
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from ..config import get_settings
from ..errors import DepthExceededError, DomainError
from ..models.bookkeeping import RemodelBookkeeping
from ..models.core import IntervalRole, ShiftKind
from ..models.dyadic import DyadicInterval, PiecewiseFn
from ..models.reports import KernelConstants, TrendReport, TrendRow
from . import mat2
from .dyadic_core import martingale_diff2
from .hilbert_kernels import C0, line_transform, pairing_line
from .shifts import apply_shift
from .weight_forge import WeightModel

logger = logging.getLogger(__name__)

FrequencyVector = tuple[int, ...]


# =============================================================================
# Helpers
# =============================================================================


def frequency(frequencies: Sequence[int], order: int) -> int:
    """N_k of a frequency vector; a finite vector repeats its last entry."""
    return int(frequencies[min(order, len(frequencies)) - 1])


def _check_frequencies(frequencies: Sequence[int]) -> FrequencyVector:
    if not frequencies:
        raise DomainError("frequency vector is empty")
    if any(int(n) < 2 for n in frequencies):
        raise DomainError(f"frequencies must be >= 2, got {tuple(frequencies)}")
    return tuple(int(n) for n in frequencies)


def _check_depth(depth: int, cap: Optional[int] = None, what: str = "remodeled depth") -> None:
    cap = get_settings().depth_cap if cap is None else cap
    if depth > cap:
        raise DepthExceededError(depth, cap, what)


def l2_inner(f: PiecewiseFn, g: PiecewiseFn) -> float:
    """(f, g) in L2 of Lebesgue measure on the common origin."""
    a, b = f._aligned(g)
    return float(np.sum(a.values * b.values)) * a.cell_length


def l2_norm(f: PiecewiseFn) -> float:
    return math.sqrt(max(l2_inner(f, f), 0.0))


def iterated_depth(depth: int, frequencies: Sequence[int]) -> int:
    """Grid depth of the iterated (quasi-)periodization of a depth ``depth`` function."""
    if depth <= 1:
        return depth

    def below(remaining: int, order: int) -> int:
        if remaining == 0:
            return 0
        n = frequency(frequencies, order)
        if remaining <= 2:
            return n + remaining
        return n + 2 + below(remaining - 2, order + 1)

    return 1 + below(depth - 1, 1)


# =============================================================================
# Single-interval periodization
# =============================================================================


def periodize(f: PiecewiseFn, N: int) -> PiecewiseFn:
    """P_I^N f: 2**N shrunken copies of f tiled over its origin I.

    Raises:
        DomainError: If N < 0
        DepthExceededError: If depth(f) + N exceeds the cap
    """
    if N < 0:
        raise DomainError(f"periodization frequency must be >= 0, got {N}")
    _check_depth(f.depth + N)
    reps = (1 << N,) + (1,) * len(f.value_shape)
    return PiecewiseFn(f.depth + N, f.origin, np.tile(f.values, reps))


def quasi_periodize(f: PiecewiseFn, N: int) -> PiecewiseFn:
    """QP_I^N f: periodize, then set the two boundary copies to <f>_I.

    Raises:
        DomainError: If N < 2
    """
    if N < 2:
        raise DomainError(f"quasi-periodization needs N >= 2, got {N}")
    out = periodize(f, N)
    values = out.values.copy()
    span = f.cells
    mean = f.mean()
    values[:span] = mean
    values[-span:] = mean
    return PiecewiseFn(out.depth, out.origin, values)


# =============================================================================
# Iterated periodization
# =============================================================================


def _iterate(
    f: PiecewiseFn, frequencies: Sequence[int], quasi: bool, cap: Optional[int] = None
) -> tuple[PiecewiseFn, RemodelBookkeeping]:
    nvec = _check_frequencies(frequencies)
    book = RemodelBookkeeping(quasi=quasi, frequencies=nvec)
    D = f.depth
    if D <= 1:
        return f, book
    total = iterated_depth(D, nvec)
    _check_depth(total, cap)
    averages = [f.averages(level) for level in range(D + 1)]
    out = np.empty((1 << total,) + f.value_shape)

    def fill(level: int, index: int, value: np.ndarray) -> None:
        span = 1 << (total - level)
        out[index * span : (index + 1) * span] = value

    def place(start: DyadicInterval, target: DyadicInterval, order: int) -> None:
        remaining = D - target.level
        if remaining == 0:
            fill(start.level, start.index, averages[D][target.index])
            return
        book.add(order, IntervalRole.START, start, target)
        n = frequency(nvec, order)
        sub = min(remaining, 2)
        local = averages[target.level + sub][target.index << sub : (target.index + 1) << sub]
        last = (1 << n) - 1
        for c in range(last + 1):
            copy = DyadicInterval(start.level + n, (start.index << n) + c)
            if quasi and c in (0, last):
                book.add(order, IntervalRole.EXCEPTIONAL, copy, target)
                fill(copy.level, copy.index, averages[target.level][target.index])
                continue
            book.add(order, IntervalRole.COPY, copy, target)
            if remaining <= 2:
                span = 1 << (total - copy.level)
                out[copy.index * span : (copy.index + 1) * span] = np.repeat(
                    local, span >> sub, axis=0
                )
                continue
            for g, grandchild in enumerate(copy.descendants(2)):
                next_target = DyadicInterval(target.level + 2, (target.index << 2) + g)
                book.add(order, IntervalRole.STOP, grandchild, next_target)
                place(grandchild, next_target, order + 1)

    for half in DyadicInterval.root().children():
        place(half, half, 1)
    logger.debug(
        "Iterated %s: depth %d -> %d, %d bookkeeping entries",
        "quasi-periodization" if quasi else "periodization",
        D,
        total,
        len(book.entries),
    )
    return PiecewiseFn(total, f.origin, out), book


def iterated_periodize(
    f: PiecewiseFn, frequencies: Sequence[int]
) -> tuple[PiecewiseFn, RemodelBookkeeping]:
    """P^{N} f with its bookkeeping; starts targeting J have total length |J|.

    Raises:
        DomainError: If a frequency is below 2
        DepthExceededError: If the result would exceed the depth cap
    """
    return _iterate(f, frequencies, quasi=False)


def iterated_qp(
    f: PiecewiseFn, frequencies: Sequence[int]
) -> tuple[PiecewiseFn, RemodelBookkeeping]:
    """QP^{N} f with its bookkeeping.

    Example:
        g, book = iterated_qp(f, (4,))
        book.rows()
    """
    return _iterate(f, frequencies, quasi=True)


def reconstruct_from_bookkeeping(f: PiecewiseFn, book: RemodelBookkeeping) -> PiecewiseFn:
    """E_1 f plus, for every start I -> J, the copies of Delta^2_J f spread over I.

    Exceptional copies of a quasi-periodization receive nothing, so they keep
    the value accumulated from the coarser orders. f must live on I0.
    """
    total = iterated_depth(f.depth, book.frequencies)
    if f.depth <= 1:
        return f
    values = np.repeat(f.averages(1), 1 << (total - 1), axis=0)
    fine = f.upsample(f.depth + 1)
    for entry in book.by_role(IntervalRole.START):
        target, start = entry.target, entry.interval
        sub = min(f.depth - target.level, 2)
        local = martingale_diff2(fine, target).restrict(target).averages(sub)
        n = book.frequency(entry.order)
        last = (1 << n) - 1
        for c in range(last + 1):
            if book.quasi and c in (0, last):
                continue
            copy = DyadicInterval(start.level + n, (start.index << n) + c)
            span = 1 << (total - copy.level)
            values[copy.index * span : (copy.index + 1) * span] += np.repeat(
                local, span >> sub, axis=0
            )
    return PiecewiseFn(total, f.origin, values)


def qp_convergence(f: PiecewiseFn, frequency_family: Sequence[int]) -> list[dict[str, float]]:
    """||P^N f - QP^N f|| and ||f|| - ||QP^N f|| along constant vectors (N, N, ...)."""
    norm_f = l2_norm(f)
    rows = []
    for n in frequency_family:
        p, _ = iterated_periodize(f, (n,))
        qp, _ = iterated_qp(f, (n,))
        rows.append(
            {
                "N": float(n),
                "gap": l2_norm(p - qp),
                "norm_defect": norm_f - l2_norm(qp),
                "periodized_norm_error": abs(l2_norm(p) - norm_f),
            }
        )
    return rows


# =============================================================================
# Strong dyadic A2
# =============================================================================


def strong_dyadic_A2(v: PiecewiseFn, w: PiecewiseFn, wrap: bool = True) -> float:
    """Max of a2_pair_char over unions of two adjacent equal-length dyadic intervals.

    Every level of the grid is scanned, with the pair (last, first) taken in
    the periodic extension when ``wrap`` is set. Single cells are included.
    """
    if v.origin != w.origin:
        raise DomainError(f"grid mismatch: origins {v.origin} and {w.origin}")
    depth = max(v.depth, w.depth)
    v, w = v.upsample(depth), w.upsample(depth)
    best = float(mat2.a2_char_array(v.mean(), w.mean()))
    for level in range(1, depth + 1):
        av, aw = v.averages(level), w.averages(level)
        pv = 0.5 * (av + np.roll(av, -1, axis=0))
        pw = 0.5 * (aw + np.roll(aw, -1, axis=0))
        if not wrap:
            pv, pw = pv[:-1], pw[:-1]
        if len(pv):
            best = max(best, float(mat2.a2_char_array(pv, pw).max()))
    return max(best, float(mat2.a2_char_array(v.values, w.values).max()))


def _cumulative(values: np.ndarray) -> np.ndarray:
    return np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)])


def _integral_to(values: np.ndarray, cums: np.ndarray, t: float) -> np.ndarray:
    """Integral over [0, t) of a cell array on [0, 1)."""
    n = len(values)
    pos = min(max(t, 0.0), 1.0) * n
    i = min(int(pos), n - 1)
    return (cums[i] + (pos - i) * values[i]) / n


# =============================================================================
# Remodeled weights
# =============================================================================


@dataclass
class ExceptionalCell:
    cell: DyadicInterval
    target: DyadicInterval


@dataclass
class RemodeledWeights:
    """A quasi-periodized weight pair with block repairs on its exceptional cells.

    ``base_w`` and ``base_v`` are the first-pass grid; inside each defective
    exceptional cell the true values are the block B_rounds of its target.
    """

    base_w: PiecewiseFn
    base_v: PiecewiseFn
    model_w: PiecewiseFn
    model_v: PiecewiseFn
    Q: float
    exceptional: list[ExceptionalCell]
    bookkeeping: RemodelBookkeeping
    rounds: int = 0
    _copies: dict[DyadicInterval, tuple] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._bounds = sorted(
            (float(e.cell.left), float(e.cell.right), e.target) for e in self.exceptional
        )
        self._lefts = [b[0] for b in self._bounds]

    def at_round(self, rounds: int) -> "RemodeledWeights":
        if rounds < 0:
            raise DomainError(f"rounds must be >= 0, got {rounds}")
        return replace(self, rounds=rounds)

    # ===== Target data =====

    def _copy(self, target: DyadicInterval) -> tuple:
        """(W, V) on the target with their means and cumulative sums."""
        if target not in self._copies:
            w = self.model_w.restrict(target)
            v = self.model_v.restrict(target)
            self._copies[target] = (
                w,
                v,
                w.mean(),
                v.mean(),
                _cumulative(w.values),
                _cumulative(v.values),
            )
        return self._copies[target]

    def targets(self) -> list[DyadicInterval]:
        return sorted({e.target for e in self.exceptional})

    # ===== Defect =====

    def defect_measure(self) -> float:
        """Total length still holding mean pairs instead of inverse pairs."""
        return sum(float(e.cell.length) for e in self.exceptional) * 2.0**-self.rounds

    def max_defect(self) -> float:
        """max ||W V - I|| over the remaining exceptional cells."""
        if not self.exceptional:
            return 0.0
        worst = 0.0
        for target in self.targets():
            _, _, mw, mv, _, _ = self._copy(target)
            worst = max(worst, float(np.linalg.norm(mw @ mv - np.eye(2), 2)))
        return worst

    def hypothesis_check(self) -> float:
        """Largest a2(<V>_J, <W>_J) / Q over repaired targets J."""
        worst = 0.0
        for target in self.targets():
            _, _, mw, mv, _, _ = self._copy(target)
            worst = max(worst, float(mat2.a2_char_array(mv, mw)) / self.Q)
        return worst

    # ===== Strong dyadic A2 on the block structure =====

    def _block_term(self, target: DyadicInterval) -> float:
        w, v, mw, mv, _, _ = self._copy(target)
        best = float(mat2.a2_char_array(mv, mw))
        if self.rounds == 0:
            return best
        best = max(best, strong_dyadic_A2(v, w, wrap=False))
        for level in range(w.depth + 1):
            aw, av = w.averages(level), v.averages(level)
            straddles = [
                (0.5 * (mv + av[0]), 0.5 * (mw + aw[0])),
                (0.5 * (av[-1] + av[0]), 0.5 * (aw[-1] + aw[0])),
                (0.5 * (av[-1] + mv), 0.5 * (aw[-1] + mw)),
            ]
            for pv, pw in straddles:
                best = max(best, float(mat2.a2_char_array(pv, pw)))
        return best

    def strong_dyadic_A2(self) -> float:
        """Exact strong dyadic A2 of the repaired pair.

        Block boundaries hold the mean at every level, so pairs crossing a
        block edge are seen correctly on the base grid; pairs inside a block
        reduce to the copy-internal pairs and three straddle types.
        """
        best = strong_dyadic_A2(self.base_v, self.base_w)
        for target in self.targets():
            best = max(best, self._block_term(target))
        return best

    # ===== Exact integrals =====

    def _block_integral(self, target: DyadicInterval, rounds: int, lo: float, hi: float) -> tuple:
        """Integral of B_rounds over [lo, hi), in units of the cell length."""
        w, v, mw, mv, cw, cv = self._copy(target)
        if hi <= lo:
            return np.zeros((2, 2)), np.zeros((2, 2))
        if rounds == 0:
            return mw * (hi - lo), mv * (hi - lo)
        total_w, total_v = np.zeros((2, 2)), np.zeros((2, 2))
        for q in range(4):
            a, b = max(lo, q / 4), min(hi, (q + 1) / 4)
            if b <= a:
                continue
            la, lb = 4 * a - q, 4 * b - q
            if q in (0, 3):
                pw, pv = self._block_integral(target, rounds - 1, la, lb)
            else:
                pw = _integral_to(w.values, cw, lb) - _integral_to(w.values, cw, la)
                pv = _integral_to(v.values, cv, lb) - _integral_to(v.values, cv, la)
            total_w = total_w + pw / 4
            total_v = total_v + pv / 4
        return total_w, total_v

    def _containing(self, t: float) -> Optional[tuple[float, float, DyadicInterval]]:
        i = bisect.bisect_right(self._lefts, t) - 1
        if i >= 0 and self._bounds[i][0] < t < self._bounds[i][1]:
            return self._bounds[i]
        return None

    def integrate(self, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
        """(int_x^y W, int_x^y V) over [x, y) inside [0, 1)."""
        if not 0.0 <= x <= y <= 1.0:
            raise DomainError(f"[{x}, {y}) is not a subinterval of [0, 1)")
        bw, bv = self.base_w.values, self.base_v.values
        cw, cv = _cumulative(bw), _cumulative(bv)
        iw = _integral_to(bw, cw, y) - _integral_to(bw, cw, x)
        iv = _integral_to(bv, cv, y) - _integral_to(bv, cv, x)
        if self.rounds == 0:
            return iw, iv
        partial = []
        cell_x, cell_y = self._containing(x), self._containing(y)
        if cell_x is not None and cell_x == cell_y:
            partial.append((cell_x, x, y))
        else:
            if cell_x is not None:
                partial.append((cell_x, x, cell_x[1]))
            if cell_y is not None:
                partial.append((cell_y, cell_y[0], y))
        for (left, right, target), a, b in partial:
            _, _, mw, mv, _, _ = self._copy(target)
            size = right - left
            pw, pv = self._block_integral(target, self.rounds, (a - left) / size, (b - left) / size)
            iw = iw - mw * (b - a) + pw * size
            iv = iv - mv * (b - a) + pv * size
        return iw, iv

    def sampled_interval_A2(self, rng: np.random.Generator, count: int = 2000) -> float:
        """Max of the A2 characteristic over random subintervals of [0, 1).

        Half of the samples have an endpoint inside an exceptional cell.
        """
        best = 0.0
        for i in range(count):
            x, y = np.sort(rng.uniform(0.0, 1.0, size=2))
            if self._bounds and i % 2:
                left, right, _ = self._bounds[int(rng.integers(len(self._bounds)))]
                x = float(rng.uniform(left, right))
                y = float(min(1.0, x + rng.exponential(right - left)))
            if y - x < 1e-12:
                continue
            iw, iv = self.integrate(float(x), float(y))
            length = y - x
            best = max(best, float(mat2.a2_char_array(iv / length, iw / length)))
        return best

    # ===== Boundary averages =====

    def boundary_check(self) -> float:
        """Worst relative error of <W~>_{I'} = <W>_J over boundary-touching I' in each start I."""
        worst = 0.0
        depth = self.base_w.depth
        for entry in self.bookkeeping.by_role(IntervalRole.START):
            start = entry.interval
            expected = self.model_w.average_on(entry.target)
            scale = float(np.linalg.norm(expected))
            for level in range(start.level, depth + 1):
                shift = level - start.level
                first = start.index << shift
                last = ((start.index + 1) << shift) - 1
                for index in (first, last):
                    got = self.base_w.average_on(DyadicInterval(level, index))
                    worst = max(worst, float(np.linalg.norm(got - expected)) / scale)
        return worst

    # ===== Materialization =====

    def required_depth(self) -> int:
        depth = self.base_w.depth
        for e in self.exceptional:
            d = self.model_w.depth - e.target.level
            depth = max(depth, e.cell.level + 2 * self.rounds + d)
        return depth

    def _render(
        self,
        out_w: np.ndarray,
        out_v: np.ndarray,
        start: int,
        span: int,
        target: DyadicInterval,
        rounds: int,
    ) -> None:
        w, v, mw, mv, _, _ = self._copy(target)
        if rounds == 0:
            out_w[start : start + span] = mw
            out_v[start : start + span] = mv
            return
        q = span // 4
        rep = q >> w.depth
        self._render(out_w, out_v, start, q, target, rounds - 1)
        for offset in (q, 2 * q):
            out_w[start + offset : start + offset + q] = np.repeat(w.values, rep, axis=0)
            out_v[start + offset : start + offset + q] = np.repeat(v.values, rep, axis=0)
        self._render(out_w, out_v, start + 3 * q, q, target, rounds - 1)

    def materialize(self, depth: Optional[int] = None) -> tuple[PiecewiseFn, PiecewiseFn]:
        """(W~, V~) as leaf arrays.

        Raises:
            DomainError: If ``depth`` cannot resolve the blocks
            DepthExceededError: If the depth exceeds the cap
        """
        needed = self.required_depth()
        depth = needed if depth is None else depth
        if depth < needed:
            raise DomainError(f"depth {depth} cannot resolve the repair blocks (need {needed})")
        _check_depth(depth)
        w = self.base_w.upsample(depth).values.copy()
        v = self.base_v.upsample(depth).values.copy()
        for e in self.exceptional:
            span = 1 << (depth - e.cell.level)
            self._render(w, v, e.cell.index * span, span, e.target, self.rounds)
        root = self.base_w.origin
        return PiecewiseFn(depth, root, w), PiecewiseFn(depth, root, v)

    def round_rows(self) -> list[dict[str, float]]:
        """Defect, its decay and the strong dyadic A2 after each round 0..rounds."""
        rows: list[dict[str, float]] = []
        previous = None
        for r in range(self.rounds + 1):
            stage = self.at_round(r)
            measure = stage.defect_measure()
            sd = stage.strong_dyadic_A2()
            rows.append(
                {
                    "round": float(r),
                    "defect_measure": measure,
                    "ratio": measure / previous if previous else float("nan"),
                    "max_defect": stage.max_defect(),
                    "strong_dyadic_A2": sd,
                    "sd_over_Q": sd / self.Q,
                }
            )
            logger.info("Repair round %d: defect measure %.3e, [W]sd = %.6g", r, measure, sd)
            previous = measure
        return rows


def remodel_weights(
    model: WeightModel,
    frequencies: Sequence[int],
    rounds: Optional[int] = None,
    tol: float = 1e-9,
) -> RemodeledWeights:
    """Quasi-periodize (W, V) of a model and repair its defective exceptional cells.

    Args:
        model: The constructed weight
        frequencies: N vector of the first pass
        rounds: Repair rounds (default from settings)
        tol: ||<W>_J <V>_J - I|| above which an exceptional cell needs repair

    Raises:
        DepthExceededError: If the first-pass grid exceeds the remodel depth
    """
    settings = get_settings()
    rounds = settings.repair_rounds if rounds is None else rounds
    if rounds < 0:
        raise DomainError(f"rounds must be >= 0, got {rounds}")
    nvec = _check_frequencies(frequencies)
    total = iterated_depth(model.depth, nvec)
    _check_depth(total, settings.remodel_depth, "remodel first-pass depth")
    w, v = model.materialize()
    pair = PiecewiseFn(w.depth, w.origin, np.stack([w.values, v.values], axis=1))
    out, book = _iterate(pair, nvec, quasi=True, cap=settings.remodel_depth)
    base_w = PiecewiseFn(out.depth, out.origin, out.values[:, 0].copy())
    base_v = PiecewiseFn(out.depth, out.origin, out.values[:, 1].copy())

    exceptional = []
    for entry in book.by_role(IntervalRole.EXCEPTIONAL):
        mw, mv = w.average_on(entry.target), v.average_on(entry.target)
        if np.linalg.norm(mw @ mv - np.eye(2), 2) > tol:
            exceptional.append(ExceptionalCell(entry.interval, entry.target))
    logger.info(
        "Remodeled Q=%g with N=%s: first pass depth %d, %d defective exceptional cells",
        model.Q,
        nvec,
        out.depth,
        len(exceptional),
    )
    return RemodeledWeights(base_w, base_v, w, v, model.Q, exceptional, book, rounds)


# =============================================================================
# Transference
# =============================================================================


def leakage_norm(f: PiecewiseFn, N: int) -> float:
    """||1_{R \\ I} H^R P_I^N (f - <f>_I)|| in L2(R)."""
    centered = PiecewiseFn(f.depth, f.origin, f.values - f.mean())
    p = periodize(centered, N)
    left, right = float(f.origin.left), float(f.origin.right)
    length = right - left

    def density(s: float) -> float:
        return float(np.sum(line_transform(p, np.array([s])) ** 2))

    pieces = [
        (-np.inf, left - length),
        (left - length, left),
        (right, right + length),
        (right + length, np.inf),
    ]
    total = sum(integrate.quad(density, a, b, limit=200)[0] for a, b in pieces)
    return math.sqrt(max(total, 0.0))


def _hdy_pairing(f: PiecewiseFn, g: PiecewiseFn, constants: KernelConstants) -> float:
    return l2_inner(apply_shift(ShiftKind.HDY, f, constants=constants), g)


def transference_rhs(f: PiecewiseFn, g: PiecewiseFn, constants: KernelConstants) -> float:
    """(H^dy f, g) + c0 [(<f>_{I0+}, <g>_{I0-}) - (<f>_{I0-}, <g>_{I0+})]."""
    root = DyadicInterval.root()
    if f.origin != root or g.origin != root:
        raise DomainError("transference works with functions on I0")
    fm, fp = f.average_on(root.minus), f.average_on(root.plus)
    gm, gp = g.average_on(root.minus), g.average_on(root.plus)
    boundary = float(np.sum(fp * gm) - np.sum(fm * gp))
    return _hdy_pairing(f, g, constants) + C0 * boundary


def transference_experiment(
    f: PiecewiseFn,
    g: PiecewiseFn,
    frequency_family: Sequence[int],
    constants: KernelConstants,
    leakage: bool = True,
) -> TrendReport:
    """(H^R QP^N f, QP^N g) against its dyadic limit along constant vectors (N, N, ...)."""
    rhs = transference_rhs(f, g, constants)
    report = TrendReport()
    for n in frequency_family:
        qf, _ = iterated_qp(f, (n,))
        qg, _ = iterated_qp(g, (n,))
        lhs = pairing_line(qf, qg)
        row = TrendRow(int(n), lhs, rhs, leakage_norm(f, int(n)) if leakage else None)
        logger.info("Transference N=%d: lhs=%.6e rhs=%.6e", n, lhs, rhs)
        report.rows.append(row)
    return report


def start_measures(book: RemodelBookkeeping) -> dict[DyadicInterval, Fraction]:
    """Sum of |I| per target over the starting intervals."""
    return {
        target: book.start_measure(target)
        for target in {e.target for e in book.by_role(IntervalRole.START)}
    }
