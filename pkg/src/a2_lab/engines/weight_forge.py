# Author: Green Mountain Systems AI Inc.

"""Weight Forge - builds the 2x2 counterexample weight W_{Q, delta0}.

The weight is a martingale on a stopping tree:
- a stopping interval of generation n (level 2n) is split by a rotation
  step into two children whose frames turn by +-theta_n;
- each rotated child is split by a stretch step: its right child is a
  stopping interval of generation n + 1, its left child a terminal interval;
- terminal intervals, and the stopping intervals of the last generation,
  are closed by the terminal split so that W^-1 is the pointwise inverse
  of W on the leaves.

All nodes of one kind and generation carry the same eigenvalues, so the
model stores one eigenvalue table per generation and computes node
averages from the sign path on demand.
"""

import logging
import math
from typing import Iterator, Optional, Union

import numpy as np

from ..config import get_settings
from ..errors import ConstructionError, DepthExceededError, DomainError
from ..models.construction import ConstructionParams, EigenTable, NodeInfo
from ..models.core import NodeKind
from ..models.dyadic import DyadicInterval, PiecewiseFn
from ..models.matrices import Spectral2, SymMat2
from ..models.reports import ModelCheckReport
from ..models.scaled import ScaledReal
from . import mat2

logger = logging.getLogger(__name__)

Number = Union[float, ScaledReal]

GROWTH_SLACK = 1e-12


# =============================================================================
# Primitive steps
# =============================================================================


def _rotated_eigenvalues(
    alpha: ScaledReal,
    beta: ScaledReal,
    alpha_sharp: ScaledReal,
    beta_sharp: ScaledReal,
    delta: ScaledReal,
) -> tuple[ScaledReal, ScaledReal, ScaledReal, ScaledReal]:
    """(tilde_alpha, tilde_beta, tilde_alpha_sharp, tilde_beta_sharp) after rotating by arctan delta."""
    d2 = delta * delta
    denom = 1 - d2
    return (
        (alpha - d2 * beta) / denom,
        (beta - d2 * alpha) / denom,
        (alpha_sharp - d2 * beta_sharp) / denom,
        (beta_sharp - d2 * alpha_sharp) / denom,
    )


def rotation_step(
    v: Spectral2, w: Spectral2, q: float
) -> tuple[Spectral2, Spectral2, Spectral2, Spectral2]:
    """Split a (W^-1, W) average pair into two children with rotated frames.

    ``v`` is alpha a a^T + beta b b^T with alpha > beta and ``w`` is
    beta_sharp a a^T + alpha_sharp b b^T in the same frame. With
    delta = q (beta/alpha)^{1/2} the plus child turns by +arctan delta and the
    minus child by -arctan delta; the eigenvalues are chosen so that the
    children average back to (v, w).

    Returns:
        (v_plus, v_minus, w_plus, w_minus)

    Raises:
        DomainError: If the frames differ, alpha <= beta, or a rotated
            eigenvalue would be nonpositive
    """
    if abs(math.remainder(v.phi - w.phi, math.pi)) > 1e-15:
        raise DomainError("rotation_step needs v and w in one frame")
    alpha, beta = v.lam_a, v.lam_b
    beta_sharp, alpha_sharp = w.lam_a, w.lam_b
    if alpha <= beta:
        raise DomainError(f"rotation needs alpha > beta, got alpha={alpha}, beta={beta}")
    ratio = beta / alpha
    delta = q * ratio.sqrt()
    if delta * delta >= ratio:
        raise DomainError("rotation would produce nonpositive eigenvalue")
    ta, tb, tas, tbs = _rotated_eigenvalues(alpha, beta, alpha_sharp, beta_sharp, delta)
    if min(ta.sign(), tb.sign(), tas.sign(), tbs.sign()) <= 0:
        raise DomainError("rotation would produce nonpositive eigenvalue")
    theta = math.atan(delta.to_float())
    return (
        Spectral2(v.phi + theta, ta, tb),
        Spectral2(v.phi - theta, ta, tb),
        Spectral2(v.phi + theta, tbs, tas),
        Spectral2(v.phi - theta, tbs, tas),
    )


def stretch_step(
    x: Number, y: Number, s: float, Q: float
) -> tuple[tuple[Number, Number], tuple[Number, Number]]:
    """Split an eigen-axis pair (x, y) with x y = s Q.

    The plus part x+ = r x, y+ = y / (s r) has product Q; the minus part
    x- = (2 - r) x, y- = (2 - 1/(s r)) y has product in [1, 2]. Both pairs
    average back to (x, y).

    Raises:
        DomainError: If s is outside [0.9, 1] or x, y are not positive
    """
    if not (0.9 - GROWTH_SLACK <= s <= 1.0 + GROWTH_SLACK):
        raise DomainError(f"stretch parameter s={s} outside [0.9, 1]")
    if ScaledReal.of(x).sign() <= 0 or ScaledReal.of(y).sign() <= 0:
        raise DomainError("stretch_step needs positive x and y")
    r = 2.0 - 1.0 / Q
    plus = (r * x, y / (s * r))
    minus = ((2.0 - r) * x, (2.0 - 1.0 / (s * r)) * y)
    return plus, minus


def build_eigen_table(params: ConstructionParams) -> EigenTable:
    """Eigenvalue table for generations 0..n_max.

    Raises:
        ConstructionError: If a rotation or stretch precondition fails
    """
    Q, r, q = params.Q, params.r, params.effective_q
    alpha, beta, alpha_sharp, beta_sharp = params.seeds()
    table = EigenTable()
    for n in range(params.n_max + 1):
        if alpha <= beta:
            raise ConstructionError("eigenvalue order alpha > beta lost", n)
        delta = q * (beta / alpha).sqrt()
        ta, tb, tas, tbs = _rotated_eigenvalues(alpha, beta, alpha_sharp, beta_sharp, delta)
        if min(ta.sign(), tb.sign(), tas.sign(), tbs.sign()) <= 0:
            raise ConstructionError("rotation would produce nonpositive eigenvalue", n)
        s = (ta * tbs / Q).to_float()
        table.alpha.append(alpha)
        table.beta.append(beta)
        table.alpha_sharp.append(alpha_sharp)
        table.beta_sharp.append(beta_sharp)
        table.tilde_alpha.append(ta)
        table.tilde_beta.append(tb)
        table.tilde_alpha_sharp.append(tas)
        table.tilde_beta_sharp.append(tbs)
        table.delta.append(delta)
        table.theta.append(math.atan(delta.to_float()))
        table.s.append(s)
        m = delta * (tas - tbs) / (1 + delta * delta)
        table.t.append(m * alpha)
        table.t_tilde.append(params.q * (alpha_sharp * alpha * Q).sqrt())
        if n == params.n_max:
            break
        try:
            (alpha, beta_sharp), _ = stretch_step(ta, tbs, s, Q)
            (alpha_sharp, beta), _ = stretch_step(tas, tb, s, Q)
        except DomainError as exc:
            raise ConstructionError(str(exc), n) from exc
        logger.debug("generation %d: delta=%s s=%.15f", n, delta, s)
    return table


# =============================================================================
# The symbolic model
# =============================================================================


class WeightModel:
    """The constructed weight as a stopping tree with per-generation tables.

    Paths are bit strings from I0, '1' choosing the plus (right) child.
    Stopping intervals of generation n sit at level 2n, terminal intervals
    of generation n at level 2n + 2, and the materialized depth is
    2 n_max + 1.

    Example:
        model = build_weight(ConstructionParams(Q=16, delta0=1e-3, n_max=8))
        node = model.node("1011")
        node.kind, node.a2
    """

    def __init__(self, params: ConstructionParams, table: EigenTable) -> None:
        self._params = params
        self._table = table

    @property
    def params(self) -> ConstructionParams:
        return self._params

    @property
    def table(self) -> EigenTable:
        return self._table

    @property
    def n_max(self) -> int:
        return self._params.n_max

    @property
    def depth(self) -> int:
        return 2 * self._params.n_max + 1

    @property
    def Q(self) -> float:
        return self._params.Q

    @property
    def r(self) -> float:
        return self._params.r

    def theta(self, n: int) -> float:
        return self._table.theta[n] if self._params.rotate else 0.0

    def terminal_product(self, n: int) -> float:
        return self._table.terminal_product(n, self.r)

    # ===== Node values by kind and generation =====

    def stopping_pair(self, n: int, phi: float = 0.0) -> tuple[Spectral2, Spectral2]:
        t = self._table
        return (
            Spectral2(phi, t.alpha[n], t.beta[n]),
            Spectral2(phi, t.beta_sharp[n], t.alpha_sharp[n]),
        )

    def rotated_pair(self, n: int, phi: float = 0.0) -> tuple[Spectral2, Spectral2]:
        t = self._table
        return (
            Spectral2(phi, t.tilde_alpha[n], t.tilde_beta[n]),
            Spectral2(phi, t.tilde_beta_sharp[n], t.tilde_alpha_sharp[n]),
        )

    def terminal_pair(self, n: int, phi: float = 0.0) -> tuple[Spectral2, Spectral2]:
        t, r = self._table, self.r
        shrink = 2.0 - r
        grow = 2.0 - 1.0 / (t.s[n] * r)
        return (
            Spectral2(phi, shrink * t.tilde_alpha[n], grow * t.tilde_beta[n]),
            Spectral2(phi, grow * t.tilde_beta_sharp[n], shrink * t.tilde_alpha_sharp[n]),
        )

    @staticmethod
    def leaf_pair(
        v: Spectral2, w: Spectral2, p: float, sign: int
    ) -> tuple[Spectral2, Spectral2]:
        """Terminal split of a pair with V W = p I: W(1 +- D), V / (p (1 +- D)), D = (1 - 1/p)^{1/2}.

        This is ``mat2.terminal_children`` for a commuting pair, kept in
        extended range.
        """
        spread = math.sqrt(max(1.0 - 1.0 / p, 0.0))
        factor = 1.0 + sign * spread
        return v.scale(1.0 / (p * factor)), w.scale(factor)

    # ===== Path walking =====

    def node(self, path: str) -> NodeInfo:
        """Node reached from I0 along ``path``.

        Raises:
            ValueError: If the path has characters other than '0' and '1'
        """
        kind, gen, phi = NodeKind.STOPPING, 0, 0.0
        leaf_parent: Optional[NodeKind] = None
        sign = 0
        for bit in path:
            if bit not in "01":
                raise ValueError(f"invalid path character {bit!r}")
            plus = bit == "1"
            if kind == NodeKind.STOPPING:
                if gen < self.n_max:
                    kind, phi = NodeKind.ROTATED, phi + (self.theta(gen) if plus else -self.theta(gen))
                else:
                    kind, leaf_parent, sign = NodeKind.LEAF, NodeKind.STOPPING, 1 if plus else -1
            elif kind == NodeKind.ROTATED:
                if plus:
                    kind, gen = NodeKind.STOPPING, gen + 1
                else:
                    kind = NodeKind.TERMINAL
            elif kind == NodeKind.TERMINAL:
                kind, leaf_parent, sign = NodeKind.LEAF, NodeKind.TERMINAL, 1 if plus else -1
        return self._make_node(path, kind, gen, phi, leaf_parent, sign)

    def _make_node(
        self,
        path: str,
        kind: NodeKind,
        gen: int,
        phi: float,
        leaf_parent: Optional[NodeKind] = None,
        sign: int = 0,
    ) -> NodeInfo:
        if kind == NodeKind.STOPPING:
            v, w = self.stopping_pair(gen, phi)
        elif kind == NodeKind.ROTATED:
            v, w = self.rotated_pair(gen, phi)
        elif kind == NodeKind.TERMINAL:
            v, w = self.terminal_pair(gen, phi)
        elif leaf_parent == NodeKind.STOPPING:
            v, w = self.leaf_pair(*self.stopping_pair(gen, phi), self.Q, sign)
        else:
            v, w = self.leaf_pair(*self.terminal_pair(gen, phi), self.terminal_product(gen), sign)
        return NodeInfo(path, kind, gen, phi, v, w, sign if kind == NodeKind.LEAF else None)

    def representative(self, kind: NodeKind, n: int, sign: int = 1) -> NodeInfo:
        """A node of the given kind and generation on the all-plus stopping chain."""
        base = "11" * n
        if kind == NodeKind.STOPPING:
            return self.node(base)
        if kind == NodeKind.ROTATED:
            return self.node(base + "1")
        if kind == NodeKind.TERMINAL:
            return self.node(base + "10")
        tail = "1" if sign > 0 else "0"
        return self.node(base + (tail if n == self.n_max else "10" + tail))

    def iter_nodes(self, max_level: Optional[int] = None) -> Iterator[NodeInfo]:
        """Every dyadic node down to ``max_level`` (default: the materialized depth).

        Raises:
            DepthExceededError: If the enumeration would exceed the depth cap
        """
        max_level = self.depth if max_level is None else max_level
        cap = get_settings().depth_cap
        if max_level > cap:
            raise DepthExceededError(max_level, cap, "node enumeration level")
        for level in range(max_level + 1):
            for index in range(1 << level):
                yield self.node(format(index, f"0{level}b") if level else "")

    # ===== Stopping families as arrays =====

    def stopping_arrays(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(indices, angles) of the 2**n stopping intervals of generation n, in path order.

        Raises:
            DepthExceededError: If 2n exceeds the depth cap
        """
        cap = get_settings().depth_cap
        if 2 * n > cap:
            raise DepthExceededError(2 * n, cap, "stopping level")
        indices = np.zeros(1, dtype=np.int64)
        angles = np.zeros(1)
        for m in range(n):
            theta = self.theta(m)
            indices = np.stack([4 * indices + 1, 4 * indices + 3], axis=1).ravel()
            angles = np.stack([angles - theta, angles + theta], axis=1).ravel()
        return indices, angles

    def stopping_intervals(self, n: int) -> list[DyadicInterval]:
        indices, _ = self.stopping_arrays(n)
        return [DyadicInterval(2 * n, int(i)) for i in indices]

    def terminal_intervals(self, n: int) -> list[DyadicInterval]:
        """Terminal intervals of generation n: the left siblings of S_{n+1}."""
        return [DyadicInterval(I.level, I.index - 1) for I in self.stopping_intervals(n + 1)]

    # ===== Materialization =====

    def materialize(self) -> tuple[PiecewiseFn, PiecewiseFn]:
        """Leaf values (W, V) on the grid of depth 2 n_max + 1.

        Raises:
            DepthExceededError: If the depth exceeds the configured cap
        """
        depth = self.depth
        cap = get_settings().depth_cap
        if depth > cap:
            raise DepthExceededError(depth, cap, "materialized depth")
        w_vals = np.empty((1 << depth, 2, 2))
        v_vals = np.empty((1 << depth, 2, 2))

        def fill(starts: np.ndarray, span: int, phis: np.ndarray, v: Spectral2, w: Spectral2) -> None:
            idx = (starts[:, None] + np.arange(span)[None, :]).ravel()
            wm = mat2.frame_array(phis, w.lam_a.to_float(), w.lam_b.to_float())
            vm = mat2.frame_array(phis, v.lam_a.to_float(), v.lam_b.to_float())
            w_vals[idx] = np.repeat(wm, span, axis=0)
            v_vals[idx] = np.repeat(vm, span, axis=0)

        indices, angles = np.zeros(1, dtype=np.int64), np.zeros(1)
        for n in range(self.n_max + 1):
            span_s = 1 << (depth - 2 * n)
            starts = indices * span_s
            if n == self.n_max:
                for sign, offset in ((-1, 0), (1, span_s // 2)):
                    v, w = self.leaf_pair(*self.stopping_pair(n), self.Q, sign)
                    fill(starts + offset, span_s // 2, angles, v, w)
                break
            theta = self.theta(n)
            p = self.terminal_product(n)
            quarter = span_s // 4
            for eps, phis in ((0, angles - theta), (1, angles + theta)):
                term_start = starts + eps * (span_s // 2)
                for sign, offset in ((-1, 0), (1, quarter // 2)):
                    v, w = self.leaf_pair(*self.terminal_pair(n), p, sign)
                    fill(term_start + offset, quarter // 2, phis, v, w)
            indices = np.stack([4 * indices + 1, 4 * indices + 3], axis=1).ravel()
            angles = np.stack([angles - theta, angles + theta], axis=1).ravel()
        root = DyadicInterval.root()
        return PiecewiseFn(depth, root, w_vals), PiecewiseFn(depth, root, v_vals)


def build_weight(params: ConstructionParams) -> WeightModel:
    """Build the stopping-tree model of W_{Q, delta0}.

    Raises:
        ConstructionError: If a rotation or stretch precondition fails,
            naming the generation
    """
    table = build_eigen_table(params)
    logger.info(
        "Built weight Q=%g delta0=%g n_max=%d (rotate=%s, convention=%s)",
        params.Q,
        params.delta0,
        params.n_max,
        params.rotate,
        params.convention.value,
    )
    return WeightModel(params, table)


# =============================================================================
# A2 measurement
# =============================================================================


def dyadic_A2(model: WeightModel) -> float:
    """Max of a2_pair_char(<W^-1>_I, <W>_I) over all nodes of the tree.

    Nodes of one kind and generation differ only by a rotation, so one
    representative per (kind, generation) suffices.
    """
    best = 1.0
    for n in range(model.n_max + 1):
        kinds = [NodeKind.STOPPING]
        if n < model.n_max:
            kinds += [NodeKind.ROTATED, NodeKind.TERMINAL]
        for kind in kinds:
            best = max(best, model.representative(kind, n).a2)
        for sign in (1, -1):
            best = max(best, model.representative(NodeKind.LEAF, n, sign).a2)
    return best


def dyadic_A2_bruteforce(model: WeightModel) -> float:
    """The same maximum by visiting every node and using the general 2x2 formula."""
    best = 0.0
    for node in model.iter_nodes():
        best = max(best, mat2.a2_pair_char(node.v.to_sym(), node.w.to_sym()))
    return best


def dyadic_A2_materialized(w: PiecewiseFn, v: PiecewiseFn) -> float:
    """Max over every dyadic interval of the grid, from leaf values only."""
    best = 0.0
    for level in range(w.depth + 1):
        chars = mat2.a2_char_array(v.averages(level), w.averages(level))
        best = max(best, float(chars.max()))
    return best


# =============================================================================
# Invariant checks
# =============================================================================


def _rel_sym(a: SymMat2, b: SymMat2) -> float:
    scale = max(a.norm(), b.norm(), np.finfo(float).tiny)
    return (a - b).norm() / scale


def _mean_error(parent: Spectral2, left: Spectral2, right: Spectral2) -> float:
    """Relative error of parent = (left + right)/2 after normalizing by the parent's top eigenvalue."""
    unit = 1 / max(parent.lam_a, parent.lam_b)
    p = parent.scale(unit).to_sym()
    mean = (left.scale(unit).to_sym() + right.scale(unit).to_sym()).scale(0.5)
    return _rel_sym(p, mean)


def verify_model(model: WeightModel, rtol: float = 1e-10) -> ModelCheckReport:
    """Run every per-generation invariant of the construction.

    Args:
        model: A built weight model
        rtol: Relative tolerance of identity checks

    Returns:
        ModelCheckReport with one entry per invariant
    """
    t, Q, r = model.table, model.Q, model.r
    report = ModelCheckReport(Q=Q, n_max=model.n_max)
    c = t.ratio
    gens = range(len(t))

    product = max(
        max((t.alpha[n] * t.beta_sharp[n]).rel_diff(Q), (t.alpha_sharp[n] * t.beta[n]).rel_diff(Q))
        for n in gens
    )
    report.add("product_identity", product <= rtol, product, "alpha beta_sharp = alpha_sharp beta = Q")

    ratio = max(
        max(t.alpha_sharp[n].rel_diff(c * t.alpha[n]), t.beta_sharp[n].rel_diff(c * t.beta[n]))
        for n in gens
    )
    report.add("ratio_identity", ratio <= rtol, ratio, "alpha_sharp = c alpha, beta_sharp = c beta")

    slack = 1.0 + GROWTH_SLACK
    growth_ok, worst_growth = True, 0.0
    for n in range(len(t) - 1):
        checks = (
            (t.alpha[n + 1] * slack) / (t.alpha[n] * r),  # > 1
            (t.beta[n] / r) * slack / t.beta[n + 1],  # > 1
        )
        for value in checks:
            growth_ok &= value.to_float() >= 1.0
            worst_growth = max(worst_growth, 1.0 - value.to_float())
        if model.params.rotate:
            value = (t.delta[n] / r) * slack / t.delta[n + 1]
            growth_ok &= value.to_float() >= 1.0
    report.add("growth", growth_ok, worst_growth, "alpha up by r, beta and delta down by r")

    s_low, s_high = min(t.s), max(t.s)
    s_ok = s_low > 0.985 and s_high <= 1.0 + GROWTH_SLACK
    report.add("s_range", s_ok, s_low, "s_n in (0.985, 1]")

    mart = 0.0
    for n in range(model.n_max + 1):
        sv, sw = model.stopping_pair(n)
        if n < model.n_max:
            vp, vm, wp, wm = _rotated_children(model, n)
            mart = max(mart, _mean_error(sv, vm, vp), _mean_error(sw, wm, wp))
            rv, rw = model.rotated_pair(n)
            nv, nw = model.stopping_pair(n + 1)
            tv, tw = model.terminal_pair(n)
            mart = max(mart, _mean_error(rv, tv, nv), _mean_error(rw, tw, nw))
            p = model.terminal_product(n)
            lv = [model.leaf_pair(tv, tw, p, sign) for sign in (-1, 1)]
            mart = max(mart, _mean_error(tv, lv[0][0], lv[1][0]), _mean_error(tw, lv[0][1], lv[1][1]))
        else:
            lv = [model.leaf_pair(sv, sw, Q, sign) for sign in (-1, 1)]
            mart = max(mart, _mean_error(sv, lv[0][0], lv[1][0]), _mean_error(sw, lv[0][1], lv[1][1]))
    report.add("martingale", mart <= rtol, mart, "parent average = mean of child averages")

    a2 = dyadic_A2(model)
    report.add("dyadic_a2", a2 <= Q * (1 + rtol), a2, "dyadic A2 <= Q")

    terminal = max((model.terminal_product(n) for n in range(model.n_max)), default=1.0)
    report.add("terminal_a2", terminal <= 2.0 + rtol, terminal, "terminal A2 <= 2")

    lowner = min(
        min(
            (node.v.lam_a * node.w.lam_a).to_float(),
            (node.v.lam_b * node.w.lam_b).to_float(),
        )
        for n in range(model.n_max + 1)
        for node in _representatives(model, n)
    )
    report.add("lowner", lowner >= 1.0 - rtol, lowner, "<W>^-1 <= <W^-1> on every node")

    angle_ok, worst_angle = True, 0.0
    tail = 0.0
    for n in range(model.n_max, -1, -1):
        tail += model.theta(n)
        if model.theta(n) > 0:
            worst_angle = max(worst_angle, tail / model.theta(n))
            angle_ok &= tail <= 3.0 * model.theta(n) * (1 + GROWTH_SLACK)
    report.add("angle_bound", angle_ok, worst_angle, "sum_{m >= n} theta_m <= 3 theta_n")

    logger.info("Model checks Q=%g: %s", Q, "pass" if report.passed else f"fail {report.failed()}")
    return report


def _rotated_children(model: WeightModel, n: int) -> tuple[Spectral2, Spectral2, Spectral2, Spectral2]:
    v, w = model.stopping_pair(n)
    if not model.params.rotate:
        rv, rw = model.rotated_pair(n)
        return rv, rv, rw, rw
    return rotation_step(v, w, model.params.q)


def _representatives(model: WeightModel, n: int) -> list[NodeInfo]:
    nodes = [model.representative(NodeKind.STOPPING, n)]
    if n < model.n_max:
        nodes += [
            model.representative(NodeKind.ROTATED, n),
            model.representative(NodeKind.TERMINAL, n),
        ]
    nodes += [model.representative(NodeKind.LEAF, n, sign) for sign in (1, -1)]
    return nodes
