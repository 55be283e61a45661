# Author: Green Mountain Systems AI Inc.

"""Paraproduct evaluators on the witness f = 1_{I0} W^-1 b.

Pi runs over the stopping family S_1 .. S_{n_max - 1}. For J strictly
inside I the cross term reduces to

    int W h-hat_I h-hat_J (...) = +-<W h-hat_J>_J |J|,   + when J lies in I+,

so ||Pi f||^2 only needs node averages, never leaf quadrature.

Two evaluators compute it:
- brute force enumerates every (I, J) pair of stopping intervals;
- the frame recursion uses that every subtree below I in S_n is a rotated
  copy of one model subtree. With <W h-hat_J>_J = -m_k K_J,
  <W^-1>_J = alpha_k a a^T + beta_k b b^T and angle moments
  E[cos 2 phi_I] = C_n = prod_{m < n} cos 2 theta_m,

      D = sum_n 2^-n Q (alpha_n Ea_n + beta_n Eb_n),
      T_{n,k} = 2^-k B_k P_{n,k} sin 2 theta_n (alpha_n Ea_n - beta_n Eb_n),

  where Ea_n, Eb_n are the mean squares of (a_I, b), (b_I, b) over S_n,
  B_k = m_k (alpha_k + beta_k) / 2 and P_{n,k} = prod_{n < m < k} cos 2 theta_m.
  Summing over k uses G_n = B_{n+1}/2 + cos 2 theta_{n+1} G_{n+1} / 2, so
  the off-diagonal mass is sum_n 2^-n sin 2 theta_n G_n (...), linear in
  n_max. Everything runs in ScaledReal since alpha_n grows like r^n.
"""

import logging
import math
import time
from typing import Optional

import numpy as np

from ..config import get_settings
from ..errors import BudgetExceededError, DomainError
from ..models.core import EvaluatorKind, ShiftKind, WitnessChoice
from ..models.reports import DiagnosticsRecord, PiPiStarReport, QuadraticFormReport
from ..models.scaled import ScaledReal
from . import mat2
from .families import stopping_family
from .shifts import apply_paraproduct, weighted_pairing, witness
from .weight_forge import WeightModel

logger = logging.getLogger(__name__)


def witness_vector(choice: WitnessChoice) -> np.ndarray:
    """b in the frame of I0 (phi_0 = 0, so a0 = e1 and b0 = e2)."""
    if choice == WitnessChoice.A0:
        return np.array([1.0, 0.0])
    return np.array([1.0, 1.0])


def witness_norm_sq(model: WeightModel, b: np.ndarray) -> float:
    """||1_{I0} W^-1 b||^2_{L2(W)} = (b, <W^-1>_{I0} b)."""
    t = model.table
    return t.alpha[0].to_float() * b[0] ** 2 + t.beta[0].to_float() * b[1] ** 2


# =============================================================================
# Per-generation node arrays
# =============================================================================


class _Generation:
    """Averages of all 2**k stopping intervals of generation k, in path order."""

    def __init__(self, model: WeightModel, k: int) -> None:
        t = model.table
        _, phi = model.stopping_arrays(k)
        theta = model.theta(k)
        self.v = mat2.frame_array(phi, t.alpha[k].to_float(), t.beta[k].to_float())
        self.w = mat2.frame_array(phi, t.beta_sharp[k].to_float(), t.alpha_sharp[k].to_float())
        tas, tbs = t.tilde_alpha_sharp[k].to_float(), t.tilde_beta_sharp[k].to_float()
        ta, tb = t.tilde_alpha[k].to_float(), t.tilde_beta[k].to_float()
        # <W h-hat_J>_J and <W^-1 h-hat_J>_J from the rotated children
        self.m = 0.5 * (
            mat2.frame_array(phi + theta, tbs, tas) - mat2.frame_array(phi - theta, tbs, tas)
        )
        self.n = 0.5 * (
            mat2.frame_array(phi + theta, ta, tb) - mat2.frame_array(phi - theta, ta, tb)
        )
        self.length = 4.0 ** -k

    @staticmethod
    def apply(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
        return np.einsum("nij,nj->ni", mats, vecs)


def _nested_sum(
    outer: dict[int, np.ndarray], inner: dict[int, np.ndarray], half: str
) -> dict[tuple[int, int], float]:
    """sum_I sum_{J in S_k, J inside I} (outer_I, inner_J) 4^-k per generation pair.

    ``half`` selects J inside I+ ("plus"), inside I- ("minus"), their signed
    difference ("signed") or all of them ("all").
    """
    out: dict[tuple[int, int], float] = {}
    for n in sorted(outer):
        for k in sorted(inner):
            if k <= n:
                continue
            grouped = inner[k].reshape(1 << n, 2, 1 << (k - n - 1), 2).sum(axis=2)
            if half == "plus":
                part = grouped[:, 1]
            elif half == "minus":
                part = grouped[:, 0]
            elif half == "signed":
                part = grouped[:, 1] - grouped[:, 0]
            else:
                part = grouped[:, 0] + grouped[:, 1]
            out[(n, k)] = float(np.einsum("ni,ni->", outer[n], part)) * 4.0**-k
    return out


def _pair_count(last: int) -> int:
    return sum((k - 1) << k for k in range(2, last + 1))


def _check_budget(model: WeightModel) -> None:
    pairs = _pair_count(model.n_max - 1)
    budget = get_settings().pair_budget
    if pairs > budget:
        raise BudgetExceededError(pairs, budget)


# =============================================================================
# Quadratic form of Pi
# =============================================================================


def pi_quadratic_bruteforce(model: WeightModel, b: np.ndarray) -> QuadraticFormReport:
    """||Pi f||^2_{L2(W)} by enumerating every pair of stopping intervals.

    Raises:
        BudgetExceededError: If the pair count exceeds the configured budget;
            use ``pi_quadratic_fast`` instead
        DepthExceededError: If a generation is deeper than the depth cap
    """
    start = time.perf_counter()
    _check_budget(model)
    b = np.asarray(b, dtype=float)
    last = model.n_max - 1
    gens = {k: _Generation(model, k) for k in range(1, last + 1)}
    vb = {k: g.apply(g.v, np.broadcast_to(b, (g.v.shape[0], 2))) for k, g in gens.items()}

    diagonal = 0.0
    for k, g in gens.items():
        diagonal += float(np.einsum("ni,ni->", g.apply(g.w, vb[k]), vb[k])) * g.length
    mvb = {k: g.apply(g.m, vb[k]) for k, g in gens.items()}
    pairs = _nested_sum(vb, mvb, "signed")
    offdiag = sum(pairs[key] for key in sorted(pairs))

    keep = len(pairs) <= get_settings().store_pair_cap
    report = QuadraticFormReport(
        method=EvaluatorKind.BRUTE,
        diagonal=diagonal,
        offdiag=offdiag,
        norm_f_sq=witness_norm_sq(model, b),
        pairs=pairs if keep else {},
        runtime_ms=1000.0 * (time.perf_counter() - start),
    )
    logger.info(
        "Brute force Pi form Q=%g n_max=%d: %d generation pairs", model.Q, model.n_max, len(pairs)
    )
    return report


def pi_quadratic_fast(model: WeightModel, b: np.ndarray) -> QuadraticFormReport:
    """||Pi f||^2_{L2(W)} by the frame recursion.

    Linear in n_max; the per-pair detail, kept only below the store cap, is quadratic.
    """
    start = time.perf_counter()
    t, Q = model.table, model.Q
    b = np.asarray(b, dtype=float)
    last = model.n_max - 1
    norm_b = float(b @ b)
    c2psi = math.cos(2.0 * math.atan2(b[1], b[0]))

    ea: list[float] = []
    eb: list[float] = []
    sin2: list[ScaledReal] = []
    cos2: list[float] = []
    log_c = 0.0  # log C_n
    for n in range(last + 1):
        one_minus_c = -math.expm1(log_c)
        ea.append(0.5 * norm_b * ((1.0 + c2psi) - c2psi * one_minus_c))
        eb.append(0.5 * norm_b * ((1.0 - c2psi) + c2psi * one_minus_c))
        d = t.delta[n] if model.params.rotate else ScaledReal(0.0)
        d2 = d * d
        sin2.append(2 * d / (1 + d2))
        cos2_minus_one = (-2 * d2 / (1 + d2)).to_float()
        cos2.append(1.0 + cos2_minus_one)
        log_c += math.log1p(cos2_minus_one)

    def bracket(n: int, sign: int) -> ScaledReal:
        return t.alpha[n] * ea[n] + t.beta[n] * (sign * eb[n])

    diagonal = ScaledReal(0.0)
    for n in range(1, last + 1):
        diagonal = diagonal + ScaledReal(1.0, -n) * Q * bracket(n, 1)

    weights = {k: t.m(k) * (t.alpha[k] + t.beta[k]) * 0.5 for k in range(1, last + 1)}
    tail: dict[int, ScaledReal] = {last: ScaledReal(0.0)}
    for n in range(last - 1, 0, -1):
        tail[n] = (weights[n + 1] + tail[n + 1] * cos2[n + 1]) * 0.5

    offdiag = ScaledReal(0.0)
    for n in range(1, last):
        offdiag = offdiag + ScaledReal(1.0, -n) * sin2[n] * tail[n] * bracket(n, -1)

    pairs: dict[tuple[int, int], float] = {}
    if last * (last - 1) // 2 <= get_settings().store_pair_cap:
        for n in range(1, last):
            outer = sin2[n] * bracket(n, -1)
            product = 1.0
            for k in range(n + 1, last + 1):
                pairs[(n, k)] = (ScaledReal(1.0, -k) * weights[k] * product * outer).to_float()
                product *= cos2[k]

    report = QuadraticFormReport(
        method=EvaluatorKind.FRAME_RECURSION,
        diagonal=diagonal.to_float(),
        offdiag=offdiag.to_float(),
        norm_f_sq=witness_norm_sq(model, b),
        pairs=pairs,
        runtime_ms=1000.0 * (time.perf_counter() - start),
    )
    logger.info(
        "Frame recursion Pi form Q=%g n_max=%d: ratio=%.6g (%.1f ms)",
        model.Q,
        model.n_max,
        report.ratio,
        report.runtime_ms,
    )
    return report


def pi_quadratic(model: WeightModel, b: np.ndarray, method: EvaluatorKind) -> QuadraticFormReport:
    if method == EvaluatorKind.BRUTE:
        return pi_quadratic_bruteforce(model, b)
    if method == EvaluatorKind.FRAME_RECURSION:
        return pi_quadratic_fast(model, b)
    raise DomainError(f"Unknown evaluator: {method}")


def pi_quadratic_materialized(model: WeightModel, b: np.ndarray) -> float:
    """Leafwise integral of (W Pi f, Pi f) on the materialized grid."""
    w, v = model.materialize()
    pi_f = apply_paraproduct(witness(v, b), stopping_family(model))
    return weighted_pairing(w, pi_f, pi_f)


# =============================================================================
# (Pi f, Pi* f) sign structure
# =============================================================================


def pi_pistar_pairing(model: WeightModel, b: np.ndarray) -> PiPiStarReport:
    """Term groups of (Pi f, Pi* f)_{L2(W)} with Pi* g = sum <g h-hat_I>_I 1_I.

    Uses <f h-hat_J>_J = <W^-1 h-hat_J>_J b and the same reduction as the
    quadratic form.

    Raises:
        BudgetExceededError: If the pair count exceeds the configured budget
    """
    _check_budget(model)
    b = np.asarray(b, dtype=float)
    last = model.n_max - 1
    gens = {k: _Generation(model, k) for k in range(1, last + 1)}
    vb: dict[int, np.ndarray] = {}
    nb: dict[int, np.ndarray] = {}
    mvb: dict[int, np.ndarray] = {}
    wnb: dict[int, np.ndarray] = {}
    diagonal = 0.0
    pistar_diag = 0.0
    for k, g in gens.items():
        vb[k] = g.apply(g.v, np.broadcast_to(b, (g.v.shape[0], 2)))
        nb[k] = g.apply(g.n, np.broadcast_to(b, (g.v.shape[0], 2)))
        mvb[k] = g.apply(g.m, vb[k])
        wnb[k] = g.apply(g.w, nb[k])
        diagonal -= float(np.einsum("ni,ni->", g.apply(g.m, nb[k]), vb[k])) * g.length
        pistar_diag += float(np.einsum("ni,ni->", wnb[k], nb[k])) * g.length

    def total(parts: dict[tuple[int, int], float]) -> float:
        return sum(parts[key] for key in sorted(parts))

    minus_half = total(_nested_sum(vb, wnb, "minus"))
    plus_half = -total(_nested_sum(vb, wnb, "plus"))
    crossed = -total(_nested_sum(nb, mvb, "all"))
    pistar = pistar_diag + 2.0 * total(_nested_sum(nb, wnb, "all"))
    pi_norm = pi_quadratic_bruteforce(model, b).total

    report = PiPiStarReport(diagonal, minus_half, plus_half, crossed, pi_norm, pistar)
    logger.info("(Pi f, Pi* f) Q=%g n_max=%d: %.6g", model.Q, model.n_max, report.pairing)
    return report


def pistar_norm_materialized(model: WeightModel, b: np.ndarray) -> tuple[float, float]:
    """(||Pi* f||^2_W, (Pi f, Pi* f)_W) from leaf values."""
    w, v = model.materialize()
    f = witness(v, b)
    family = stopping_family(model)
    pi_f = apply_paraproduct(f, family)
    pistar_f = apply_paraproduct(f, family, ShiftKind.PI_ADJOINT)
    return weighted_pairing(w, pistar_f, pistar_f), weighted_pairing(w, pi_f, pistar_f)


# =============================================================================
# Lower bound diagnostics
# =============================================================================


def stopping_angle(model: WeightModel, k: int, position: int) -> float:
    """Frame angle of the stopping interval at ``position`` (path order) in S_k."""
    angle = 0.0
    for m in range(k):
        bit = (position >> (k - 1 - m)) & 1
        angle += model.theta(m) if bit else -model.theta(m)
    return angle


def _frame(phi: float, lam_a: float, lam_b: float) -> np.ndarray:
    return mat2.frame_array(np.array(phi), lam_a, lam_b)


def _k_matrix(phi: float) -> np.ndarray:
    """K = a b^T + b a^T in the frame phi."""
    s, c = math.sin(2.0 * phi), math.cos(2.0 * phi)
    return np.array([[-s, c], [c, s]])


def _rel_error(actual: np.ndarray, expected: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(expected)), float(np.linalg.norm(actual)), 1e-300)
    return float(np.linalg.norm(actual - expected)) / scale


def lower_bound_diagnostics(
    model: WeightModel,
    n: int,
    i: int,
    k: int,
    j: int,
    b: Optional[np.ndarray] = None,
) -> DiagnosticsRecord:
    """Main term and residual of the (I, J) off-diagonal term, I in S_n, J in S_k.

    Args:
        model: A built weight model
        n, i: Generation and path-order position of I
        k, j: Generation and path-order position of J, a stopping descendant of I
        b: Witness vector (default a0)

    Returns:
        DiagnosticsRecord with s_J, t_J, sigma_I, tau_I, the term, its main
        part -alpha_n t_k (a_I, b)^2 (a_I, b_J) and the residual, plus the
        even-shift neighbour differences and coupling of J

    Raises:
        DomainError: If J is not a stopping descendant of I with rotated children
    """
    if not (0 <= n < k < model.n_max):
        raise DomainError(f"need 0 <= n < k < n_max, got n={n}, k={k}, n_max={model.n_max}")
    if j >> (k - n) != i or not 0 <= j < (1 << k):
        raise DomainError(f"position {j} of S_{k} is not below position {i} of S_{n}")
    b = np.array([1.0, 0.0]) if b is None else np.asarray(b, dtype=float)
    t, r = model.table, model.r
    names = ("alpha", "beta", "tilde_alpha_sharp", "tilde_beta_sharp")
    eig = {name: getattr(t, name)[k].to_float() for name in names}
    alpha_n, beta_n = t.alpha[n].to_float(), t.beta[n].to_float()
    phi_i, phi_j = stopping_angle(model, n, i), stopping_angle(model, k, j)
    theta = model.theta(k)
    a_i = np.array([math.cos(phi_i), math.sin(phi_i)])
    b_i = np.array([-math.sin(phi_i), math.cos(phi_i)])
    a_j = np.array([math.cos(phi_j), math.sin(phi_j)])
    b_j = np.array([-math.sin(phi_j), math.cos(phi_j)])

    v_i = _frame(phi_i, alpha_n, beta_n)
    v_j = _frame(phi_j, eig["alpha"], eig["beta"])
    m_j = 0.5 * (
        _frame(phi_j + theta, eig["tilde_beta_sharp"], eig["tilde_alpha_sharp"])
        - _frame(phi_j - theta, eig["tilde_beta_sharp"], eig["tilde_alpha_sharp"])
    )
    term = float((m_j @ v_j @ b) @ (v_i @ b))

    m_k = t.m(k).to_float()
    t_k = t.t[k].to_float()
    s_J = -m_k * eig["beta"] * float(b_j @ b)
    t_J = t_k * float(a_j @ b)
    sigma = alpha_n * float(a_i @ b)
    tau = beta_n * float(b_i @ b)
    main = -alpha_n * t_k * float(a_i @ b) ** 2 * float(a_i @ b_j)
    delta_n = t.delta[n].to_float()

    # even shift: stopping and terminal neighbour differences of <W> inside J
    stop_w = [model.stopping_pair(k + 1, phi_j + s * theta)[1].to_sym().to_array() for s in (1, -1)]
    term_w = [model.terminal_pair(k, phi_j + s * theta)[1].to_sym().to_array() for s in (1, -1)]
    d = t.delta[k].to_float()
    factor = 0.5 * d / (1.0 + d * d)
    kj = _k_matrix(phi_j)
    stop_expected = factor * (
        t.beta_sharp[k + 1].to_float() - t.alpha_sharp[k + 1].to_float()
    ) * kj
    grow = 2.0 - 1.0 / (t.s[k] * r)
    shrink = 2.0 - r
    term_gap = grow * eig["tilde_beta_sharp"] - shrink * eig["tilde_alpha_sharp"]
    term_expected = factor * term_gap * kj
    stop_err = _rel_error(0.25 * (stop_w[0] - stop_w[1]), stop_expected)
    term_err = _rel_error(0.25 * (term_w[0] - term_w[1]), term_expected)

    coupling_matrix = 0.25 * (stop_w[0] - term_w[0] - stop_w[1] + term_w[1])
    n_j = t.n_coef(k).to_float() * kj
    n_i = t.n_coef(n).to_float() * _k_matrix(phi_i)
    coupling = abs(float((coupling_matrix @ n_j @ b) @ (n_i @ b)))
    params = model.params
    bound = params.q**2 * model.Q * params.delta0 * t.alpha[0].to_float()

    return DiagnosticsRecord(
        n=n,
        k=k,
        s_J=s_J,
        t_J=t_J,
        sigma_I=sigma,
        tau_I=tau,
        term=term,
        main_term=main,
        residual=term - main,
        scale=alpha_n * t_k * delta_n * delta_n,
        t_over_t_tilde=(t.t[k] / t.t_tilde[k]).to_float(),
        stop_diff_error=stop_err,
        terminal_diff_error=term_err,
        even_coupling=coupling,
        even_coupling_bound=bound,
    )


def random_diagnostics(
    model: WeightModel,
    rng: np.random.Generator,
    count: int,
    b: Optional[np.ndarray] = None,
) -> list[DiagnosticsRecord]:
    """Diagnostics for ``count`` random (I, J) pairs with 1 <= n < k < n_max."""
    if model.n_max < 3:
        raise DomainError("random diagnostics need n_max >= 3")
    records = []
    for _ in range(count):
        k = int(rng.integers(2, model.n_max))
        n = int(rng.integers(1, k))
        j = int(rng.integers(0, 1 << min(k, 62)))
        records.append(lower_bound_diagnostics(model, n, j >> (k - n), k, j, b))
    return records
