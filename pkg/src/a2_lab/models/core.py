# Author: Green Mountain Systems AI Inc.

"""Shared enumerations used across the lab.

These give one vocabulary to engines, reports and the CLI for:
- Node kinds of the constructed stopping tree
- Dyadic operator kinds
- Witness vectors, evaluators and seed conventions
- Sparse family kinds
"""

from enum import Enum


# =============================================================================
# Enums
# =============================================================================


class NodeKind(str, Enum):
    """Role of a dyadic interval in the constructed weight tree."""

    STOPPING = "stopping"
    ROTATED = "rotated"
    TERMINAL = "terminal"
    LEAF = "leaf"


class SeedConvention(str, Enum):
    """How the generation-0 eigenvalues are chosen."""

    SYMMETRIC = "symmetric"
    ALPHA0_FIXED = "alpha0-fixed"


class WitnessChoice(str, Enum):
    """Witness vector b for f = W^-1 b on I0."""

    A0 = "a0"
    A0_PLUS_B0 = "a0+b0"


class EvaluatorKind(str, Enum):
    """Evaluation method of the paraproduct quadratic form."""

    BRUTE = "brute"
    FRAME_RECURSION = "frame-recursion"


class FamilyKind(str, Enum):
    """Sparse interval families derived from a weight model."""

    STOPPING = "stopping"
    PARENTS = "parents"
    STOPPING_TERMINAL = "stopping_terminal"
    INTERNAL = "internal"


class ShiftKind(str, Enum):
    """Dyadic operators understood by ``shifts.apply_shift``."""

    SHA = "sha"
    S_ODD = "s_odd"
    S_ODD_ADJOINT = "s_odd_adjoint"
    S0_ODD = "s0_odd"
    S_EVEN = "s_even"
    S_L = "s_l"
    S_L_ADJOINT = "s_l_adjoint"
    PI = "pi"
    PI_ADJOINT = "pi_adjoint"
    PI1 = "pi1"
    PI2 = "pi2"
    PI3 = "pi3"
    HDY = "hdy"
    S_SPARSE = "s_sparse"
    S0_SPARSE = "s0_sparse"
    SHA_SPARSE = "sha_sparse"
    HDY_SPARSE = "hdy_sparse"


class ExperimentName(str, Enum):
    """Named experiments of the ``a2-lab run`` command."""

    CONSTRUCT_VERIFY = "construct-verify"
    TERMINAL_ORACLE = "terminal-oracle"
    EVALUATOR_EQUIVALENCE = "evaluator-equivalence"
    PI_EXPONENT = "pi-exponent"
    SIGN_STRUCTURE = "sign-structure"
    CONTROLLED_PARTS = "controlled-parts"
    KERNEL_IDENTITY = "kernel-identity"
    TRANSFERENCE = "transference"
    REMODEL = "remodel"
    DEGENERATE_CONTROLS = "degenerate-controls"
    HDY_WITNESS = "hdy-witness"
    EVEN_SHIFT = "even-shift"


class IntervalRole(str, Enum):
    """Role of an interval in the remodeling bookkeeping."""

    START = "start"
    COPY = "copy"
    EXCEPTIONAL = "exceptional"
    STOP = "stop"
