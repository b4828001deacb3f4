"""Completeness certificates and finite-rank joint constructions.

A joint is *complete* (in the X -> Y direction) when the only functions of X
whose conditional expectation given Y is constant are the constants
themselves.  On finite alphabets that is a rank condition: the centered
conditional-expectation operator must have a trivial kernel, which needs
|X| <= |Y| and every nontrivial singular value strictly positive.  When the
test fails, a witness function is produced, not just a boolean: a
standardized phi whose image E{phi(X)|Y} has (near) zero variance.

The other half of this module builds joints on the opposite end of the
scale: conditionals of the form

    p(x | y) = p0(x) + sum_{i<m} p_i(x) q_i(y)

whose conditional-expectation images span at most m directions beyond the
constants, so the order-m scale value vanishes identically.  These are the
canonical witnesses that each rung of the scale is genuinely weaker than the
one below it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidDistributionError
from .joints import (
    DiscreteJoint,
    FunctionTable,
    make_finite_rank_conditional,
    make_joint,
)
from .spectral import (
    DEFAULT_ORDER_TOL,
    _deflated_normalized,
    dependence_scale,
    singular_spectrum,
)


@dataclass(frozen=True)
class CompletenessResult:
    """Outcome of a completeness check.

    ``min_sigma`` is the smallest singular value that had to be positive
    (None when the dimension condition |X| <= |Y| already fails).  For an
    incomplete joint, ``witness`` is a standardized function of X with
    near-constant conditional expectation; for a complete one it is None.
    """

    complete: bool
    min_sigma: float | None
    witness: FunctionTable | None

    @property
    def certificate(self) -> float | FunctionTable:
        return self.witness if self.witness is not None else self.min_sigma


def check_completeness(j: DiscreteJoint, tol: float = DEFAULT_ORDER_TOL) -> CompletenessResult:
    """Decide completeness of the X -> Y conditional family, with certificate.

    The dimension condition is short-circuited first: with |X| > |Y| a
    nonconstant kernel function always exists.  Otherwise the joint is
    complete iff all min(|X|, |Y|) - 1 nontrivial singular values exceed
    ``tol``.
    """
    if j.n_x > j.n_y:
        return CompletenessResult(
            complete=False, min_sigma=None, witness=_kernel_witness(j, tol)
        )
    sigma = singular_spectrum(j).sigma
    if sigma.size == 0:
        # |X| = 1: only constants exist at all, so the condition is vacuous.
        return CompletenessResult(complete=True, min_sigma=None, witness=None)
    smallest = float(sigma[-1])
    if smallest > tol:
        return CompletenessResult(complete=True, min_sigma=smallest, witness=None)
    return CompletenessResult(
        complete=False, min_sigma=smallest, witness=_kernel_witness(j, tol)
    )


def _kernel_witness(j: DiscreteJoint, tol: float) -> FunctionTable:
    """A standardized phi on X whose conditional image is (near) constant.

    Taken from the left singular directions of the deflated normalized table:
    any direction orthogonal to sqrt(p_x) with singular value <= tol maps to
    an image of variance sigma^2 <= tol^2.
    """
    Qc, u0, _ = _deflated_normalized(j)
    U, s, _ = np.linalg.svd(Qc, full_matrices=True)
    padded = np.zeros(U.shape[1])
    padded[: s.size] = s
    small = np.nonzero(padded <= tol)[0]
    cand = U[:, small]
    # The constant direction itself sits in this null space by construction;
    # project it out and keep the most prominent survivor.
    cand = cand - np.outer(u0, u0 @ cand)
    norms = np.sqrt((cand**2).sum(axis=0))
    best = int(np.argmax(norms))
    if norms[best] <= 1e-8:  # pragma: no cover - only if called on a complete joint
        raise InvalidDistributionError("no kernel witness exists; the joint is complete")
    a = cand[:, best] / norms[best]
    a = a - u0 * (u0 @ a)
    a = a / np.sqrt(a @ a)
    return FunctionTable(a / np.sqrt(j.p_x), "x", standardized=True)


def make_finite_rank_joint(
    p0: np.ndarray,
    components: Sequence[tuple[np.ndarray, np.ndarray]],
    p_y: np.ndarray,
) -> DiscreteJoint:
    """Joint with conditional p(x|y) = p0(x) + sum_i p_i(x) q_i(y).

    Each component is a pair (p_i on X summing to zero, q_i on Y); the
    resulting conditional must stay nonnegative cell by cell.  The images
    E{phi(X)|Y} of all inputs then live in span{1, q_1, ..., q_m}, so the
    joint's order-m scale value is exactly zero with m = len(components).
    """
    p_y = np.asarray(p_y, dtype=float)
    if p_y.ndim != 1 or p_y.size == 0 or np.any(p_y <= 0):
        raise InvalidDistributionError(
            "p_y must be a strictly positive probability vector"
        )
    if abs(p_y.sum() - 1.0) > 1e-9:
        raise InvalidDistributionError(
            f"p_y has mass {float(p_y.sum())!r}, outside 1 +/- 1e-09"
        )
    p_y = p_y / p_y.sum()
    cond = make_finite_rank_conditional(p0, components, p_y.size)
    return make_joint(cond * p_y[None, :])


def verify_class_membership(
    j: DiscreteJoint, m: int, tol: float = DEFAULT_ORDER_TOL
) -> bool:
    """True iff the order-m scale value of ``j`` vanishes within ``tol``.

    Membership is nested downward: verify at m implies verify at every
    larger order.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return bool(dependence_scale(j, m, tol=tol).d[m] <= tol)
