"""Joint distribution containers and structural operations.

The discrete side of the package works on finite joint probability tables
P(x, y) with strictly positive marginals; the Gaussian side works on a
partitioned covariance matrix.  Everything downstream (spectra, transforms,
completeness) consumes these containers, so validation is front-loaded here:
a constructed object is always safe to compute with.

Tolerances: construction-time mass checks use 1e-12; external inputs (CSV
entry points in :mod:`depscale.io`) are accepted up to 1e-9 deviation and
then renormalized exactly, which is also the contract of :func:`make_joint`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import (
    ComponentNotCenteredError,
    InvalidBlockError,
    InvalidDistributionError,
    InvalidPartitionError,
    NegativeConditionalError,
    NegativeEntryError,
    NotNormalizedError,
    NotPositiveDefiniteError,
    TooFewSamplesError,
    ZeroMarginalError,
)

#: Allowed deviation of an *input* table's total mass from 1 before rejection.
INPUT_MASS_TOL = 1e-9

#: Mass consistency required of tables produced by internal constructions.
CONSTRUCTION_MASS_TOL = 1e-12


def _frozen_array(a: np.ndarray, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DiscreteJoint:
    """A finite joint probability table.

    ``probs[x, y]`` is P(X = x, Y = y).  Entries are nonnegative, the total
    mass is renormalized to 1 exactly at construction, and every row and
    column marginal is strictly positive (zero-mass atoms are rejected, not
    silently dropped).  Optional ``labels_x`` / ``labels_y`` name the atoms;
    they play no role in any computation.
    """

    probs: np.ndarray
    labels_x: tuple[str, ...] | None = None
    labels_y: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.size == 0:
            raise InvalidDistributionError(
                f"joint table must be a nonempty 2-D array, got shape {p.shape}"
            )
        if not np.all(np.isfinite(p)):
            raise InvalidDistributionError("joint table contains non-finite entries")
        if np.any(p < 0):
            x, y = np.argwhere(p < 0)[0]
            raise NegativeEntryError(
                f"negative probability {float(p[x, y])!r} at cell ({x}, {y})"
            )
        total = p.sum()
        if abs(total - 1.0) > INPUT_MASS_TOL:
            raise NotNormalizedError(
                f"joint table mass is {float(total)!r}, outside 1 +/- {INPUT_MASS_TOL}"
            )
        p = p / total  # exact renormalization after validation
        if np.any(p.sum(axis=1) <= 0):
            raise ZeroMarginalError(
                f"row {int(np.argmin(p.sum(axis=1)))} has zero mass"
            )
        if np.any(p.sum(axis=0) <= 0):
            raise ZeroMarginalError(
                f"column {int(np.argmin(p.sum(axis=0)))} has zero mass"
            )
        object.__setattr__(self, "probs", _frozen_array(p))
        for name, n in (("labels_x", p.shape[0]), ("labels_y", p.shape[1])):
            labels = getattr(self, name)
            if labels is not None:
                labels = tuple(str(s) for s in labels)
                if len(labels) != n:
                    raise InvalidDistributionError(
                        f"{name} has {len(labels)} entries for {n} atoms"
                    )
                object.__setattr__(self, name, labels)

    @property
    def n_x(self) -> int:
        return self.probs.shape[0]

    @property
    def n_y(self) -> int:
        return self.probs.shape[1]

    @property
    def p_x(self) -> np.ndarray:
        """Marginal distribution of X (row sums)."""
        return self.probs.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        """Marginal distribution of Y (column sums)."""
        return self.probs.sum(axis=0)

    def transposed(self) -> "DiscreteJoint":
        """The joint with the roles of X and Y swapped."""
        return DiscreteJoint(self.probs.T, self.labels_y, self.labels_x)


def make_joint(
    probs: np.ndarray | Sequence[Sequence[float]],
    labels_x: Sequence[str] | None = None,
    labels_y: Sequence[str] | None = None,
) -> DiscreteJoint:
    """Validate and exactly renormalize a probability table.

    Accepts any nonnegative rectangular table whose mass is within 1e-9 of 1
    and whose row/column sums are all strictly positive.
    """
    return DiscreteJoint(
        np.asarray(probs, dtype=float),
        None if labels_x is None else tuple(labels_x),
        None if labels_y is None else tuple(labels_y),
    )


def marginals(j: DiscreteJoint) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(p_x, p_y)``, the row and column marginals of ``j``."""
    return j.p_x, j.p_y


def conditional_matrix(j: DiscreteJoint) -> np.ndarray:
    """Conditional table K with ``K[x, y] = P(X = x | Y = y)``.

    Every column is a probability vector; columns are well defined because
    construction guarantees positive column marginals.
    """
    return j.probs / j.p_y[None, :]


def augment_with_independent(j: DiscreteJoint, r: np.ndarray) -> DiscreteJoint:
    """Extend Y with an independent coordinate Z ~ r.

    Returns the joint of (X, (Y, Z)) with P(x, (y, z)) = P(x, y) * r(z).
    Columns are ordered with Y major and Z minor, i.e. column index
    ``y * len(r) + z``, which :func:`coarsen_y` over consecutive groups of
    ``len(r)`` columns inverts exactly.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise InvalidDistributionError("r must be a nonempty 1-D probability vector")
    if not np.all(np.isfinite(r)):
        raise InvalidDistributionError("r contains non-finite entries")
    if np.any(r < 0):
        raise InvalidDistributionError("r contains a negative entry")
    if np.any(r == 0):
        raise InvalidDistributionError("r contains a zero-mass atom")
    if abs(r.sum() - 1.0) > INPUT_MASS_TOL:
        raise InvalidDistributionError(
            f"r has mass {float(r.sum())!r}, outside 1 +/- {INPUT_MASS_TOL}"
        )
    r = r / r.sum()
    labels_y = None
    if j.labels_y is not None:
        labels_y = tuple(
            f"{ly}|z{k}" for ly in j.labels_y for k in range(r.size)
        )
    return DiscreteJoint(np.kron(j.probs, r[None, :]), j.labels_x, labels_y)


def coarsen_y(j: DiscreteJoint, partition: Sequence[Sequence[int]]) -> DiscreteJoint:
    """Merge Y atoms along a partition of the column indices.

    ``partition`` is a list of groups of 0-based column indices covering every
    column exactly once.  Group order becomes the new column order.  This is
    deterministic post-processing of Y, so no dependence measure can increase
    under it.
    """
    seen: set[int] = set()
    groups: list[list[int]] = []
    for g in partition:
        idx = [int(i) for i in g]
        if len(idx) == 0:
            raise InvalidPartitionError("empty group in partition")
        for i in idx:
            if i < 0 or i >= j.n_y:
                raise InvalidPartitionError(
                    f"column index {i} out of range for {j.n_y} columns"
                )
            if i in seen:
                raise InvalidPartitionError(f"column index {i} appears twice")
            seen.add(i)
        groups.append(idx)
    if len(seen) != j.n_y:
        missing = sorted(set(range(j.n_y)) - seen)
        raise InvalidPartitionError(f"columns {missing} not covered by partition")
    cols = np.stack([j.probs[:, idx].sum(axis=1) for idx in groups], axis=1)
    labels_y = None
    if j.labels_y is not None:
        labels_y = tuple("+".join(j.labels_y[i] for i in idx) for idx in groups)
    return DiscreteJoint(cols, j.labels_x, labels_y)


@dataclass(frozen=True)
class GaussianJoint:
    """A jointly Gaussian pair (X, Y) described by its covariance blocks.

    Only second moments matter for anything computed here, so means are not
    stored.  ``v11`` (m x m) and ``v22`` (n x n) must be symmetric positive
    definite; the assembled (m+n) x (m+n) block matrix must be symmetric
    positive semidefinite.
    """

    v11: np.ndarray
    v12: np.ndarray
    v22: np.ndarray

    def __post_init__(self) -> None:
        v11 = np.atleast_2d(np.asarray(self.v11, dtype=float))
        v22 = np.atleast_2d(np.asarray(self.v22, dtype=float))
        v12 = np.asarray(self.v12, dtype=float)
        if v12.ndim != 2:
            v12 = v12.reshape(v11.shape[0], -1)
        m, n = v11.shape[0], v22.shape[0]
        if v11.shape != (m, m) or v22.shape != (n, n) or v12.shape != (m, n):
            raise InvalidBlockError(
                f"inconsistent block shapes {v11.shape}, {v12.shape}, {v22.shape}"
            )
        for name, block in (("v11", v11), ("v22", v22)):
            if not np.allclose(block, block.T, atol=1e-10, rtol=0.0):
                raise NotPositiveDefiniteError(f"{name} is not symmetric")
            if np.min(np.linalg.eigvalsh((block + block.T) / 2.0)) <= 1e-12:
                raise NotPositiveDefiniteError(
                    f"{name} has an eigenvalue at or below the 1e-12 floor"
                )
        full = np.block([[v11, v12], [v12.T, v22]])
        if np.min(np.linalg.eigvalsh((full + full.T) / 2.0)) < -1e-10:
            raise NotPositiveDefiniteError(
                "assembled block covariance is not positive semidefinite"
            )
        object.__setattr__(self, "v11", _frozen_array(v11))
        object.__setattr__(self, "v12", _frozen_array(v12))
        object.__setattr__(self, "v22", _frozen_array(v22))

    @property
    def dim_x(self) -> int:
        return self.v11.shape[0]

    @property
    def dim_y(self) -> int:
        return self.v22.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.dim_x == 1 and self.dim_y == 1


@dataclass(frozen=True)
class FunctionTable:
    """Values of a real function on the atoms of one side of a joint.

    ``side`` records which alphabet the table lives on.  The ``standardized``
    flag is set by factories that have centered and scaled the values against
    the corresponding marginal (mean 0, variance 1 within 1e-10).
    """

    values: np.ndarray
    side: Literal["x", "y"]
    standardized: bool = False

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidDistributionError("function table must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise InvalidDistributionError("function table has non-finite entries")
        if self.side not in ("x", "y"):
            raise InvalidDistributionError(f"side must be 'x' or 'y', got {self.side!r}")
        object.__setattr__(self, "values", _frozen_array(v))

    def mean_under(self, weights: np.ndarray) -> float:
        return float(self.values @ np.asarray(weights, dtype=float))

    def variance_under(self, weights: np.ndarray) -> float:
        w = np.asarray(weights, dtype=float)
        mu = self.values @ w
        return float(((self.values - mu) ** 2) @ w)


@dataclass(frozen=True)
class SampleTable:
    """Paired observations of (X, Y), numeric or categorical per column.

    Columns are stored as numpy arrays of equal length (float arrays for
    numeric columns, object arrays otherwise).  At least two rows are
    required and missing entries are rejected.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = _as_sample_column(np.asarray(self.x), "x")
        y = _as_sample_column(np.asarray(self.y), "y")
        if x.shape[0] != y.shape[0]:
            raise InvalidDistributionError(
                f"column lengths differ: {x.shape[0]} vs {y.shape[0]}"
            )
        if x.shape[0] < 2:
            raise TooFewSamplesError(
                f"need at least 2 paired observations, got {x.shape[0]}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


def _as_sample_column(col: np.ndarray, name: str) -> np.ndarray:
    if col.ndim != 1:
        raise InvalidDistributionError(f"sample column {name!r} must be 1-D")
    if col.dtype.kind in "fiu":
        out = col.astype(float)
        if not np.all(np.isfinite(out)):
            raise InvalidDistributionError(
                f"sample column {name!r} has missing or non-finite entries"
            )
    else:
        items = [str(v) for v in col.tolist()]
        if any(s == "" for s in items):
            raise InvalidDistributionError(
                f"sample column {name!r} has missing entries"
            )
        out = np.array(items, dtype=object)
    out.flags.writeable = False
    return out


def make_finite_rank_conditional(
    p0: np.ndarray,
    components: Sequence[tuple[np.ndarray, np.ndarray]],
    n_y: int,
) -> np.ndarray:
    """Conditional table p(x|y) = p0(x) + sum_i p_i(x) q_i(y), validated.

    Shared by :func:`depscale.structure.make_finite_rank_joint`; kept here so
    the construction sits next to the containers it feeds.
    """
    p0 = np.asarray(p0, dtype=float)
    if p0.ndim != 1 or np.any(p0 < 0) or p0.size == 0:
        raise InvalidDistributionError("p0 must be a nonnegative vector")
    if abs(p0.sum() - 1.0) > INPUT_MASS_TOL:
        raise InvalidDistributionError(
            f"p0 has mass {float(p0.sum())!r}, outside 1 +/- {INPUT_MASS_TOL}"
        )
    cond = np.tile((p0 / p0.sum())[:, None], (1, n_y))
    for i, (p_i, q_i) in enumerate(components):
        p_i = np.asarray(p_i, dtype=float)
        q_i = np.asarray(q_i, dtype=float)
        if p_i.shape != p0.shape or q_i.shape != (n_y,):
            raise InvalidDistributionError(
                f"component {i} has shapes {p_i.shape}/{q_i.shape}, "
                f"expected {p0.shape}/{(n_y,)}"
            )
        if abs(p_i.sum()) > CONSTRUCTION_MASS_TOL:
            raise ComponentNotCenteredError(
                f"component {i} sums to {float(p_i.sum())!r}, not 0"
            )
        cond = cond + np.outer(p_i, q_i)
    if np.any(cond < 0):
        x, y = np.argwhere(cond < 0)[0]
        raise NegativeConditionalError(
            f"conditional p(x|y) is {float(cond[x, y])!r} at cell ({x}, {y})"
        )
    return cond
