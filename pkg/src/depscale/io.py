"""CSV ingestion for joint tables, covariance blocks, and sample files.

Three small, strict readers.  Anything that does not match the documented
layout raises :class:`~depscale.errors.FormatError` (or the semantic error
from the container it feeds) — no silent coercion.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidBlockError
from .joints import DiscreteJoint, GaussianJoint, SampleTable, make_joint


def _read_rows(path: str | Path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise FormatError(f"{path} is empty")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError(f"{path} is ragged: rows have differing cell counts")
    return [[c.strip() for c in r] for r in rows]


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_joint_csv(path: str | Path) -> DiscreteJoint:
    """Read a joint pmf table: rows are X atoms, columns are Y atoms.

    An optional header row and/or leading label column are auto-detected by
    their non-numeric cells.  Every remaining cell must parse as a number;
    validation and renormalization happen in :func:`depscale.joints.make_joint`.
    """
    rows = _read_rows(path)
    header = any(not _is_number(c) for c in rows[0][1:]) or (
        len(rows[0]) == 1 and not _is_number(rows[0][0])
    )
    body = rows[1:] if header else rows
    if not body:
        raise FormatError(f"{path} has a header but no data rows")
    label_col = any(not _is_number(r[0]) for r in body)
    labels_y = rows[0][1:] if header and label_col else (rows[0] if header else None)
    labels_x = [r[0] for r in body] if label_col else None
    data_rows = [r[1:] for r in body] if label_col else body
    try:
        probs = np.array([[float(c) for c in r] for r in data_rows])
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric cell in table body ({exc})") from exc
    return make_joint(probs, labels_x=labels_x, labels_y=labels_y)


def load_covariance_csv(path: str | Path, dim_x: int) -> GaussianJoint:
    """Read a full (m+n) x (m+n) covariance matrix and split it at ``dim_x``."""
    rows = _read_rows(path)
    try:
        full = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise FormatError(f"{path}: covariance CSV must be purely numeric ({exc})") from exc
    if full.shape[0] != full.shape[1]:
        raise FormatError(
            f"{path}: covariance matrix must be square, got {full.shape}"
        )
    if not 1 <= dim_x < full.shape[0]:
        raise InvalidBlockError(
            f"dim-x must lie in [1, {full.shape[0] - 1}], got {dim_x}"
        )
    m = dim_x
    return GaussianJoint(
        v11=full[:m, :m], v12=full[:m, m:], v22=full[m:, m:]
    )


def load_samples_csv(
    path: str | Path,
) -> tuple[list[str] | None, list[np.ndarray]]:
    """Read a samples CSV: one observation per row, one variable per column.

    Returns (column names or None, list of column arrays); numeric columns
    come back as float arrays, anything else as object arrays of strings.
    A header row is detected by non-numeric cells.
    """
    rows = _read_rows(path)
    if len(rows[0]) < 2:
        raise FormatError(f"{path}: need at least 2 columns (X and Y)")
    header = any(not _is_number(c) for c in rows[0])
    names = rows[0] if header else None
    body = rows[1:] if header else rows
    if not body:
        raise FormatError(f"{path} has a header but no data rows")
    columns: list[np.ndarray] = []
    for idx in range(len(rows[0])):
        cells = [r[idx] for r in body]
        if all(_is_number(c) for c in cells):
            columns.append(np.array([float(c) for c in cells]))
        else:
            columns.append(np.array(cells, dtype=object))
    return names, columns


def select_column(
    names: list[str] | None, columns: list[np.ndarray], key: str, what: str
) -> np.ndarray:
    """Pick a column by header name or 0-based index string."""
    if names is not None and key in names:
        return columns[names.index(key)]
    try:
        idx = int(key)
    except ValueError:
        raise FormatError(
            f"{what} column {key!r} not found"
            + (f" among {names}" if names is not None else " (file has no header)")
        ) from None
    if not 0 <= idx < len(columns):
        raise FormatError(
            f"{what} column index {idx} out of range for {len(columns)} columns"
        )
    return columns[idx]


def sample_table(x: np.ndarray, y: np.ndarray) -> SampleTable:
    """Build a validated two-column sample table."""
    return SampleTable(x=x, y=y)
