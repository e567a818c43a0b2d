"""Similarity metrics over sparse rating vectors and whole rating matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..domain import RatingsMatrix
from . import kernels

KINDS = ("cosine", "pearson", "adjusted_cosine")

_KIND_CODES = {
    "cosine": kernels.COSINE,
    "pearson": kernels.PEARSON,
    "adjusted_cosine": kernels.ADJUSTED,
}

DEFAULT_MIN_OVERLAP = 2


def _as_dense_pair(a: Sequence, b: Sequence) -> np.ndarray:
    dense = np.zeros((2, len(a)), dtype=np.float64)
    for row, vector in ((0, a), (1, b)):
        for p, value in enumerate(vector):
            dense[row, p] = 0.0 if value is None else float(value)
    return dense


def similarity(
    a: Sequence,
    b: Sequence,
    kind: str = "cosine",
    min_overlap: int = DEFAULT_MIN_OVERLAP,
    position_means: Sequence[float] | None = None,
) -> float | None:
    """Similarity of two aligned rating vectors over their co-rated positions.

    Entries are star values with None (or 0) marking "not rated".  Returns
    None (undefined) when fewer than ``min_overlap`` positions are co-rated or
    the metric degenerates to a zero norm.  ``position_means`` supplies the
    per-position centering values required by adjusted_cosine.
    """
    if kind not in _KIND_CODES:
        raise ValueError(f"unknown similarity kind: {kind!r} (expected one of {KINDS})")
    if len(a) != len(b):
        raise ValueError("rating vectors must be aligned to the same axis")
    means = None
    if kind == "adjusted_cosine":
        if position_means is None:
            raise ValueError("adjusted_cosine requires position_means")
        if len(position_means) != len(a):
            raise ValueError("position_means must be aligned with the vectors")
        means = np.asarray(position_means, dtype=np.float64)
    dense = _as_dense_pair(a, b)
    sims, defined = kernels.pairwise_sims(dense, _KIND_CODES[kind], min_overlap, means)
    return float(sims[0, 1]) if defined[0, 1] else None


def matrix_to_dense(matrix: RatingsMatrix) -> np.ndarray:
    """Dense float64 view of a RatingsMatrix; 0.0 marks missing cells."""
    dense = np.zeros((len(matrix.rows), len(matrix.cols)), dtype=np.float64)
    row_idx = {label: i for i, label in enumerate(matrix.rows)}
    col_idx = {label: j for j, label in enumerate(matrix.cols)}
    for (reservation, item), stars in matrix.cells().items():
        dense[row_idx[reservation], col_idx[item]] = float(stars)
    return dense


def row_means(dense: np.ndarray) -> np.ndarray:
    """Per-row mean over the rated (non-zero) cells; 0.0 for empty rows."""
    n = dense.shape[0]
    means = np.zeros(n, dtype=np.float64)
    for i in range(n):
        rated = dense[i][dense[i] != 0.0]
        if rated.size:
            means[i] = float(rated.sum() / rated.size)
    return means


def _pairwise(
    dense: np.ndarray,
    labels: list[str],
    kind: str,
    min_overlap: int,
    position_means: np.ndarray | None,
) -> dict[tuple[str, str], float]:
    if kind not in _KIND_CODES:
        raise ValueError(f"unknown similarity kind: {kind!r} (expected one of {KINDS})")
    sims, defined = kernels.pairwise_sims(
        np.ascontiguousarray(dense), _KIND_CODES[kind], min_overlap, position_means
    )
    out: dict[tuple[str, str], float] = {}
    n = len(labels)
    for i in range(n):
        for j in range(i, n):
            if defined[i, j]:
                key = (labels[i], labels[j]) if labels[i] <= labels[j] else (labels[j], labels[i])
                out[key] = float(sims[i, j])
    return out


def pairwise_user_sims(
    matrix: RatingsMatrix, kind: str = "cosine", min_overlap: int = DEFAULT_MIN_OVERLAP
) -> dict[tuple[str, str], float]:
    """Symmetric guest-to-guest similarity map keyed by sorted label pairs.

    Self-pairs are included where defined.  adjusted_cosine centers by the
    co-rated item's mean rating.
    """
    dense = matrix_to_dense(matrix)
    means = row_means(dense.T) if kind == "adjusted_cosine" else None
    return _pairwise(dense, matrix.rows, kind, min_overlap, means)


def pairwise_item_sims(
    matrix: RatingsMatrix, kind: str = "adjusted_cosine", min_overlap: int = DEFAULT_MIN_OVERLAP
) -> dict[tuple[str, str], float]:
    """Symmetric item-to-item similarity map keyed by sorted label pairs.

    adjusted_cosine centers each rating by the rating guest's mean, the usual
    correction for per-guest rating bias.
    """
    dense = matrix_to_dense(matrix).T
    means = row_means(dense.T) if kind == "adjusted_cosine" else None
    return _pairwise(dense, matrix.cols, kind, min_overlap, means)
