"""Defines linear algebra over GF(2).

Matrices are ``uint8`` numpy arrays holding 0/1 entries. A linear map on
states is stored column-wise: column ``j`` is the image of unit vector
``e_j``, so applying the map is ``(M @ x) % 2``.
"""

import logging
from typing import Callable

import numpy as np

from setfalab.core.state import STATE_BITS, State160

logger = logging.getLogger(__name__)

Bin160Map = np.ndarray


class MaskNotInvertibleError(ValueError):
    """Raised when inverting a singular GF(2) matrix."""


def matrix_of(fn: Callable[[State160], State160], size: int = STATE_BITS) -> Bin160Map:
    """Builds the matrix of a GF(2)-linear function from its unit vectors.

    Args:
        fn: A linear function accepting a batch of bit vectors of shape
            ``(B, size)``.
        size: The vector length.

    Returns:
        The ``(size, size)`` matrix of ``fn``.
    """
    images = fn(np.eye(size, dtype=np.uint8))
    return np.ascontiguousarray(images.T.astype(np.uint8))


def apply(matrix: Bin160Map, x: State160) -> State160:
    """Applies a matrix to a bit vector, or to a batch of shape ``(..., n)``."""
    prod = np.asarray(x, dtype=np.int64) @ matrix.T.astype(np.int64)
    return (prod % 2).astype(np.uint8)


def compose(first: Bin160Map, second: Bin160Map) -> Bin160Map:
    """Returns the matrix of ``first ∘ second``."""
    return ((first.astype(np.int64) @ second.astype(np.int64)) % 2).astype(np.uint8)


def identity(size: int = STATE_BITS) -> Bin160Map:
    return np.eye(size, dtype=np.uint8)


def _eliminate(aug: np.ndarray, num_cols: int) -> int:
    """Reduces ``aug`` in place to reduced row echelon form over its first columns.

    Args:
        aug: The (possibly augmented) matrix, modified in place.
        num_cols: Number of leading columns to pivot on.

    Returns:
        The rank of the leading ``num_cols`` columns.
    """
    num_rows = aug.shape[0]
    pivot_row = 0
    for col in range(num_cols):
        if pivot_row >= num_rows:
            break
        candidates = np.flatnonzero(aug[pivot_row:, col]) + pivot_row
        if candidates.size == 0:
            continue
        pivot = candidates[0]
        if pivot != pivot_row:
            aug[[pivot_row, pivot]] = aug[[pivot, pivot_row]]
        targets = aug[:, col].astype(bool)
        targets[pivot_row] = False
        aug[targets] ^= aug[pivot_row]
        pivot_row += 1
    return pivot_row


def rank(matrix: Bin160Map) -> int:
    work = np.array(matrix, dtype=np.uint8, copy=True)
    return _eliminate(work, work.shape[1])


def invert_map(matrix: Bin160Map) -> Bin160Map:
    """Inverts a square matrix by Gauss-Jordan elimination over GF(2).

    Args:
        matrix: The ``(n, n)`` matrix to invert.

    Returns:
        The inverse matrix.

    Raises:
        ValueError: If the matrix is not square.
        MaskNotInvertibleError: If the matrix is singular.
    """
    n, m = matrix.shape
    if n != m:
        raise ValueError(f"Cannot invert a non-square matrix of shape {matrix.shape}")
    aug = np.hstack([np.array(matrix, dtype=np.uint8, copy=True), identity(n)])
    matrix_rank = _eliminate(aug, n)
    if matrix_rank < n:
        raise MaskNotInvertibleError(f"mask layer not invertible (rank {matrix_rank} of {n})")
    return np.ascontiguousarray(aug[:, n:])
