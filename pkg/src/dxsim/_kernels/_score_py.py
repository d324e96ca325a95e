"""Numpy fallback for the scoring kernels.

Used when the compiled extension is unavailable (or when DXSIM_KERNEL=numpy
forces it). Must stay numerically interchangeable with the compiled kernel
to within 1e-12 per score.
"""

from __future__ import annotations

import numpy as np


def score_block(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Dot product of every row of matrix against query."""
    return matrix @ query


def score_rows(matrix: np.ndarray, query: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Dot products for the selected rows (gathers a copy, then multiplies)."""
    return matrix[rows] @ query


def pairwise_block(matrix: np.ndarray) -> np.ndarray:
    """Full pairwise dot-product matrix, exactly symmetric.

    The upper triangle is computed once and mirrored so m[i][j] and m[j][i]
    are the same float.
    """
    scores = matrix @ matrix.T
    upper = np.triu(scores)
    return upper + np.triu(scores, 1).T
