# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels: contiguous-memory dot products.

Same contract as _score_py; selected automatically at import when compiled.
score_rows is the fused filtered path: it scores an eligible-row subset in
place, where the numpy fallback has to gather-copy the submatrix first.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _dot(const double* a, const double* b, Py_ssize_t d) noexcept nogil:
    # Four fixed-order partial sums: deterministic and wide enough for the
    # compiler to keep the pipeline busy.
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t j = 0
    while j + 4 <= d:
        s0 += a[j] * b[j]
        s1 += a[j + 1] * b[j + 1]
        s2 += a[j + 2] * b[j + 2]
        s3 += a[j + 3] * b[j + 3]
        j += 4
    while j < d:
        s0 += a[j] * b[j]
        j += 1
    return (s0 + s1) + (s2 + s3)


def score_block(double[:, ::1] matrix, double[::1] query):
    """Dot product of every row of matrix against query."""
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    if query.shape[0] != d:
        raise ValueError("query dimension does not match matrix")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out_view[i] = _dot(&matrix[i, 0], &query[0], d)
    return out


def score_rows(double[:, ::1] matrix, double[::1] query, cnp.int64_t[::1] rows):
    """Dot products for the selected rows only, without copying them out."""
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    if query.shape[0] != d:
        raise ValueError("query dimension does not match matrix")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out_view[i] = _dot(&matrix[rows[i], 0], &query[0], d)
    return out


def pairwise_block(double[:, ::1] matrix):
    """Full pairwise dot-product matrix, exactly symmetric by mirroring."""
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] out_view = out
    cdef Py_ssize_t i, j
    cdef double acc
    with nogil:
        for i in range(n):
            for j in range(i, n):
                acc = _dot(&matrix[i, 0], &matrix[j, 0], d)
                out_view[i, j] = acc
                out_view[j, i] = acc
    return out
