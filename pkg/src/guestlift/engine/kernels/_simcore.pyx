# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise similarity kernel.

Arithmetic (accumulation order, centering, clamping) mirrors pysim.py exactly
so the two backends produce bit-identical results.
"""

from libc.math cimport sqrt

import numpy as np

COSINE = 0
PEARSON = 1
ADJUSTED = 2


def pairwise_sims(double[:, :] matrix, int kind, int min_overlap, means=None):
    """Pairwise row similarities over co-rated columns of a dense matrix.

    ``matrix`` is float64 with 0.0 marking a missing rating; ``means`` gives
    per-column centering values for the adjusted variant.  Returns an (n, n)
    float64 similarity matrix plus a uint8 mask of defined entries.
    """
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t m = matrix.shape[1]
    sims_arr = np.zeros((n, n), dtype=np.float64)
    defined_arr = np.zeros((n, n), dtype=np.uint8)
    cdef double[:, :] sims = sims_arr
    cdef unsigned char[:, :] defined = defined_arr
    cdef double[:] means_view = None
    if kind == ADJUSTED:
        means_view = means

    cdef Py_ssize_t a, b, p
    cdef int overlap
    cdef double ra, rb, x, y
    cdef double sum_a, sum_b, center_a, center_b
    cdef double dot, na, nb, den, s

    for a in range(n):
        for b in range(a, n):
            overlap = 0
            sum_a = 0.0
            sum_b = 0.0
            for p in range(m):
                ra = matrix[a, p]
                rb = matrix[b, p]
                if ra == 0.0 or rb == 0.0:
                    continue
                overlap += 1
                sum_a += ra
                sum_b += rb
            if overlap < min_overlap:
                continue
            center_a = 0.0
            center_b = 0.0
            if kind == PEARSON:
                center_a = sum_a / overlap
                center_b = sum_b / overlap
            dot = 0.0
            na = 0.0
            nb = 0.0
            for p in range(m):
                ra = matrix[a, p]
                rb = matrix[b, p]
                if ra == 0.0 or rb == 0.0:
                    continue
                if kind == ADJUSTED:
                    x = ra - means_view[p]
                    y = rb - means_view[p]
                else:
                    x = ra - center_a
                    y = rb - center_b
                dot += x * y
                na += x * x
                nb += y * y
            den = sqrt(na * nb)
            if den == 0.0:
                continue
            s = dot / den
            if s > 1.0:
                s = 1.0
            elif s < -1.0:
                s = -1.0
            sims[a, b] = s
            sims[b, a] = s
            defined[a, b] = 1
            defined[b, a] = 1
    return sims_arr, defined_arr
