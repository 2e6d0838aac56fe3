# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernel; mirrors _stats_py.joint_counts exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def joint_counts(cnp.int64_t[::1] x, cnp.int64_t[::1] y, int order, int alphabet):
    cdef Py_ssize_t n = x.shape[0]
    cdef int ctx_size = 1
    cdef int drop = 1
    cdef int j
    for j in range(order):
        ctx_size *= alphabet
    for j in range(order - 1):
        drop *= alphabet
    out = np.zeros(alphabet * alphabet * ctx_size * ctx_size, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = out
    cdef long x_ctx = 0
    cdef long y_ctx = 0
    cdef long scale = 1
    cdef Py_ssize_t t
    # seed the rolling context codes with the first k symbols
    for j in range(order):
        x_ctx += x[order - 1 - j] * scale
        y_ctx += y[order - 1 - j] * scale
        scale *= alphabet
    for t in range(order, n):
        counts[((x[t] * alphabet + y[t]) * ctx_size + x_ctx) * ctx_size + y_ctx] += 1
        if order > 0:
            x_ctx = x[t] + alphabet * (x_ctx % drop)
            y_ctx = y[t] + alphabet * (y_ctx % drop)
    return out.reshape(alphabet, alphabet, ctx_size, ctx_size)
