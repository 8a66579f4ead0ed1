# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: batched minor determinants and sparse table products.

Every routine here has a twin in ``_pykernels`` that performs the same
floating point operations in the same order, so both backends agree bit for
bit.  Keep the two files in lockstep.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

DEF MAXK = 16


cdef double _det(const double[:, :, :] frames, Py_ssize_t b, const long long[:] rows,
                 Py_ssize_t k, double* work) noexcept nogil:
    cdef Py_ssize_t i, j, r, c, p
    cdef double best, v, f, det, tmp
    for i in range(k):
        for j in range(k):
            work[i * MAXK + j] = frames[b, rows[i], j]
    det = 1.0
    for j in range(k):
        p = j
        best = fabs(work[j * MAXK + j])
        for r in range(j + 1, k):
            v = fabs(work[r * MAXK + j])
            if v > best:
                best = v
                p = r
        if best == 0.0:
            return 0.0
        if p != j:
            for c in range(k):
                tmp = work[j * MAXK + c]
                work[j * MAXK + c] = work[p * MAXK + c]
                work[p * MAXK + c] = tmp
            det = -det
        det = det * work[j * MAXK + j]
        for r in range(j + 1, k):
            f = work[r * MAXK + j] / work[j * MAXK + j]
            for c in range(j + 1, k):
                work[r * MAXK + c] = work[r * MAXK + c] - f * work[j * MAXK + c]
    return det


def minors(const long long[:, :] rows, const double[:, :, :] frames):
    """All selected k x k minors of a batch of frames, shape (batch, m)."""
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t k = rows.shape[1]
    cdef Py_ssize_t nb = frames.shape[0]
    cdef Py_ssize_t b, i
    cdef double work[MAXK * MAXK]
    if k > MAXK:
        raise ValueError("frame width exceeds compiled limit")
    out = np.empty((nb, m), dtype=np.float64)
    cdef double[:, :] o = out
    with nogil:
        for b in range(nb):
            for i in range(m):
                o[b, i] = _det(frames, b, rows[i], k, work)
    return out


def eval_on_frames(const long long[:, :] rows, const double[:] cre, const double[:] cim,
                   const double[:, :, :] frames):
    """Sum_i c_i det(frame[rows_i, :]) for every frame in the batch."""
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t k = rows.shape[1]
    cdef Py_ssize_t nb = frames.shape[0]
    cdef Py_ssize_t b, i
    cdef double d, are, aim
    cdef double work[MAXK * MAXK]
    if k > MAXK:
        raise ValueError("frame width exceeds compiled limit")
    re = np.empty(nb, dtype=np.float64)
    im = np.empty(nb, dtype=np.float64)
    cdef double[:] ore = re
    cdef double[:] oim = im
    with nogil:
        for b in range(nb):
            are = 0.0
            aim = 0.0
            for i in range(m):
                d = _det(frames, b, rows[i], k, work)
                are = are + cre[i] * d
                aim = aim + cim[i] * d
            ore[b] = are
            oim[b] = aim
    return re, im


def table_product(const long long[:] ia, const long long[:] ib,
                  const long long[:] iout, const double[:] sign,
                  const double[:] are, const double[:] aim, const double[:] bre, const double[:] bim,
                  Py_ssize_t nout):
    """out[iout[t]] += sign[t] * a[ia[t]] * b[ib[t]] in table order."""
    cdef Py_ssize_t t, nt = ia.shape[0]
    cdef double pre, pim
    ore_arr = np.zeros(nout, dtype=np.float64)
    oim_arr = np.zeros(nout, dtype=np.float64)
    cdef double[:] ore = ore_arr
    cdef double[:] oim = oim_arr
    with nogil:
        for t in range(nt):
            pre = are[ia[t]] * bre[ib[t]] - aim[ia[t]] * bim[ib[t]]
            pim = are[ia[t]] * bim[ib[t]] + aim[ia[t]] * bre[ib[t]]
            ore[iout[t]] = ore[iout[t]] + sign[t] * pre
            oim[iout[t]] = oim[iout[t]] + sign[t] * pim
    return ore_arr, oim_arr
