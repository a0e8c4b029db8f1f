# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Pauli kernels; same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline double _sign(long long b) nogil:
    return -1.0 if (__builtin_popcountll(b) & 1) else 1.0


def apply_terms(xmasks, zmasks, coeffs, psi):
    cdef const long long[::1] xm = np.ascontiguousarray(xmasks, dtype=np.int64)
    cdef const long long[::1] zm = np.ascontiguousarray(zmasks, dtype=np.int64)
    cdef const double complex[::1] cf = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double complex[::1] v = np.ascontiguousarray(psi, dtype=np.complex128)
    cdef Py_ssize_t dim = v.shape[0]
    out_arr = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t t, b
    cdef long long x, z
    cdef double complex c
    with nogil:
        for t in range(xm.shape[0]):
            x = xm[t]
            z = zm[t]
            c = cf[t]
            for b in range(dim):
                if __builtin_popcountll(b & z) & 1:
                    out[b ^ x] -= c * v[b]
                else:
                    out[b ^ x] += c * v[b]
    return out_arr


def dense_matrix(xmasks, zmasks, coeffs, Py_ssize_t dim, bint real):
    cdef const long long[::1] xm = np.ascontiguousarray(xmasks, dtype=np.int64)
    cdef const long long[::1] zm = np.ascontiguousarray(zmasks, dtype=np.int64)
    cdef const double complex[::1] cf = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t t, b
    cdef long long x, z
    cdef double complex c
    cdef double cr
    cdef double[:, ::1] mr
    cdef double complex[:, ::1] mc
    if real:
        mat = np.zeros((dim, dim), dtype=np.float64)
        mr = mat
        with nogil:
            for t in range(xm.shape[0]):
                x = xm[t]
                z = zm[t]
                cr = cf[t].real
                for b in range(dim):
                    mr[b ^ x, b] += cr * _sign(b & z)
    else:
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mc = mat
        with nogil:
            for t in range(xm.shape[0]):
                x = xm[t]
                z = zm[t]
                c = cf[t]
                for b in range(dim):
                    mc[b ^ x, b] += c * _sign(b & z)
    return mat
