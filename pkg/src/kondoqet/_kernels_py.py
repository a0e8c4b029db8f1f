"""Pure-numpy Pauli kernels.

A Pauli string on N sites is encoded by two bit masks over the basis index:
``xmask`` flips bits (X and Y factors) and ``zmask`` picks up a sign
(Z and Y factors).  The i**n_Y phase is folded into the complex coefficient
by the caller, so every kernel evaluates

    P|b> = coeff * (-1)**popcount(b & zmask) * |b ^ xmask>
"""

import numpy as np

_POP8 = np.array([bin(i).count("1") & 1 for i in range(256)], dtype=np.int8)


def _parity(values):
    # popcount parity, vectorized byte-by-byte
    values = values.astype(np.uint64, copy=True)
    out = np.zeros(values.shape, dtype=np.int8)
    while values.any():
        out ^= _POP8[(values & np.uint64(0xFF)).astype(np.intp)]
        values >>= np.uint64(8)
    return out


def apply_terms(xmasks, zmasks, coeffs, psi):
    dim = psi.shape[0]
    basis = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.complex128)
    for xm, zm, c in zip(xmasks, zmasks, coeffs):
        sign = 1 - 2 * _parity(basis & int(zm)).astype(np.float64)
        # amplitude at b moves to b ^ xm
        out[basis ^ int(xm)] += c * sign * psi
    return out


def dense_matrix(xmasks, zmasks, coeffs, dim, real):
    basis = np.arange(dim, dtype=np.int64)
    dtype = np.float64 if real else np.complex128
    mat = np.zeros((dim, dim), dtype=dtype)
    for xm, zm, c in zip(xmasks, zmasks, coeffs):
        sign = 1 - 2 * _parity(basis & int(zm)).astype(np.float64)
        val = (c.real if real else c) * sign
        mat[basis ^ int(xm), basis] += val
    return mat
