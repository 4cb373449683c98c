# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled block Thomas elimination for 2x2 blocks."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isfinite

from .errors import SingularSystem

cnp.import_array()


def block_thomas(lower, diag, upper, rhs, double cond_cap=1e12):
    """Solve ``L_j x_{j-1} + D_j x_j + U_j x_{j+1} = b_j`` (acyclic, 2x2 blocks).

    Same contract as the pure-Python kernel; ``rhs`` has shape ``(N, 2, k)``.
    """
    cdef double[:, :, ::1] L = np.ascontiguousarray(lower, dtype=np.float64)
    cdef double[:, :, ::1] D = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[:, :, ::1] U = np.ascontiguousarray(upper, dtype=np.float64)
    cdef double[:, :, ::1] B = np.array(rhs, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = B.shape[0], k = B.shape[2]
    cdef double[:, :, ::1] CU = np.empty((n, 2, 2))
    cdef double[:, :, ::1] X = np.empty((n, 2, k))
    cdef Py_ssize_t j, c
    cdef double d00, d01, d10, d11, det, fro2, i00, i01, i10, i11
    cdef double l00, l01, l10, l11, b0, b1
    cdef Py_ssize_t bad = -1

    with nogil:
        for j in range(n):
            d00 = D[j, 0, 0]; d01 = D[j, 0, 1]; d10 = D[j, 1, 0]; d11 = D[j, 1, 1]
            if j > 0:
                l00 = L[j, 0, 0]; l01 = L[j, 0, 1]; l10 = L[j, 1, 0]; l11 = L[j, 1, 1]
                d00 -= l00 * CU[j - 1, 0, 0] + l01 * CU[j - 1, 1, 0]
                d01 -= l00 * CU[j - 1, 0, 1] + l01 * CU[j - 1, 1, 1]
                d10 -= l10 * CU[j - 1, 0, 0] + l11 * CU[j - 1, 1, 0]
                d11 -= l10 * CU[j - 1, 0, 1] + l11 * CU[j - 1, 1, 1]
                for c in range(k):
                    B[j, 0, c] -= l00 * B[j - 1, 0, c] + l01 * B[j - 1, 1, c]
                    B[j, 1, c] -= l10 * B[j - 1, 0, c] + l11 * B[j - 1, 1, c]
            det = d00 * d11 - d01 * d10
            fro2 = d00 * d00 + d01 * d01 + d10 * d10 + d11 * d11
            if det == 0.0 or not isfinite(det) or fro2 / fabs(det) > cond_cap:
                bad = j
                break
            i00 = d11 / det; i01 = -d01 / det; i10 = -d10 / det; i11 = d00 / det
            if j < n - 1:
                CU[j, 0, 0] = i00 * U[j, 0, 0] + i01 * U[j, 1, 0]
                CU[j, 0, 1] = i00 * U[j, 0, 1] + i01 * U[j, 1, 1]
                CU[j, 1, 0] = i10 * U[j, 0, 0] + i11 * U[j, 1, 0]
                CU[j, 1, 1] = i10 * U[j, 0, 1] + i11 * U[j, 1, 1]
            # B[j] now holds y_j = D'^{-1} b'_j
            for c in range(k):
                b0 = B[j, 0, c]; b1 = B[j, 1, c]
                B[j, 0, c] = i00 * b0 + i01 * b1
                B[j, 1, c] = i10 * b0 + i11 * b1

        if bad < 0:
            for c in range(k):
                X[n - 1, 0, c] = B[n - 1, 0, c]
                X[n - 1, 1, c] = B[n - 1, 1, c]
            for j in range(n - 2, -1, -1):
                for c in range(k):
                    X[j, 0, c] = B[j, 0, c] - (CU[j, 0, 0] * X[j + 1, 0, c] + CU[j, 0, 1] * X[j + 1, 1, c])
                    X[j, 1, c] = B[j, 1, c] - (CU[j, 1, 0] * X[j + 1, 0, c] + CU[j, 1, 1] * X[j + 1, 1, c])

    if bad >= 0:
        raise SingularSystem(f"pivot block {bad} is singular or ill-conditioned (det={det:.3e})")
    return np.asarray(X)
