# cython: language_level=3
"""Compiled kernels for small dense complex matrices.

Same contract as ghz_selftest.backends.python: Kronecker products and
Hermitian eigensolves for complex128 matrices up to dimension 128. The
eigensolvers call LAPACK zheevd directly, skipping the per-call overhead of
the high-level NumPy wrappers that dominates at these sizes.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_lapack cimport zheevd

cnp.import_array()

NAME = "compiled"


def kron(a, b):
    """Kronecker product of two square complex matrices."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] am = np.ascontiguousarray(a, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] bm = np.ascontiguousarray(b, dtype=np.complex128)
    cdef Py_ssize_t na = am.shape[0], ma = am.shape[1]
    cdef Py_ssize_t nb = bm.shape[0], mb = bm.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((na * nb, ma * mb), dtype=np.complex128)
    cdef Py_ssize_t i1, j1, i2, j2
    cdef double complex v
    for i1 in range(na):
        for j1 in range(ma):
            v = am[i1, j1]
            for i2 in range(nb):
                for j2 in range(mb):
                    out[i1 * nb + i2, j1 * mb + j2] = v * bm[i2, j2]
    return out


def kron_chain(mats):
    """Kronecker product of a sequence of square complex matrices."""
    if len(mats) == 0:
        raise ValueError("kron_chain needs at least one factor")
    out = np.ascontiguousarray(mats[0], dtype=np.complex128)
    for m in mats[1:]:
        out = kron(out, m)
    return out


cdef int _zheevd_inplace(cnp.ndarray a, cnp.ndarray w, bint vectors) except -1:
    # a: (n, n) complex128 Fortran order, overwritten; w: (n,) float64
    cdef int n = a.shape[0]
    cdef int lwork, lrwork, liwork, info = 0
    cdef char jobz = b'V' if vectors else b'N'
    cdef char uplo = b'L'
    if vectors:
        lwork = 2 * n + n * n
        lrwork = 1 + 5 * n + 2 * n * n
        liwork = 3 + 5 * n
    else:
        lwork = n + 1
        lrwork = n if n > 1 else 1
        liwork = 1
    cdef cnp.ndarray work = np.empty(lwork, dtype=np.complex128)
    cdef cnp.ndarray rwork = np.empty(lrwork, dtype=np.float64)
    cdef cnp.ndarray iwork = np.empty(liwork, dtype=np.int32)
    zheevd(&jobz, &uplo, &n,
           <double complex *> cnp.PyArray_DATA(a), &n,
           <double *> cnp.PyArray_DATA(w),
           <double complex *> cnp.PyArray_DATA(work), &lwork,
           <double *> cnp.PyArray_DATA(rwork), &lrwork,
           <int *> cnp.PyArray_DATA(iwork), &liwork, &info)
    if info != 0:
        raise np.linalg.LinAlgError(f"zheevd failed with info={info}")
    return 0


def eigh(m):
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    cdef cnp.ndarray a = np.array(m, dtype=np.complex128, order="F", copy=True)
    cdef int n = a.shape[0]
    cdef cnp.ndarray w = np.empty(n, dtype=np.float64)
    _zheevd_inplace(a, w, True)
    return w, a


def eigvalsh(m):
    """Eigenvalues (ascending) of a Hermitian matrix."""
    cdef cnp.ndarray a = np.array(m, dtype=np.complex128, order="F", copy=True)
    cdef int n = a.shape[0]
    cdef cnp.ndarray w = np.empty(n, dtype=np.float64)
    _zheevd_inplace(a, w, False)
    return w
