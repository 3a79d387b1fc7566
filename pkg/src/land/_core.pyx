# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for feature-map construction and pairwise scoring.

Both routines release the GIL so the thread-pool engine runs them
concurrently. Each feature index is processed by one BLAS call sequence with
fixed shapes, so results do not depend on how features are chunked.
"""

from libc.math cimport exp, sqrt
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_blas cimport dgemm


def build_maps(const double[:, ::1] U, const double[::1] basis,
               const double[:, ::1] proj, double sigma,
               double[:, :, ::1] out, double[::1] qnorm,
               Py_ssize_t lo, Py_ssize_t hi):
    """Fill ``out[k] = center(K_nb(U[k]) @ proj)`` and ``qnorm[k]`` for k in [lo, hi)."""
    cdef int n = <int> U.shape[1]
    cdef int b = <int> basis.shape[0]
    cdef Py_ssize_t k, i, p
    cdef double inv2s2 = 1.0 / (2.0 * sigma * sigma)
    cdef double diff, s, one = 1.0, zero = 0.0
    cdef char *tn = b"N"
    cdef char *tt = b"T"
    cdef double *K
    cdef double *mean
    cdef double *gram
    cdef double *A
    if hi <= lo:
        return
    with nogil:
        K = <double *> malloc(n * b * sizeof(double))
        mean = <double *> malloc(b * sizeof(double))
        gram = <double *> malloc(b * b * sizeof(double))
        for k in range(lo, hi):
            for i in range(n):
                for p in range(b):
                    diff = U[k, i] - basis[p]
                    K[i * b + p] = exp(-diff * diff * inv2s2)
            A = &out[k, 0, 0]
            # row-major A = K @ proj  <=>  column-major A^T = proj^T K^T
            dgemm(tn, tn, &b, &n, &b, &one, <double *> &proj[0, 0], &b, K, &b, &zero, A, &b)
            for p in range(b):
                mean[p] = 0.0
            for i in range(n):
                for p in range(b):
                    mean[p] += A[i * b + p]
            for p in range(b):
                mean[p] /= n
            for i in range(n):
                for p in range(b):
                    A[i * b + p] -= mean[p]
            # column-major gram = A^T A (b x b)
            dgemm(tn, tt, &b, &b, &n, &one, A, &b, A, &b, &zero, gram, &b)
            s = 0.0
            for p in range(b * b):
                s += gram[p] * gram[p]
            qnorm[k] = sqrt(sqrt(s))
        free(K)
        free(mean)
        free(gram)


def pair_scores(const double[:, :, ::1] maps, const double[:, ::1] G,
                double[::1] out, Py_ssize_t lo, Py_ssize_t hi):
    """``out[k] = ||maps[k]^T G||_F^2`` for k in [lo, hi)."""
    cdef int n = <int> maps.shape[1]
    cdef int b = <int> maps.shape[2]
    cdef int c = <int> G.shape[1]
    cdef Py_ssize_t k, p
    cdef double s, one = 1.0, zero = 0.0
    cdef char *tn = b"N"
    cdef char *tt = b"T"
    cdef double *M
    if hi <= lo:
        return
    with nogil:
        M = <double *> malloc(b * c * sizeof(double))
        for k in range(lo, hi):
            # column-major (b x c) M = F_k^T G, with F_k^T stored as b x n and G^T as c x n
            dgemm(tn, tt, &b, &c, &n, &one, <double *> &maps[k, 0, 0], &b,
                  <double *> &G[0, 0], &c, &zero, M, &b)
            s = 0.0
            for p in range(b * c):
                s += M[p] * M[p]
            out[k] = s
        free(M)
