"""Pure-NumPy versions of the compiled kernels in ``_core.pyx``.

Signatures and write semantics match the compiled module exactly.
"""

import numpy as np


def build_maps(U, basis, proj, sigma, out, qnorm, lo, hi):
    if hi <= lo:
        return
    u = U[lo:hi, :, None]
    K = np.exp(-((u - basis[None, None, :]) ** 2) / (2.0 * sigma * sigma))
    A = K @ proj
    A -= A.mean(axis=1, keepdims=True)
    out[lo:hi] = A
    gram = np.transpose(A, (0, 2, 1)) @ A
    qnorm[lo:hi] = np.sqrt(np.sqrt(np.einsum("kpq,kpq->k", gram, gram)))


def pair_scores(maps, G, out, lo, hi):
    for k in range(lo, hi):
        M = maps[k].T @ G
        out[k] = np.sum(M * M)
