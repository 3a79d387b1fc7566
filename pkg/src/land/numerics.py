"""Small dense-matrix primitives used to build kernel feature maps."""

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class DegenerateFeatureError(ValidationError):
    """Raised when a matrix that must be non-zero is identically zero."""


def _as_finite_2d(M, name="matrix"):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError(f"{name} contains non-finite entries")
    return M


def spd_inverse_sqrt(M, eps=1e-10):
    """Inverse square root of a symmetric positive semi-definite matrix.

    Eigenvalues are clamped below at ``eps * max(largest eigenvalue, 1e-300)``,
    so ``eps`` is relative to the spectrum scale.

    Parameters
    ----------
    M : array_like, shape (b, b)
        Symmetric matrix.
    eps : float
        Relative eigenvalue floor.

    Returns
    -------
    ndarray, shape (b, b)
        Symmetric ``M^{-1/2}``.
    """
    M = _as_finite_2d(M, "M")
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"M must be square, got shape {M.shape}")
    if eps <= 0:
        raise ValidationError("eps must be positive")
    scale = max(np.abs(M).max(), 1e-300)
    if np.abs(M - M.T).max() > 1e-10 * scale:
        raise ValidationError("M is not symmetric")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    floor = eps * max(w[-1], 1e-300)
    w = np.maximum(w, floor)
    S = (V / np.sqrt(w)) @ V.T
    return 0.5 * (S + S.T)


def center_rows_mean(A):
    """Subtract the column means, i.e. left-multiply by ``I - 11^T/n``."""
    A = _as_finite_2d(A, "A")
    return A - A.mean(axis=0, keepdims=True)


def quartic_trace_norm(A):
    """Return ``tr((A^T A)^2) ** 0.25``, the square root of ``||A^T A||_F``."""
    A = _as_finite_2d(A, "A")
    gram = A.T @ A
    val = np.sqrt(np.sum(gram * gram))
    if val == 0.0:
        raise DegenerateFeatureError("quartic trace norm of an all-zero matrix")
    return float(np.sqrt(val))
