"""Gaussian/delta kernels and their centered, normalized Nystrom factors.

A feature map ``F`` (n x b) satisfies ``F @ F.T ~= K_tilde``, where
``K_tilde`` is the double-centered Gram matrix of one feature scaled to unit
Frobenius norm. Scores between two variables then reduce to
``||Fa.T @ Fb||_F**2`` without forming any n x n matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from land._backend import kernels as _kernels
from land.numerics import (
    DegenerateFeatureError,
    ValidationError,
    center_rows_mean,
    quartic_trace_norm,
    spd_inverse_sqrt,
)

NHSIC = "nhsic"
HSIC = "hsic"
REGRESSION = "regression"
CLASSIFICATION = "classification"

#: Largest n for which dense n x n oracle kernels are built.
ORACLE_MAX_N = 2000


@dataclass(frozen=True)
class KernelConfig:
    """Kernel widths, the shared basis grid and the score mode.

    ``basis_values`` defaults to ``basis_count`` evenly spaced points on
    [-5, 5], shared by every feature (and by a continuous target).
    """

    sigma_u: float = 1.0
    sigma_y: float = 1.0
    basis_count: int = 20
    basis_values: tuple = None
    score_mode: str = NHSIC

    def __post_init__(self):
        if not (self.sigma_u > 0 and self.sigma_y > 0):
            raise ValidationError("kernel widths must be positive")
        if self.score_mode not in (NHSIC, HSIC):
            raise ValidationError(f"unknown score mode {self.score_mode!r}")
        if self.basis_values is None:
            if int(self.basis_count) < 2:
                raise ValidationError("basis_count must be >= 2")
            grid = np.linspace(-5.0, 5.0, int(self.basis_count))
            object.__setattr__(self, "basis_values", tuple(float(v) for v in grid))
        else:
            vals = np.asarray(self.basis_values, dtype=np.float64).ravel()
            if vals.size < 2 or not np.all(np.isfinite(vals)) or np.any(np.diff(vals) <= 0):
                raise ValidationError("basis_values must be >= 2 finite, strictly increasing values")
            object.__setattr__(self, "basis_values", tuple(float(v) for v in vals))
        object.__setattr__(self, "basis_count", len(self.basis_values))

    @property
    def basis(self):
        return np.asarray(self.basis_values, dtype=np.float64)

    @property
    def normalized(self):
        return self.score_mode == NHSIC

    def with_basis(self, values):
        return KernelConfig(self.sigma_u, self.sigma_y, len(values), tuple(values), self.score_mode)


@dataclass(frozen=True)
class Target:
    """Output variable: real values, or class ids relabeled to 0..C-1."""

    kind: str
    values: np.ndarray
    classes: tuple = ()

    @classmethod
    def regression(cls, y):
        y = np.asarray(y, dtype=np.float64).ravel()
        if y.size < 2 or not np.all(np.isfinite(y)):
            raise ValidationError("regression target needs >= 2 finite values")
        return cls(REGRESSION, y)

    @classmethod
    def classification(cls, labels):
        labels = np.asarray(labels).ravel()
        if labels.size < 2:
            raise ValidationError("classification target needs >= 2 observations")
        classes, ids = np.unique(labels, return_inverse=True)
        return cls(CLASSIFICATION, ids.astype(np.int64), tuple(classes.tolist()))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def n_classes(self):
        return len(self.classes)


@dataclass(frozen=True)
class FeatureMap:
    feature_index: int
    F: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class OutputMap:
    G: np.ndarray
    class_counts: tuple = field(default=())


def standardize(u):
    """Zero-mean, unit sample-std (divisor n-1) copy of ``u``.

    Returns
    -------
    z : ndarray
    degenerate : bool
        True for constant input, in which case ``z`` is all zeros.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    if u.size < 2:
        raise ValidationError("standardize needs at least 2 observations")
    if not np.all(np.isfinite(u)):
        raise ValidationError("non-finite values in feature")
    if np.all(u == u[0]):
        return np.zeros_like(u), True
    z = u - u.mean()
    sd = z.std(ddof=1)
    if sd == 0.0:
        return np.zeros_like(u), True
    return z / sd, False


def gaussian_kernel(u, v, sigma):
    return np.exp(-((np.asarray(u) - np.asarray(v)) ** 2) / (2.0 * sigma * sigma))


def delta_kernel(ids):
    """Dense n x n delta kernel: ``1/n_y`` for same-class pairs, else 0."""
    ids = np.asarray(ids)
    counts = np.bincount(ids)
    same = ids[:, None] == ids[None, :]
    return np.where(same, 1.0 / counts[ids][:, None], 0.0)


def basis_projection(cfg, sigma):
    """``K_bb^{-1/2}`` for the basis grid; identical for every feature."""
    basis = cfg.basis
    Kbb = gaussian_kernel(basis[:, None], basis[None, :], sigma)
    return spd_inverse_sqrt(Kbb, eps=1e-10)


def _nystrom(Z, cfg, sigma, backend=None):
    """Centered Nystrom factors and their quartic-trace norms for rows of ``Z``."""
    ker = backend or _kernels
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    d, n = Z.shape
    b = cfg.basis_count
    proj = np.ascontiguousarray(basis_projection(cfg, sigma))
    out = np.empty((d, n, b), dtype=np.float64)
    qn = np.empty(d, dtype=np.float64)
    ker.build_maps(Z, cfg.basis, proj, float(sigma), out, qn, 0, d)
    return out, qn


def finalize_maps(out, qnorm, degenerate, normalized):
    """Zero degenerate slices and, in NHSIC mode, divide by the quartic norm in place."""
    for k in range(out.shape[0]):
        if degenerate[k] or qnorm[k] == 0.0:
            out[k] = 0.0
            degenerate[k] = True
        elif normalized:
            out[k] /= qnorm[k]


def build_feature_map(u, cfg, feature_index=0, backend=None):
    """Nystrom feature map of one feature (standardized internally)."""
    z, degenerate = standardize(u)
    out, qn = _nystrom(z[None, :], cfg, cfg.sigma_u, backend)
    flags = np.array([degenerate])
    finalize_maps(out, qn, flags, cfg.normalized)
    return FeatureMap(int(feature_index), out[0], bool(flags[0]))


def build_output_map(y, cfg):
    """Output factor ``G`` with ``G @ G.T ~= L_tilde``.

    Regression targets use the same Nystrom construction as features (with
    ``sigma_y``). Class targets use the exact indicator factor
    ``G[i, c] = 1/sqrt(n_c)`` if ``y_i == c``, centered and normalized.
    """
    if not isinstance(y, Target):
        y = Target.regression(y)
    if y.kind == REGRESSION:
        z, degenerate = standardize(y.values)
        if degenerate:
            raise ValidationError("regression target is constant")
        out, _ = _nystrom(z[None, :], cfg, cfg.sigma_y)
        A = out[0]
        counts = ()
    else:
        counts = np.bincount(y.values, minlength=y.n_classes)
        if np.any(counts == 0):
            raise ValidationError("classification target has an empty class")
        if y.n_classes < 2:
            raise ValidationError("classification target has a single class")
        raw = np.zeros((y.n, y.n_classes))
        raw[np.arange(y.n), y.values] = 1.0 / np.sqrt(counts[y.values])
        A = center_rows_mean(raw)
        counts = tuple(int(c) for c in counts)
    if cfg.normalized:
        try:
            A = A / quartic_trace_norm(A)
        except DegenerateFeatureError:
            raise ValidationError("output kernel is degenerate after centering") from None
    return OutputMap(np.ascontiguousarray(A), counts)


def full_normalized_kernel(x, cfg, normalize=True):
    """Exact double-centered (and unit-Frobenius) n x n kernel; oracle use only.

    ``x`` is a raw feature vector (Gaussian kernel, ``sigma_u``) or a
    :class:`Target` (Gaussian with ``sigma_y`` or delta kernel).
    """
    if isinstance(x, Target):
        n = x.n
        if n > ORACLE_MAX_N:
            raise ValidationError(f"oracle kernel refused for n={n} > {ORACLE_MAX_N}")
        if x.kind == CLASSIFICATION:
            K = delta_kernel(x.values)
        else:
            z, _ = standardize(x.values)
            K = gaussian_kernel(z[:, None], z[None, :], cfg.sigma_y)
    else:
        z, degenerate = standardize(x)
        n = z.size
        if n > ORACLE_MAX_N:
            raise ValidationError(f"oracle kernel refused for n={n} > {ORACLE_MAX_N}")
        if degenerate:
            return np.zeros((n, n))
        K = gaussian_kernel(z[:, None], z[None, :], cfg.sigma_u)
    K = K - K.mean(axis=0, keepdims=True)
    K = K - K.mean(axis=1, keepdims=True)
    if normalize:
        nrm = np.linalg.norm(K)
        if nrm == 0.0:
            return np.zeros_like(K)
        K = K / nrm
    return K
