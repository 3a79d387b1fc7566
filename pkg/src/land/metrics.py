"""Screening baseline and evaluation metrics for selected feature sets."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from land.numerics import ValidationError


@dataclass(frozen=True)
class MetricReport:
    independence_rate: float
    dimensionality_reduction_rate: float
    m: int
    d: int
    auc: float = None


def screen_mr_nhsic(f, m):
    """Indices of the ``m`` largest relevance scores, descending, ties by index."""
    f = np.asarray(f, dtype=np.float64)
    d = f.size
    if not 1 <= m <= d:
        raise ValidationError(f"m={m} must lie in [1, d={d}]")
    order = np.lexsort((np.arange(d), -f))
    return [int(k) for k in order[:m]]


def pearson(u, v):
    """Sample correlation; 0.0 when either input is constant."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape or u.size < 2:
        raise ValidationError("pearson needs two vectors of equal length >= 2")
    du = u - u.mean()
    dv = v - v.mean()
    su, sv = du @ du, dv @ dv
    if su == 0.0 or sv == 0.0 or np.all(u == u[0]) or np.all(v == v[0]):
        return 0.0
    # one sqrt of the product: sqrt(fl(x*x)) == |x|, so pearson(u, u) is exactly 1
    return float(np.clip((du @ dv) / np.sqrt(su * sv), -1.0, 1.0))


def independence_rate(X_selected):
    """``1 - mean |rho|`` over ordered pairs of distinct selected features.

    ``X_selected`` is m x n (one selected feature per row).
    """
    X = np.asarray(X_selected, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValidationError("independence rate needs at least 2 selected features")
    m = X.shape[0]
    total = 0.0
    for k in range(m):
        for l in range(k + 1, m):
            total += 2.0 * abs(pearson(X[k], X[l]))
    return float(1.0 - total / (m * (m - 1)))


def dimensionality_reduction_rate(m, d):
    if not 0 <= m <= d or d < 1:
        raise ValidationError("need 0 <= m <= d and d >= 1")
    return 1.0 - m / d


def auc(scores, labels):
    """Mann-Whitney AUC; tied scores count one half."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise ValidationError("scores and labels differ in length")
    classes = np.unique(labels)
    if classes.size != 2:
        raise ValidationError("auc needs exactly two classes")
    pos = labels == classes[1]
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    ranks = rankdata(scores)
    u_stat = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


def evaluate_selection(X, selected, scores=None, labels=None):
    """Metrics for rows ``selected`` of the d x n matrix ``X``."""
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[0]
    selected = list(selected)
    ind = independence_rate(X[selected]) if len(selected) >= 2 else float("nan")
    a = auc(scores, labels) if scores is not None else None
    return MetricReport(ind, dimensionality_reduction_rate(len(selected), d), len(selected), d, a)
