"""Non-negative least-angle regression over NHSIC scores, and a CD oracle.

The HSIC Lasso objective in score form is::

    1 - 2 f^T alpha + alpha^T Q alpha + lam * ||alpha||_1,   alpha >= 0

with ``f[k] = NHSIC(u_k, y)`` and ``Q[k, l] = NHSIC(u_k, u_l)``. The LARS
walk only ever touches the columns of ``Q`` belonging to features that have
entered the active set, which is what makes it cheap for large d.
"""

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from land.numerics import ValidationError
from land.scoring import EngineConfig, ScoreState

log = logging.getLogger(__name__)

RIDGE = 1e-10
SCORE_TOL = 1e-12
# inactive features whose score moves in lockstep with the active level never tie
_PARALLEL_TOL = 1e-9


@dataclass(frozen=True)
class PathStep:
    """Breakpoint at which ``entered_feature`` joined the active set.

    ``alpha`` holds the coefficients over ``active_set`` at that breakpoint
    (the entering feature is still at zero); ``score_level`` is the common
    selection score of the active features there.
    """

    entered_feature: int
    active_set: tuple
    alpha: tuple
    score_level: float

    @property
    def lam(self):
        return implied_lambda(self)


@dataclass(frozen=True)
class SelectionPath:
    steps: tuple
    requested_m: int
    final_active: tuple = ()
    final_alpha: tuple = ()
    final_level: float = 0.0
    dropped: tuple = ()
    stop_reason: str = ""
    f: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def selected(self):
        """Features in entry order, as of the last breakpoint."""
        return self.steps[-1].active_set if self.steps else ()

    def __len__(self):
        return len(self.steps)


def implied_lambda(step):
    """Regularization value at which the Lasso solution equals this breakpoint."""
    level = step.score_level if isinstance(step, PathStep) else float(step)
    return 2.0 * level


def _argmax_lowest(values, allowed):
    best, best_k = -np.inf, -1
    for k in np.flatnonzero(allowed):
        if values[k] > best:
            best, best_k = values[k], int(k)
    return best_k, best


def _solve_direction(Q):
    ones = np.ones(Q.shape[0])
    try:
        L = np.linalg.cholesky(Q)
        w = np.linalg.solve(L.T, np.linalg.solve(L, ones))
        if np.all(np.isfinite(w)):
            return w
    except np.linalg.LinAlgError:
        pass
    Qr = Q + RIDGE * np.eye(Q.shape[0])
    try:
        return np.linalg.solve(Qr, ones)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(Qr, ones, rcond=None)[0]


def nonneg_lars(f, column, m, excluded=None):
    """Walk the non-negative LARS path until ``m`` features have entered.

    Parameters
    ----------
    f : ndarray, shape (d,)
        Relevance scores.
    column : callable
        ``column(j)`` returns the length-d vector ``Q[:, j]``; called once per
        entering feature.
    m : int
        Number of features to select.
    excluded : array_like of bool, optional
        Features never allowed to enter (e.g. constant features).

    Returns
    -------
    SelectionPath
    """
    f = np.asarray(f, dtype=np.float64)
    d = f.shape[0]
    if not 1 <= m <= d:
        raise ValidationError(f"m={m} must lie in [1, d={d}]")
    allowed = np.ones(d, dtype=bool) if excluded is None else ~np.asarray(excluded, dtype=bool)

    alpha = np.zeros(d)
    active = []
    cols = {}
    steps = []
    dropped = []
    c = f.copy()
    level = 0.0
    reason = ""

    def enter(j, lvl):
        active.append(j)
        allowed[j] = False
        if j not in cols:
            cols[j] = np.asarray(column(j), dtype=np.float64)
        steps.append(PathStep(j, tuple(active), tuple(float(alpha[i]) for i in active), float(lvl)))

    max_events = 2 * m + d + 1
    for _ in range(max_events):
        if not active:
            j, best = _argmax_lowest(c, allowed)
            if j < 0 or best <= SCORE_TOL:
                reason = "no remaining feature has a positive selection score"
                break
            level = best
            enter(j, level)

        RA = np.column_stack([cols[i] for i in active])
        Q = RA[active, :]
        w = _solve_direction(Q)
        a = RA @ w

        mu, event, who = level, "zero", -1
        for k in np.flatnonzero(allowed):
            denom = 1.0 - a[k]
            if denom <= _PARALLEL_TOL:
                continue
            step = (level - c[k]) / denom
            if step > -SCORE_TOL:
                step = max(step, 0.0)
            if 0.0 <= step < mu:
                mu, event, who = step, "enter", int(k)
        for pos, i in enumerate(active):
            if w[pos] < 0:
                step = -alpha[i] / w[pos]
                if step < mu:
                    mu, event, who = step, "drop", int(i)

        alpha[active] += mu * w
        level -= mu
        c = f - RA @ alpha[active]

        if len(active) >= m:
            reason = "requested number of features selected"
            break
        if event == "zero":
            reason = "selection score level reached zero"
            break
        if event == "drop":
            log.info("feature %d dropped from the active set at level %.6g", who, level)
            alpha[who] = 0.0
            active.remove(who)
            dropped.append(who)
            continue
        enter(who, level)
    else:
        reason = "event limit reached"

    alpha = np.maximum(alpha, 0.0)
    return SelectionPath(
        steps=tuple(steps),
        requested_m=int(m),
        final_active=tuple(active),
        final_alpha=tuple(float(alpha[i]) for i in active),
        final_level=float(max(level, 0.0)),
        dropped=tuple(dropped),
        stop_reason=reason,
        f=f,
    )


def land_select(maps, G, m, cfg=None, backend=None):
    """Select ``m`` features from prebuilt feature maps and output map ``G``."""
    if not 1 <= m <= maps.d:
        raise ValidationError(f"m={m} must lie in [1, d={maps.d}]")
    state = ScoreState(maps, G, cfg or EngineConfig(), backend)
    path = nonneg_lars(state.f, state.column, m, excluded=maps.degenerate)
    if not path.steps:
        log.warning("empty selection path: %s", path.stop_reason)
    return path


def lars_from_gram(f, Q, m):
    """Run the LARS walk on a dense score Gram matrix (oracle-scale inputs)."""
    Q = np.asarray(Q, dtype=np.float64)
    return nonneg_lars(f, lambda j: Q[:, j], m, excluded=np.diag(Q) <= 0)


def objective_value(alpha, f, Q, lam):
    alpha = np.asarray(alpha, dtype=np.float64)
    if np.any(alpha < 0):
        raise ValidationError("coefficients must be non-negative")
    f = np.asarray(f, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if alpha.shape != f.shape or Q.shape != (f.size, f.size):
        raise ValidationError("alpha, f and Q shapes disagree")
    return float(1.0 - 2.0 * f @ alpha + alpha @ Q @ alpha + lam * alpha.sum())


def objective_full(alpha, kernels, L, lam):
    """``||L - sum_k alpha_k K_k||_F^2 + lam ||alpha||_1`` with dense kernels."""
    alpha = np.asarray(alpha, dtype=np.float64)
    resid = np.asarray(L, dtype=np.float64) - np.tensordot(alpha, np.asarray(kernels), axes=1)
    return float(np.sum(resid * resid) + lam * np.abs(alpha).sum())


def score_matrices(kernels, L):
    """Relevance vector and Gram matrix from dense normalized kernels."""
    Ks = np.asarray(kernels, dtype=np.float64)
    d = Ks.shape[0]
    flat = Ks.reshape(d, -1)
    # kernels are symmetric, so tr(A B) = <A, B>_F
    f = flat @ np.asarray(L, dtype=np.float64).ravel()
    Q = flat @ flat.T
    return f, Q


def nonneg_lasso_cd(f, Q, lam, tol=1e-10, max_sweeps=100_000):
    """Cyclic coordinate descent on the score-form objective with alpha >= 0.

    Returns ``(alpha, sweeps, last_max_change)``.
    """
    f = np.asarray(f, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    d = f.size
    alpha = np.zeros(d)
    Qa = np.zeros(d)
    diag = np.diag(Q).copy()
    change = np.inf
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        change = 0.0
        for k in range(d):
            if diag[k] <= 0:
                continue
            old = alpha[k]
            rest = Qa[k] - diag[k] * old
            new = max(0.0, (f[k] - rest - lam / 2.0) / diag[k])
            if new != old:
                Qa += Q[:, k] * (new - old)
                alpha[k] = new
                change = max(change, abs(new - old))
        if change < tol:
            break
    return alpha, sweeps, change


def hsic_lasso_naive(kernels, L, lam, tol=1e-10, max_sweeps=100_000):
    """Direct HSIC Lasso solution from full normalized kernels (oracle only)."""
    Ks = np.asarray(kernels, dtype=np.float64)
    if Ks.ndim != 3 or Ks.shape[0] > 200 or Ks.shape[1] > 200:
        raise ValidationError("oracle solver limited to d <= 200 and n <= 200")
    if lam < 0:
        raise ValidationError("lam must be non-negative")
    f, Q = score_matrices(Ks, L)
    alpha, sweeps, change = nonneg_lasso_cd(f, Q, lam, tol, max_sweeps)
    if change >= tol:
        warnings.warn(
            f"coordinate descent stopped after {sweeps} sweeps with max change {change:.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return alpha
