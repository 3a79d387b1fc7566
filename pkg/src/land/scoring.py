"""NHSIC scores and the parallel map/reduce passes over feature maps.

Each pass maps ``k -> score(F_k, other)`` over chunks of feature indices on a
thread pool; the reduce step writes every result into its own slot of a
preallocated vector, so output is bit-identical for any worker count or
chunking.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from land import _backend
from land.kernelmap import FeatureMap, OutputMap, basis_projection, finalize_maps, standardize
from land.numerics import ValidationError


def _as_factor(x):
    if isinstance(x, FeatureMap):
        return x.F
    if isinstance(x, OutputMap):
        return x.G
    return np.asarray(x, dtype=np.float64)


def nhsic_approx(Fa, Fb):
    """``tr(Fa Fa^T Fb Fb^T)`` evaluated as ``||Fa^T Fb||_F^2`` in O(n b^2)."""
    A, B = _as_factor(Fa), _as_factor(Fb)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ValidationError(f"factor shapes {A.shape} and {B.shape} do not match")
    M = A.T @ B
    N = B.T @ A
    # both summation orders, so swapping the arguments is bitwise symmetric
    return float(0.5 * (np.sum(M * M) + np.sum(N * N)))


def nhsic_exact(Ka, Kb):
    Ka = np.asarray(Ka, dtype=np.float64)
    Kb = np.asarray(Kb, dtype=np.float64)
    if Ka.shape != Kb.shape or Ka.ndim != 2 or Ka.shape[0] != Ka.shape[1]:
        raise ValidationError(f"kernel shapes {Ka.shape} and {Kb.shape} do not match")
    # tr(Ka Kb) for symmetric matrices without the O(n^3) product
    return float(np.sum(Ka * Kb.T))


def default_workers():
    env = os.environ.get("LAND_WORKERS")
    if env:
        try:
            w = int(env)
        except ValueError:
            raise ValidationError(f"LAND_WORKERS={env!r} is not an integer") from None
        if w >= 1:
            return w
        raise ValidationError("LAND_WORKERS must be >= 1")
    return 1


@dataclass(frozen=True)
class EngineConfig:
    """Worker count and features per task (``None``: ceil(d / (4 workers)))."""

    workers: int = 1
    chunk_size: int = None

    def __post_init__(self):
        if int(self.workers) < 1:
            raise ValidationError("workers must be >= 1")
        if self.chunk_size is not None and int(self.chunk_size) < 1:
            raise ValidationError("chunk_size must be >= 1")

    def chunks(self, d):
        size = self.chunk_size or max(1, math.ceil(d / (4 * self.workers)))
        return [(lo, min(lo + size, d)) for lo in range(0, d, size)]

    def run(self, task, d):
        """Call ``task(lo, hi)`` for every chunk of ``range(d)`` and wait."""
        chunks = self.chunks(d)
        if self.workers == 1 or len(chunks) == 1:
            for lo, hi in chunks:
                task(lo, hi)
            return
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            for fut in [pool.submit(task, lo, hi) for lo, hi in chunks]:
                fut.result()


class FeatureMaps:
    """All d feature maps stored contiguously as a (d, n, b) array.

    Built once (map step over features) and read-only afterwards.
    """

    def __init__(self, maps, degenerate, cfg):
        self.maps = maps
        self.degenerate = degenerate
        self.cfg = cfg
        maps.flags.writeable = False

    @classmethod
    def build(cls, X, cfg, engine=None, backend=None):
        """Standardize every row of ``X`` (d x n) and build its Nystrom map."""
        engine = engine or EngineConfig()
        ker = backend or _backend.kernels
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError("X must be a d x n matrix")
        d, n = X.shape
        Z = np.empty_like(X)
        degenerate = np.zeros(d, dtype=bool)
        for k in range(d):
            Z[k], degenerate[k] = standardize(X[k])
        proj = np.ascontiguousarray(basis_projection(cfg, cfg.sigma_u))
        out = np.empty((d, n, cfg.basis_count), dtype=np.float64)
        qn = np.empty(d, dtype=np.float64)
        basis = cfg.basis
        engine.run(lambda lo, hi: ker.build_maps(Z, basis, proj, float(cfg.sigma_u), out, qn, lo, hi), d)
        finalize_maps(out, qn, degenerate, cfg.normalized)
        return cls(out, degenerate, cfg)

    @property
    def d(self):
        return self.maps.shape[0]

    @property
    def n(self):
        return self.maps.shape[1]

    @property
    def stored_numbers(self):
        return self.maps.size

    def __len__(self):
        return self.d

    def __getitem__(self, k):
        return FeatureMap(int(k), self.maps[k], bool(self.degenerate[k]))


def _score_against(maps, other, engine, backend):
    ker = backend or _backend.kernels
    other = np.ascontiguousarray(other, dtype=np.float64)
    if other.shape[0] != maps.n:
        raise ValidationError(f"factor has {other.shape[0]} rows, maps have n={maps.n}")
    out = np.empty(maps.d, dtype=np.float64)
    engine.run(lambda lo, hi: ker.pair_scores(maps.maps, other, out, lo, hi), maps.d)
    return out


def relevance_pass(maps, G, cfg=None, backend=None):
    """``f[k] = nhsic_approx(F_k, G)`` for every feature."""
    return _score_against(maps, _as_factor(G), cfg or EngineConfig(), backend)


def redundancy_pass(maps, Fj, cfg=None, backend=None):
    """``r[k] = nhsic_approx(F_k, F_j)`` for every feature."""
    if isinstance(Fj, (int, np.integer)):
        Fj = maps.maps[Fj]
    return _score_against(maps, _as_factor(Fj), cfg or EngineConfig(), backend)


class ScoreState:
    """Relevance vector ``f`` plus redundancy columns for the active features.

    A column is appended once, when its feature enters the active set.
    """

    def __init__(self, maps, G, engine=None, backend=None):
        self.maps = maps
        self.engine = engine or EngineConfig()
        self.backend = backend
        self.f = relevance_pass(maps, G, self.engine, backend)
        self._cols = {}
        self.order = []

    def column(self, j):
        if j not in self._cols:
            self._cols[j] = redundancy_pass(self.maps, int(j), self.engine, self.backend)
            self.order.append(j)
        return self._cols[j]

    @property
    def R(self):
        if not self.order:
            return np.zeros((self.maps.d, 0))
        return np.column_stack([self._cols[j] for j in self.order])
