import numpy as np
import pytest

from land.kernelmap import (
    HSIC,
    KernelConfig,
    Target,
    build_feature_map,
    build_output_map,
    full_normalized_kernel,
    gaussian_kernel,
    standardize,
)
from land.numerics import ValidationError


def exact_basis(cfg, u):
    z, _ = standardize(u)
    return cfg.with_basis(np.sort(z))


def test_config_defaults():
    cfg = KernelConfig()
    assert cfg.sigma_u == 1.0 and cfg.sigma_y == 1.0
    np.testing.assert_allclose(cfg.basis, np.linspace(-5, 5, 20))
    assert KernelConfig(basis_count=10).basis_count == 10


@pytest.mark.parametrize("kwargs", [{"sigma_u": 0}, {"basis_count": 1}, {"basis_values": (1.0, 0.0)}, {"score_mode": "x"}])
def test_config_rejects(kwargs):
    with pytest.raises(ValidationError):
        KernelConfig(**kwargs)


def test_standardize_examples():
    z, deg = standardize([1.0, -1.0])
    np.testing.assert_allclose(z, [1 / np.sqrt(2), -1 / np.sqrt(2)], atol=1e-15)
    assert not deg
    z, deg = standardize([5.0, 5.0, 5.0])
    assert deg and np.all(z == 0)
    z, _ = standardize([0.0, 2.0, 4.0])
    np.testing.assert_allclose(z, [-1.0, 0.0, 1.0], atol=1e-15)
    with pytest.raises(ValidationError):
        standardize([1.0])


def test_gaussian_kernel(rng):
    assert gaussian_kernel(0.0, 0.0, 1.0) == 1.0
    assert gaussian_kernel(1.0, 0.0, 1.0) == pytest.approx(0.606531, abs=1e-6)
    a, b = rng.standard_normal(2)
    assert gaussian_kernel(a, b, 0.7) == gaussian_kernel(b, a, 0.7)


def test_feature_map_exact_at_sample_basis(cfg):
    u = np.array([-1.0, 0.0, 1.0])
    F = build_feature_map(u, exact_basis(cfg, u))
    np.testing.assert_allclose(F.F @ F.F.T, full_normalized_kernel(u, cfg), atol=1e-10)


def test_feature_map_constant(cfg):
    F = build_feature_map(np.full(6, 2.5), cfg)
    assert F.degenerate
    assert np.sum((F.F.T @ F.F) ** 2) == 0.0


def test_feature_map_centered_and_normalized(cfg, rng):
    F = build_feature_map(rng.standard_normal(50), cfg).F
    assert F.shape == (50, 20)
    assert np.abs(F.sum(axis=0)).max() < 1e-10
    assert np.trace((F.T @ F) @ (F.T @ F)) == pytest.approx(1.0, abs=1e-8)


def test_hsic_mode_skips_only_normalization(rng):
    u = rng.standard_normal(30)
    raw = build_feature_map(u, KernelConfig(score_mode=HSIC)).F
    norm = build_feature_map(u, KernelConfig()).F
    assert np.abs(raw.sum(axis=0)).max() < 1e-10
    scale = np.sqrt(np.sqrt(np.sum((raw.T @ raw) ** 2)))
    np.testing.assert_allclose(raw / scale, norm, atol=1e-12)


def test_exactness_at_full_rank(cfg, rng):
    u = rng.standard_normal(25)
    F = build_feature_map(u, exact_basis(cfg, u)).F
    assert np.abs(F @ F.T - full_normalized_kernel(u, cfg)).max() < 1e-8


def test_nested_grids_monotone(rng):
    # grids with 2^k + 1 points on [-5, 5] are nested
    u = rng.standard_normal(60)
    K = full_normalized_kernel(u, KernelConfig())
    errs = []
    for b in (5, 9, 17):
        F = build_feature_map(u, KernelConfig(basis_count=b)).F
        errs.append(np.sum((F @ F.T - K) ** 2))
    assert errs[1] <= errs[0] + 1e-12
    assert errs[2] <= errs[1] + 1e-12


def test_permutation_equivariance(cfg, rng):
    u = rng.standard_normal(40)
    perm = rng.permutation(40)
    np.testing.assert_allclose(build_feature_map(u[perm], cfg).F, build_feature_map(u, cfg).F[perm], atol=1e-12)


@pytest.mark.parametrize("c, a", [(3.0, 1.5), (0.2, -4.0), (-2.0, 0.5)])
def test_affine_invariance(cfg, rng, c, a):
    u = rng.standard_normal(40)
    F1 = build_feature_map(u, cfg).F
    F2 = build_feature_map(c * u + a, cfg).F
    np.testing.assert_allclose(F2 @ F2.T, F1 @ F1.T, atol=1e-10)


def test_output_map_classification_raw_form(cfg):
    G = build_output_map(Target.classification([0, 0, 1]), KernelConfig(score_mode=HSIC))
    raw = np.array([[1 / np.sqrt(2), 0], [1 / np.sqrt(2), 0], [0, 1]])
    np.testing.assert_allclose(G.G, raw - raw.mean(axis=0), atol=1e-15)
    assert G.class_counts == (2, 1)


def test_output_map_regression_self(cfg, rng):
    G = build_output_map(rng.standard_normal(40), cfg).G
    assert np.sum((G.T @ G) ** 2) == pytest.approx(1.0, abs=1e-8)


def test_output_map_balanced_binary_matches_delta_kernel(cfg):
    t = Target.classification([0, 0, 1, 1])
    G = build_output_map(t, cfg).G
    np.testing.assert_allclose(G @ G.T, full_normalized_kernel(t, cfg), atol=1e-12)


def test_output_map_regression_uses_sigma_y(rng):
    y = rng.standard_normal(30)
    t = Target.regression(y)
    cfg = KernelConfig(sigma_y=0.5)
    G = build_output_map(t, cfg.with_basis(np.sort(standardize(y)[0]))).G
    np.testing.assert_allclose(G @ G.T, full_normalized_kernel(t, cfg), atol=1e-8)


def test_output_map_rejects_degenerate(cfg):
    with pytest.raises(ValidationError):
        build_output_map(Target.classification([1, 1, 1]), cfg)
    with pytest.raises(ValidationError):
        build_output_map(np.ones(5), cfg)


def test_full_kernel_constraints(cfg, rng):
    for u in (rng.standard_normal(30), rng.exponential(size=17)):
        K = full_normalized_kernel(u, cfg)
        assert abs(np.sum(K * K) - 1) < 1e-10
        assert abs(K.sum()) < 1e-8
        assert np.trace(K @ K) == pytest.approx(1.0, abs=1e-10)


def test_full_kernel_two_points(cfg):
    K = full_normalized_kernel(np.array([1.0, -1.0]), cfg)
    np.testing.assert_allclose(K, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)


def test_full_kernel_guard(cfg):
    with pytest.raises(ValidationError):
        full_normalized_kernel(np.arange(2001.0), cfg)
