import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from land.numerics import (
    DegenerateFeatureError,
    ValidationError,
    center_rows_mean,
    quartic_trace_norm,
    spd_inverse_sqrt,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_inverse_sqrt_identity():
    np.testing.assert_allclose(spd_inverse_sqrt(np.eye(3), 1e-10), np.eye(3), atol=1e-14)


def test_inverse_sqrt_diagonal():
    S = spd_inverse_sqrt(np.diag([4.0, 9.0]), 1e-10)
    np.testing.assert_allclose(S, np.diag([0.5, 1 / 3]), atol=1e-14)


def test_inverse_sqrt_reconstruction(rng):
    B = rng.standard_normal((5, 5))
    A = B @ B.T + np.eye(5)
    S = spd_inverse_sqrt(A)
    assert np.linalg.norm(S @ A @ S - np.eye(5)) < 1e-8
    np.testing.assert_array_equal(S, S.T)


def test_inverse_sqrt_clamps_singular():
    v = np.array([1.0, 1.0]) / np.sqrt(2)
    A = np.outer(v, v)
    S = spd_inverse_sqrt(A, 1e-10)
    assert np.all(np.isfinite(S))
    # on the non-null eigenvector the inverse square root is exact
    np.testing.assert_allclose(v @ S @ A @ S @ v, 1.0, atol=1e-12)


@pytest.mark.parametrize(
    "M",
    [np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([[1.0, np.nan], [np.nan, 1.0]]), np.ones((2, 3))],
)
def test_inverse_sqrt_rejects(M):
    with pytest.raises(ValidationError):
        spd_inverse_sqrt(M)


@pytest.mark.parametrize(
    "col, expected",
    [([5.0] * 4, [0.0] * 4), ([1.0, -1.0], [1.0, -1.0]), ([1.0, 2.0, 3.0], [-1.0, 0.0, 1.0])],
)
def test_center_rows_mean_examples(col, expected):
    out = center_rows_mean(np.array(col)[:, None])
    np.testing.assert_allclose(out[:, 0], expected, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 5)), elements=finite))
def test_center_rows_mean_properties(A):
    once = center_rows_mean(A)
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0)
    assert np.all(np.abs(once.sum(axis=0)) <= 1e-12 * n * scale)
    np.testing.assert_allclose(center_rows_mean(once), once, atol=1e-12 * scale)


def test_quartic_trace_norm_examples(rng):
    Qm, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    assert quartic_trace_norm(Qm) == pytest.approx(2 ** 0.25, rel=1e-12)
    assert quartic_trace_norm(np.array([[3.0], [4.0]])) == pytest.approx(5.0, rel=1e-14)


def test_quartic_trace_norm_direct_summation(rng):
    A = rng.standard_normal((6, 3))
    total = 0.0
    for i in range(3):
        for j in range(3):
            gij = sum(A[r, i] * A[r, j] for r in range(6))
            total += gij * gij
    assert quartic_trace_norm(A) ** 4 == pytest.approx(total, rel=1e-12)


@pytest.mark.parametrize("c", [2.0, -0.5, 7.0])
def test_quartic_trace_norm_homogeneity(rng, c):
    # tr((A^T A)^2) is degree 4 in A, so its fourth root is degree 1
    A = rng.standard_normal((7, 4))
    assert quartic_trace_norm(c * A) == pytest.approx(abs(c) * quartic_trace_norm(A), rel=1e-12)


def test_quartic_trace_norm_zero():
    with pytest.raises(DegenerateFeatureError):
        quartic_trace_norm(np.zeros((3, 2)))
