import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from animc.norms import (frobenius_norm, l21_norm, row_norms, theta_diag, theta_norm,
                         theta_norm_gradient)

B34 = np.array([[3.0, 4.0]])

matrices = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 5)),
                  elements=st.floats(-10, 10, allow_nan=False))


def fd_gradient(f, B, h=1e-6):
    G = np.zeros_like(B)
    for idx in np.ndindex(B.shape):
        E = np.zeros_like(B)
        E[idx] = h
        G[idx] = (f(B + E) - f(B - E)) / (2 * h)
    return G


@pytest.mark.parametrize("B, expected", [
    ([[3, 4]], 5.0), (np.zeros((3, 2)), 0.0), (np.eye(2), np.sqrt(2)),
])
def test_frobenius_examples(B, expected):
    assert frobenius_norm(B) == pytest.approx(expected)


@pytest.mark.parametrize("B, expected", [
    ([[3, 4], [0, 0]], 5.0), (np.eye(2), 2.0), ([[1, 0], [0, 1], [1, 0]], 3.0),
])
def test_l21_examples(B, expected):
    assert l21_norm(B) == pytest.approx(expected)


def test_theta_norm_closed_form():
    assert theta_norm(B34, 1.0) == pytest.approx(25 / 3)


def test_theta_norm_limits_on_single_row():
    assert theta_norm(B34, 1e-9) == pytest.approx(25.0, rel=1e-6)
    assert theta_norm(B34, 1e9) == pytest.approx(5.0, rel=1e-6)


@pytest.mark.parametrize("theta", [0.0, -1.0])
def test_theta_must_be_positive(theta):
    with pytest.raises(ValueError):
        theta_norm(B34, theta)
    with pytest.raises(ValueError):
        theta_diag(B34, theta)


def test_theta_diag_examples():
    assert theta_diag(B34, 1.0).diag[0] == pytest.approx(7 / 18)
    assert theta_diag(B34, 1e9).diag[0] == pytest.approx(0.2, rel=1e-6)
    assert theta_diag(B34, 1e-9).diag[0] == pytest.approx(2.0, rel=1e-6)


def test_gradient_examples():
    np.testing.assert_allclose(theta_norm_gradient(B34, 1.0), [[7 / 6, 14 / 9]])
    np.testing.assert_allclose(theta_norm_gradient(B34, 1e9), [[0.6, 0.8]], rtol=1e-6)
    Z = np.zeros((2, 3))
    assert np.all(np.isfinite(theta_diag(Z, 100.0).diag))
    np.testing.assert_array_equal(theta_norm_gradient(Z, 100.0), Z)


def test_gradient_matches_finite_differences_closed_form_row():
    fd = fd_gradient(lambda X: theta_norm(X, 1.0), B34)
    np.testing.assert_allclose(theta_norm_gradient(B34, 1.0), fd, rtol=1e-7)


@given(matrices, st.sampled_from([0.01, 1.0, 100.0]))
def test_gradient_identity_property(B, theta):
    B = B + np.where(row_norms(B)[:, None] < 0.1, 1.0, 0.0)  # keep rows off zero
    fd = fd_gradient(lambda X: theta_norm(X, theta), B)
    np.testing.assert_allclose(theta_norm_gradient(B, theta), fd, rtol=1e-5, atol=1e-6)


@given(matrices)
def test_nonnegative_and_finite_gradient(B):
    for theta in (1e-3, 1.0, 1e3):
        assert theta_norm(B, theta) >= 0
        assert np.all(np.isfinite(theta_norm_gradient(B, theta)))
        assert np.all(theta_diag(B, theta).diag > 0)


@given(matrices)
def test_limit_sandwich(B):
    # per-row gap to L2,1 is s(s-1)/(1+theta s): the limit needs theta*s >> 1
    B = np.where(row_norms(B)[:, None] < 1e-3, 0.0, B)
    fro2 = frobenius_norm(B) ** 2
    l21 = l21_norm(B)
    assert abs(theta_norm(B, 1e-8) - fro2) <= 1e-3 * fro2 + 1e-12
    assert abs(theta_norm(B, 1e8) - l21) <= 1e-3 * l21 + 1e-12


@given(arrays(np.float64, (4, 3), elements=st.floats(-5, 5, allow_nan=False)))
def test_nonincreasing_in_theta_for_rows_of_norm_at_least_one(B):
    s = row_norms(B)
    B = B / np.maximum(s, 1e-12)[:, None] * np.maximum(s, 1.0)[:, None]
    B[row_norms(B) < 1.0] = 1.0
    thetas = np.logspace(-3, 3, 25)
    vals = [theta_norm(B, t) for t in thetas]
    assert np.all(np.diff(vals) <= 1e-9 * max(vals))


def test_large_theta_diag_tends_to_inverse_row_norm(rng):
    B = rng.standard_normal((6, 4)) + 0.5
    np.testing.assert_allclose(theta_diag(B, 1e10).diag, 1 / row_norms(B), rtol=1e-6)


def test_theta_diag_array_protocol():
    d = theta_diag(B34, 1.0)
    np.testing.assert_allclose(np.asarray(d), d.diag)
    np.testing.assert_allclose(d.apply(B34), theta_norm_gradient(B34, 1.0))
