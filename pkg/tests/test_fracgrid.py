import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from scipy.special import gamma, rgamma

from fracgl import (
    FglParams,
    Grid,
    ParameterDomainError,
    ShapeError,
    apply_operator,
    build_operator,
    stencil_coeffs,
)
from conftest import random_field

# g_k for mu = 1.5 from the Gamma-function definition at 30 digits (mpmath)
G_15 = [1.573787465354795, -0.67448034229491213, -0.061316394754082921, -0.020438798251360974]


def gamma_oracle(mu, k):
    # rgamma vanishes at the poles of Gamma(mu/2 - k + 1)
    return (-1) ** k * gamma(1 + mu) * rgamma(mu / 2 - k + 1) * rgamma(mu / 2 + k + 1)


def test_mu_two_is_laplacian():
    g = stencil_coeffs(2.0, 4).coeffs
    np.testing.assert_allclose(g, [2, -1, 0, 0, 0], atol=1e-12)


def test_mu_three_halves_frozen():
    np.testing.assert_allclose(stencil_coeffs(1.5, 3).coeffs, G_15, rtol=1e-14)


@pytest.mark.parametrize("mu", [1.05, 1.2, 1.5, 1.7, 1.9, 1.99])
def test_recurrence_matches_gamma_formula(mu):
    k = np.arange(60)
    np.testing.assert_allclose(stencil_coeffs(mu, 59).coeffs, gamma_oracle(mu, k), rtol=1e-12)


def test_recurrence_survives_gamma_overflow():
    g = stencil_coeffs(1.5, 400).coeffs
    assert np.all(np.isfinite(g))
    assert np.isinf(gamma(1.5 / 2 + 400 + 1))
    assert g[400] < 0


@pytest.mark.parametrize("mu", [1.2, 1.5, 1.7, 1.9])
def test_partial_sums_vanish_monotonically(mu):
    s = stencil_coeffs(mu, 5000)
    sums = [s.partial_sum(k) for k in (10, 100, 1000, 5000)]
    assert all(v >= 0 for v in sums)
    assert all(b <= a for a, b in zip(sums, sums[1:]))
    assert sums[-1] < 1e-3


@pytest.mark.parametrize("mu", [1.0, 0.5, 2.01, float("nan")])
def test_order_out_of_range(mu):
    with pytest.raises(ParameterDomainError):
        stencil_coeffs(mu, 3)


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        stencil_coeffs(1.5, 0)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1.001, max_value=1.999))
def test_stencil_signs(mu):
    g = stencil_coeffs(mu, 10).coeffs
    assert g[0] > 0
    assert np.all(g[1:] < 0)


def test_params_validation():
    with pytest.raises(ParameterDomainError):
        FglParams(nu=0.0)
    with pytest.raises(ParameterDomainError):
        FglParams(alpha=1.0)
    with pytest.raises(ParameterDomainError):
        FglParams(kappa=-1.0)
    with pytest.raises(ParameterDomainError):
        FglParams(domain=(1.0, 0.0, 0.0, 1.0))
    with pytest.raises(ParameterDomainError):
        FglParams(t_final=0.0)


def test_grid_geometry(ex1):
    g = Grid.from_params(ex1, 8, 4, n_y=10)
    assert g.shape == (7, 9)
    assert g.h_x == pytest.approx(2.5)
    assert g.h_y == pytest.approx(2.0)
    assert g.tau == pytest.approx(0.25)
    np.testing.assert_allclose(g.x, -10 + 2.5 * np.arange(1, 8))
    with pytest.raises(ValueError):
        Grid.from_params(ex1, 3, 4)


def test_classical_operator():
    params = FglParams(nu=1.0, eta=0.0, alpha=2.0, beta=2.0, domain=(0.0, 8.0, 0.0, 8.0))
    grid = Grid.from_params(params, 8, 1)
    op = build_operator(params, grid, "x")
    np.testing.assert_allclose(op.first_column, [-2, 1, 0, 0, 0, 0, 0], atol=1e-12)
    tri = np.diag(-2.0 * np.ones(7)) + np.diag(np.ones(6), 1) + np.diag(np.ones(6), -1)
    np.testing.assert_allclose(op.to_dense(), tri, atol=1e-12)


def test_operator_dense_reconstruction():
    params = FglParams(nu=1.0, eta=1.0, alpha=1.5, beta=1.5, domain=(0.0, 0.8, 0.0, 0.8))
    grid = Grid.from_params(params, 8, 1)
    op = build_operator(params, grid, "y")
    g = gamma_oracle(1.5, np.arange(7))
    expected = -(1 + 1j) * 10**1.5 * scipy.linalg.toeplitz(g)
    np.testing.assert_allclose(op.to_dense(), expected, rtol=1e-12)
    dense = op.to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    assert not np.allclose(dense, dense.conj().T)


def test_example1_operator_size(ex1):
    op = build_operator(ex1, Grid.from_params(ex1, 512, 1), "x")
    assert op.size == 511
    assert op.embed_length >= 2 * 511 - 1


def test_build_operator_deterministic(ex1, small_grid):
    a = build_operator(ex1, small_grid, "x")
    b = build_operator(ex1, small_grid, "x")
    assert a.first_column.tobytes() == b.first_column.tobytes()
    assert a.fft_symbol.tobytes() == b.fft_symbol.tobytes()


@pytest.mark.parametrize("n", [5, 16, 33, 64])
def test_fft_apply_matches_dense(rng, n):
    params = FglParams(alpha=1.3, beta=1.8, eta=0.7)
    grid = Grid.from_params(params, n + 1, 1, n_y=n // 2 + 5)
    op_x, op_y = build_operator(params, grid, "x"), build_operator(params, grid, "y")
    u = random_field(rng, grid.shape)
    left = apply_operator(op_x, u, "left")
    right = apply_operator(op_y, u, "right")
    dense_l = op_x.to_dense() @ u
    dense_r = u @ op_y.to_dense()
    assert np.linalg.norm(left - dense_l) <= 1e-12 * np.linalg.norm(dense_l)
    assert np.linalg.norm(right - dense_r) <= 1e-12 * np.linalg.norm(dense_r)
    conj = apply_operator(op_x, u, "left", conj=True)
    np.testing.assert_allclose(conj, op_x.to_dense().conj() @ u, rtol=1e-12, atol=1e-12)


def test_apply_zero_and_transpose_identity(rng, ex1):
    grid = Grid.from_params(ex1, 17, 1)
    op = build_operator(ex1, grid, "x")
    assert np.all(apply_operator(op, np.zeros(grid.shape), "left") == 0)
    u = random_field(rng, grid.shape)
    np.testing.assert_allclose(
        apply_operator(op, u.T, "left").T, apply_operator(op, u, "right"), rtol=1e-12, atol=1e-12
    )


def test_apply_shape_mismatch(ex1, small_grid):
    op = build_operator(ex1, small_grid, "x")
    with pytest.raises(ShapeError):
        apply_operator(op, np.zeros((op.size + 1, 3)), "left")
    with pytest.raises(ShapeError):
        apply_operator(op, np.zeros((3, op.size + 1)), "right")


def test_norm_bound_dominates(ex1, small_grid):
    op = build_operator(ex1, small_grid, "x")
    assert np.linalg.norm(op.to_dense(), 2) <= op.norm_bound() * (1 + 1e-12)
