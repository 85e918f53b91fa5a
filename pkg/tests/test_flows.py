import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from fracgl import (
    FglParams,
    Grid,
    NumericalError,
    ShapeError,
    SplitStepper,
    integrate_full,
    lie_trotter_step,
    nonlinear_flow,
    nonlinear_rhs,
)
from fracgl.reference import rk4_full_ode
from conftest import random_field


def test_rhs_formula(ex2):
    u = np.array([[1 + 1j, 0.5j]])
    rho = np.abs(u) ** 2
    want = -(1.0 - 5.0j) * rho * u + 3.0 * u
    np.testing.assert_allclose(nonlinear_rhs(u, ex2), want, rtol=1e-15)


def test_logistic_modulus():
    params = FglParams(kappa=1.0, xi=0.0, gamma=0.0)
    out = nonlinear_flow(np.array([[1.0 + 0j]]), 1.0, params)
    assert abs(out[0, 0]) == pytest.approx(1 / np.sqrt(3), rel=1e-15)


def test_pure_phase_rotation():
    params = FglParams(kappa=0.0, xi=2.0, gamma=0.0)
    u = np.array([[2.0 + 0j, 1j]])
    out = nonlinear_flow(u, 0.3, params)
    np.testing.assert_allclose(out, u * np.exp(-2j * np.abs(u) ** 2 * 0.3), rtol=1e-14)


@pytest.mark.parametrize("preset", ["ex1", "ex2"])
def test_closed_form_matches_rk4(rng, request, preset):
    params = request.getfixturevalue(preset)
    u = random_field(rng, (6, 5), 0.7)
    exact = nonlinear_flow(u, 0.05, params)
    approx = nonlinear_flow(u, 0.05, params, method="rk4", substeps=10_000)
    assert np.abs(exact - approx).max() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=0.3),
    st.floats(min_value=0.0, max_value=0.3),
    st.sampled_from([(1.0, 1.0, 1.0), (1.0, -5.0, 3.0), (0.0, 1.0, 2.0), (2.0, 0.0, 0.0)]),
    st.integers(min_value=0, max_value=2**31),
)
def test_semiflow(s, t, coeffs, seed):
    kappa, xi, gamma = coeffs
    params = FglParams(kappa=kappa, xi=xi, gamma=gamma)
    u = random_field(np.random.default_rng(seed), (4, 4), 0.8)
    one = nonlinear_flow(u, s + t, params)
    two = nonlinear_flow(nonlinear_flow(u, s, params), t, params)
    assert np.abs(one - two).max() <= 1e-10 * max(1.0, np.abs(one).max())


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.1, max_value=5.0),
    st.floats(min_value=0.1, max_value=5.0),
    st.floats(min_value=0.0, max_value=2.0),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_absorbing_bound(kappa, gamma, tau, start):
    # |u|^2 moves monotonically toward gamma / kappa and never crosses it
    params = FglParams(kappa=kappa, xi=1.0, gamma=gamma)
    eq = gamma / kappa
    rho0 = start * eq
    u = np.array([[np.sqrt(rho0) + 0j]])
    rho = abs(nonlinear_flow(u, tau, params)[0, 0]) ** 2
    assert rho0 * (1 - 1e-12) <= rho <= eq * (1 + 1e-12)


def test_negative_tau_rejected(ex1):
    with pytest.raises(ValueError):
        nonlinear_flow(np.ones((2, 2)), -0.1, ex1)
    with pytest.raises(ValueError):
        nonlinear_flow(np.ones((2, 2)), 0.1, ex1, method="euler")


def test_commuting_case_is_exact(rng):
    params = FglParams(kappa=0.0, xi=0.0, gamma=1.0, alpha=1.4, beta=1.7)
    grid = Grid.from_params(params, 12, 4)
    stepper = SplitStepper.build(params, grid)
    u0 = random_field(rng, grid.shape)
    got = integrate_full(u0, stepper, 4).final
    a_x = stepper.ax.op.to_dense()
    a_y = stepper.ay.op.to_dense()
    want = np.exp(1.0) * scipy.linalg.expm(a_x) @ u0 @ scipy.linalg.expm(a_y)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_local_error_is_second_order(ex1):
    # one Lie-Trotter step against a fine unsplit RK4 solution
    n = 16
    errors = []
    for t in (0.02, 0.01, 0.005):
        params = ex1.replace(t_final=t)
        grid = Grid.from_params(params, n, 1)
        x, y = grid.mesh()
        u0 = 0.8 * np.exp(-(x**2 + y**2) / 8) * np.exp(0.5j * x)
        split = lie_trotter_step(u0, SplitStepper.build(params, grid))
        ref = rk4_full_ode(u0, params, grid, 400)
        errors.append(np.linalg.norm(split - ref))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders > 1.8), orders


def test_global_order_one(ex1):
    n = 16
    params = ex1.replace(t_final=0.5)
    grid = Grid.from_params(params, n, 1)
    x, y = grid.mesh()
    u0 = 0.8 * np.exp(-(x**2 + y**2) / 8) * np.exp(0.5j * x)
    ref = rk4_full_ode(u0, params, grid, 4000)
    errs = []
    for m in (20, 40, 80):
        stepper = SplitStepper.build(params, grid.with_steps(m))
        errs.append(np.linalg.norm(integrate_full(u0, stepper, m).final - ref))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 0.85) & (orders < 1.2)), orders


def test_exact_and_rk4_variants_agree(rng, ex2):
    params = ex2
    grid = Grid.from_params(params, 16, 10)
    u0 = random_field(rng, grid.shape, 0.5)
    a = integrate_full(u0, SplitStepper.build(params, grid), 10).final
    b = integrate_full(u0, SplitStepper.build(params, grid, nonlinear="rk4", substeps=50), 10).final
    assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(a)


def test_snapshots_and_shape(rng, ex1, small_grid):
    stepper = SplitStepper.build(ex1, small_grid)
    u0 = random_field(rng, small_grid.shape, 0.1)
    traj = integrate_full(u0, stepper, 4, snapshots=(0, 2, 4))
    assert sorted(traj.snapshots) == [0, 2, 4]
    np.testing.assert_array_equal(traj.snapshots[4], traj.final)
    np.testing.assert_array_equal(traj.snapshots[0], u0)
    with pytest.raises(ShapeError):
        integrate_full(u0.T[:-1], stepper, 2)


def test_nan_aborts_with_step(small_grid):
    params = FglParams(kappa=1.0, xi=0.0, gamma=0.0)
    stepper = SplitStepper.build(params, small_grid.with_steps(1), nonlinear="rk4")
    u0 = np.full(small_grid.shape, 1e60, dtype=complex)
    with np.errstate(all="ignore"), pytest.raises(NumericalError) as info:
        integrate_full(u0, stepper, 3)
    assert info.value.step == 1


def test_stepper_rejects_mismatched_tau(ex1, small_grid):
    st_a = SplitStepper.build(ex1, small_grid)
    st_b = SplitStepper.build(ex1, small_grid.with_steps(3))
    with pytest.raises(ValueError):
        SplitStepper(st_a.ax, st_b.ay, ex1, st_a.tau)
