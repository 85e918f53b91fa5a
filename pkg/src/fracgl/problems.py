"""Parameter presets and initial fields for the two benchmark problems."""

import numpy as np

from ._validation import check_field
from .fracgrid import FglParams, InitialCondition


def example1(alpha=1.5, beta=1.5, **overrides):
    """Soliton-like data ``2 sech(x) sech(y) exp(3i(x+y))`` on ``[-10, 10]^2``."""
    kw = dict(
        nu=1.0, eta=1.0, kappa=1.0, xi=1.0, gamma=1.0,
        alpha=alpha, beta=beta, domain=(-10.0, 10.0, -10.0, 10.0), t_final=1.0,
        initial_condition=InitialCondition("example1"),
    )
    kw.update(overrides)
    return FglParams(**kw)


def example2(alpha=1.5, beta=1.5, **overrides):
    """Gaussian with hyperbolic phase on ``[-8, 8]^2``; gain ``gamma = 3``."""
    kw = dict(
        nu=1.0, eta=0.5, kappa=1.0, xi=-5.0, gamma=3.0,
        alpha=alpha, beta=beta, domain=(-8.0, 8.0, -8.0, 8.0), t_final=1.0,
        initial_condition=InitialCondition("example2"),
    )
    kw.update(overrides)
    return FglParams(**kw)


PRESETS = {"example1": example1, "example2": example2}


def random_rank_r(shape, rank, seed=None):
    """Complex field of exact rank ``rank`` with unit largest modulus."""
    rng = np.random.default_rng(seed)
    n_x, n_y = shape
    left = rng.standard_normal((n_x, rank)) + 1j * rng.standard_normal((n_x, rank))
    right = rng.standard_normal((n_y, rank)) + 1j * rng.standard_normal((n_y, rank))
    u = left @ right.conj().T
    return u / np.abs(u).max()


def initial_field(params, grid):
    """Sample the selected initial condition on the interior nodes of ``grid``."""
    ic = params.initial_condition
    x, y = grid.mesh()
    if ic.kind == "example1":
        return 2.0 / (np.cosh(x) * np.cosh(y)) * np.exp(3j * (x + y))
    if ic.kind == "example2":
        phase = 1.0 / (np.exp(x + y) + np.exp(-(x + y)))
        return np.exp(-2.0 * (x**2 + y**2)) * np.exp(1j * phase)
    if ic.kind == "rank_r":
        return random_rank_r(grid.shape, ic.rank, ic.seed)
    return check_field(ic.values, name="initial values", shape=grid.shape)
