import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fracgl import FGLSolver, Grid, ShapeError, SplitStepper, example1, integrate_full
from fracgl.problems import initial_field


@pytest.fixture
def field():
    params = example1(t_final=0.1)
    return initial_field(params, Grid.from_params(params, 24, 1))


def test_params_roundtrip():
    est = FGLSolver(rank=3, n_steps=10, alpha=1.2, t_final=0.1)
    params = est.get_params()
    assert params["rank"] == 3 and params["alpha"] == 1.2
    twin = clone(est)
    assert twin.get_params() == params
    twin.set_params(rank=None)
    assert twin.rank is None and est.rank == 3


def test_full_rank_matches_integrator(field):
    est = FGLSolver(rank=None, n_steps=8, t_final=0.1).fit(field)
    params = example1(t_final=0.1)
    grid = Grid.from_params(params, 24, 8)
    want = integrate_full(field, SplitStepper.build(params, grid), 8).final
    np.testing.assert_allclose(est.final_, want, atol=1e-14)
    assert est.state_ is None


def test_lowrank_fit_transform(field):
    est = FGLSolver(rank=2, n_steps=8, t_final=0.1, track_residual=True)
    out = est.fit_transform(field)
    assert out.shape == field.shape
    assert est.state_.rank == 2
    assert len(est.diagnostics_) == 8
    assert est.truncation_error_ < 1e-12
    np.testing.assert_allclose(est.transform(field), out)
    ref = FGLSolver(rank=None, n_steps=8, t_final=0.1).fit(field).final_
    assert -0.05 < est.score(field, ref) <= 0


def test_unfitted_and_shape_errors(field):
    est = FGLSolver(rank=2, n_steps=2, t_final=0.1)
    with pytest.raises(NotFittedError):
        est.transform(field)
    est.fit(field)
    with pytest.raises(ShapeError):
        est.transform(field[:, :-1])
