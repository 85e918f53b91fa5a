"""scikit-learn compatible front end.

``FGLSolver`` maps an initial field (interior grid values, shape
``(N_x - 1, N_y - 1)``) to the solution at ``t_final``.  The grid is inferred
from the input shape and ``domain``.  ``get_params``/``set_params``/``clone``
work as for any estimator, so solver settings can be swept with the usual
tooling.
"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_field, check_positive_int
from .exceptions import DegeneracyWarning, ShapeError
from .flows import SplitStepper, integrate_full
from .fracgrid import FglParams, Grid
from .lowrank import integrate_lowrank, reconstruct, truncate_svd
from .reference import relerr


class FGLSolver(TransformerMixin, BaseEstimator):
    """Low-rank (``rank=int``) or full-rank (``rank=None``) Lie-Trotter solver.

    Parameters
    ----------
    rank : int or None
        Rank of the approximation; ``None`` runs the full-rank splitting.
    n_steps : int
        Number of time steps ``M``.
    nu, eta, kappa, xi, gamma, alpha, beta, domain, t_final
        Equation coefficients, see :class:`fracgl.FglParams`.
    backend : {"auto", "dense", "krylov"}
        Exponential backend for the linear flow.
    rk4_substeps : int
        RK4 steps per projector-splitting substep (and per nonlinear flow when
        ``nonlinear="rk4"``).
    nonlinear : {"exact", "rk4"}
        Full-rank nonlinear flow; ignored in low-rank mode.
    substep_order : {"LSK", "KSL"}
        Substep sequence of the projector splitting.
    track_residual : bool
        Record the tangent-space residual every step (low-rank only).

    Attributes
    ----------
    final_ : ndarray
        Solution at ``t_final`` for the data passed to ``fit``.
    state_ : LowRankState or None
        Factored final state (low-rank mode).
    diagnostics_ : list of StepDiagnostics
    truncation_error_ : float
        ``||X0 - U0||_F`` of the initial rank truncation.
    grid_ : Grid
    """

    def __init__(
        self,
        rank=5,
        n_steps=256,
        *,
        nu=1.0,
        eta=1.0,
        kappa=1.0,
        xi=1.0,
        gamma=1.0,
        alpha=1.5,
        beta=1.5,
        domain=(-10.0, 10.0, -10.0, 10.0),
        t_final=1.0,
        backend="auto",
        rk4_substeps=1,
        nonlinear="exact",
        substep_order="LSK",
        track_residual=False,
    ):
        self.rank = rank
        self.n_steps = n_steps
        self.nu = nu
        self.eta = eta
        self.kappa = kappa
        self.xi = xi
        self.gamma = gamma
        self.alpha = alpha
        self.beta = beta
        self.domain = domain
        self.t_final = t_final
        self.backend = backend
        self.rk4_substeps = rk4_substeps
        self.nonlinear = nonlinear
        self.substep_order = substep_order
        self.track_residual = track_residual

    def _model(self):
        return FglParams(
            nu=self.nu, eta=self.eta, kappa=self.kappa, xi=self.xi, gamma=self.gamma,
            alpha=self.alpha, beta=self.beta, domain=tuple(self.domain), t_final=self.t_final,
        )

    def _run(self, X):
        u0 = check_field(X, name="X")
        params = self._model()
        m = check_positive_int(self.n_steps, "n_steps")
        grid = Grid.from_params(params, u0.shape[0] + 1, m, n_y=u0.shape[1] + 1)
        stepper = SplitStepper.build(
            params, grid, backend=self.backend, nonlinear=self.nonlinear,
            substeps=self.rk4_substeps,
        )
        if self.rank is None:
            return grid, integrate_full(u0, stepper, m).final, None, [], 0.0
        x0, trunc = truncate_svd(u0, self.rank)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegeneracyWarning)
            traj = integrate_lowrank(
                x0, stepper, m, track_residual=self.track_residual,
                substep_order=self.substep_order,
            )
        return grid, reconstruct(traj.final), traj.final, traj.diagnostics, trunc

    def fit(self, X, y=None):
        """Integrate from the initial field ``X``; ``y`` is ignored."""
        self.grid_, self.final_, self.state_, self.diagnostics_, self.truncation_error_ = (
            self._run(X)
        )
        self.n_features_in_ = self.final_.shape[1]
        return self

    def transform(self, X):
        """Solution at ``t_final`` starting from ``X``."""
        check_is_fitted(self, "final_")
        X = check_field(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(f"X has {X.shape[1]} columns, fitted with {self.n_features_in_}")
        return self._run(X)[1]

    def fit_transform(self, X, y=None):
        return self.fit(X).final_

    def score(self, X, y):
        """Negative relative Frobenius error of ``transform(X)`` against ``y``."""
        return -relerr(self.transform(X), np.asarray(y))
