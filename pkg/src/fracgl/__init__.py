"""Low-rank Lie-Trotter splitting for the 2D space-fractional Ginzburg-Landau equation."""

from .estimator import FGLSolver
from .exceptions import (
    CapabilityError,
    ConfigError,
    ConvergenceError,
    DegeneracyWarning,
    NumericalError,
    ParameterDomainError,
    ShapeError,
)
from .flows import (
    SplitStepper,
    Trajectory,
    integrate_full,
    lie_trotter_step,
    nonlinear_flow,
    nonlinear_rhs,
)
from .fracgrid import (
    FglParams,
    FracOperator,
    FracStencil,
    Grid,
    InitialCondition,
    apply_operator,
    build_operator,
    stencil_coeffs,
)
from .lowrank import (
    LowRankState,
    LowRankTrajectory,
    TangentVector,
    integrate_lowrank,
    lowrank_linear_flow,
    lowrank_step,
    projector_split_nonlinear_step,
    reconstruct,
    tangent_project,
    tangent_residual,
    truncate_svd,
)
from .matexp import ExpBackend, dense_expm, expm_action, krylov_expv, linear_flow, make_backend
from .problems import example1, example2, initial_field
from .reference import (
    ErrorReport,
    observed_rate,
    reference_solution,
    relerr,
    restrict,
    rk4_full_ode,
)

__version__ = "0.1.0"
