"""Full-rank Lie-Trotter splitting: linear flow after nonlinear flow."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_field, check_finite_step, check_positive_int
from .exceptions import NumericalError
from .fracgrid import build_operator
from .matexp import linear_flow, make_backend

NONLINEAR_METHODS = ("exact", "rk4")


def nonlinear_rhs(u, params):
    """``G(U) = -(kappa + i xi) |U|^2 U + gamma U``, entrywise."""
    return -params.nonlinearity * (u.real**2 + u.imag**2) * u + params.gamma * u


def rk4(rhs, y, h, substeps=1):
    """``substeps`` classical Runge-Kutta steps of size ``h / substeps``."""
    dt = h / substeps
    for _ in range(substeps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _exact_nonlinear(u, tau, kappa, xi, gamma):
    # With rho = |u|^2 the modulus obeys a logistic law and the phase drifts by
    # -xi * int_0^tau rho.  w below is that integral for kappa = 0; for kappa > 0
    # it becomes log1p(2 kappa w) / (2 kappa) and rho is damped by 1 + 2 kappa w.
    rho0 = u.real**2 + u.imag**2
    z = 2.0 * gamma * tau
    growth = np.expm1(z) / z if z != 0.0 else 1.0
    w = rho0 * tau * growth
    if kappa > 0.0:
        denom = 1.0 + 2.0 * kappa * w
        if np.any(denom <= 0.0):
            raise NumericalError("logistic denominator became nonpositive")
        integral = np.log1p(2.0 * kappa * w) / (2.0 * kappa)
        amp = np.exp(gamma * tau) / np.sqrt(denom)
    else:
        integral = w
        amp = np.exp(gamma * tau)
    return u * amp * np.exp(-1j * xi * integral)


def nonlinear_flow(u, tau, params, method="exact", substeps=1):
    """Advance ``U' = G(U)`` by ``tau``.

    ``method="exact"`` uses the pointwise closed-form solution; ``"rk4"`` takes
    ``substeps`` classical Runge-Kutta steps.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    u = np.asarray(u, dtype=np.complex128)
    if method == "exact":
        return _exact_nonlinear(u, tau, params.kappa, params.xi, params.gamma)
    if method == "rk4":
        substeps = check_positive_int(substeps, "substeps")
        return rk4(lambda v: nonlinear_rhs(v, params), u, tau, substeps)
    raise ValueError(f"method must be one of {NONLINEAR_METHODS}, got {method!r}")


@dataclass(frozen=True, eq=False)
class SplitStepper:
    """Everything one Lie-Trotter step needs: both exponentials and ``G``."""

    ax: object
    ay: object
    params: object
    tau: float
    nonlinear: str = "exact"
    substeps: int = 1

    def __post_init__(self):
        if not (self.ax.tau == self.ay.tau == self.tau):
            raise ValueError("both exponential backends must use the stepper's tau")
        if self.nonlinear not in NONLINEAR_METHODS:
            raise ValueError(f"nonlinear must be one of {NONLINEAR_METHODS}")

    @classmethod
    def build(cls, params, grid, *, backend="auto", nonlinear="exact", substeps=1, **backend_kw):
        tau = grid.tau
        ax = make_backend(build_operator(params, grid, "x"), tau, backend, **backend_kw)
        ay = make_backend(build_operator(params, grid, "y"), tau, backend, **backend_kw)
        return cls(ax, ay, params, tau, nonlinear, substeps)

    @property
    def shape(self):
        return (self.ax.size, self.ay.size)


def lie_trotter_step(u, stepper):
    """One step of ``Phi^L_tau o Phi^G_tau``."""
    v = nonlinear_flow(u, stepper.tau, stepper.params, stepper.nonlinear, stepper.substeps)
    return linear_flow(v, stepper.ax, stepper.ay)


@dataclass
class Trajectory:
    final: np.ndarray
    snapshots: dict = field(default_factory=dict)
    tau: float = 0.0


def integrate_full(u0, stepper, m, snapshots=()):
    """Apply ``m`` Lie-Trotter steps; keep fields at the step indices in ``snapshots``."""
    m = check_positive_int(m, "m")
    u = check_field(u0, name="u0", shape=stepper.shape)
    keep = set(snapshots)
    saved = {0: u.copy()} if 0 in keep else {}
    for k in range(1, m + 1):
        u = lie_trotter_step(u, stepper)
        check_finite_step(u, k)
        if k in keep:
            saved[k] = u.copy()
    return Trajectory(u, saved, stepper.tau)
