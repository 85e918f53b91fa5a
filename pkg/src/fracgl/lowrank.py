"""Rank-r Lie-Trotter splitting with the projector-splitting integrator.

A rank-r matrix is kept as ``X = S @ Sigma @ V^H`` with orthonormal ``S``
(n_x x r) and ``V`` (n_y x r) and a nonsingular, generally non-diagonal
``Sigma``.  The linear flow acts on ``S`` and ``V`` directly, which keeps the
rank fixed.  The nonlinear flow projected onto the tangent space is split
into its three terms ``S S^H G``, ``-S S^H G V V^H`` and ``G V V^H``, each of
which moves only one factor:

* L-step: ``S`` fixed, ``L = V Sigma^H`` obeys ``L' = G(S L^H)^H S``
* S-step: ``S, V`` fixed, ``Sigma' = -S^H G(S Sigma V^H) V``
* K-step: ``V`` fixed, ``K = S Sigma`` obeys ``K' = G(K V^H) V``

The default order is L, S, K (range term first); ``substep_order="KSL"``
runs the mirrored sequence.  Each substep is integrated with classical RK4.
"""

import csv
from dataclasses import dataclass, field
import warnings

import numpy as np

from ._validation import check_field, check_positive_int
from .exceptions import DegeneracyWarning, NumericalError, ShapeError
from .flows import nonlinear_rhs, rk4
from .matexp import expm_action

PANEL_ROWS = 256
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class LowRankState:
    s: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = self.sigma.shape[0]
        if self.sigma.shape != (r, r) or self.s.shape[1] != r or self.v.shape[1] != r:
            raise ShapeError(
                f"inconsistent factor shapes {self.s.shape}, {self.sigma.shape}, {self.v.shape}"
            )

    @property
    def rank(self):
        return self.sigma.shape[0]

    @property
    def shape(self):
        return (self.s.shape[0], self.v.shape[0])

    def singular_values(self):
        return np.linalg.svd(self.sigma, compute_uv=False)

    def cond(self):
        sv = self.singular_values()
        return sv[0] / sv[-1] if sv[-1] > 0 else np.inf

    def orthonormality_error(self):
        eye = np.eye(self.rank)
        return (
            np.linalg.norm(self.s.conj().T @ self.s - eye),
            np.linalg.norm(self.v.conj().T @ self.v - eye),
        )


def reconstruct(x):
    return (x.s @ x.sigma) @ x.v.conj().T


def _qr(a):
    # diag(R) real and nonnegative so the factors are reproducible
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return q * phase, phase.conj()[:, None] * r


def truncate_svd(u, r):
    """Best rank-``r`` approximation of ``u``.

    Returns ``(state, err)`` with ``err = ||u - X||_F``, the root-sum-square of
    the discarded singular values.
    """
    u = check_field(u, name="u")
    r = check_positive_int(r, "r")
    if r > min(u.shape):
        raise ValueError(f"rank {r} exceeds min dimension {min(u.shape)}")
    left, sv, right_h = np.linalg.svd(u, full_matrices=False)
    err = float(np.sqrt(np.sum(sv[r:] ** 2)))
    state = LowRankState(
        left[:, :r].copy(), np.diag(sv[:r]).astype(np.complex128), right_h[:r].conj().T.copy()
    )
    return state, err


def _warn_if_degenerate(sigma, limit=COND_LIMIT, stacklevel=3):
    sv = np.linalg.svd(sigma, compute_uv=False)
    if sv[-1] <= sv[0] / limit:
        warnings.warn(
            f"coefficient matrix nearly singular (smallest singular value {sv[-1]:.3e})",
            DegeneracyWarning,
            stacklevel=stacklevel,
        )


def _g_products(left, right, params, *, times=None, adjoint=None, panel=PANEL_ROWS):
    """For ``X = left @ right^H`` return ``G(X) @ times`` and/or ``adjoint^H @ G(X)``.

    ``G(X)`` only ever exists one panel of rows at a time.
    """
    n = left.shape[0]
    right_h = right.conj().T
    out_t = None if times is None else np.empty((n, times.shape[1]), dtype=np.complex128)
    out_a = None if adjoint is None else np.zeros((adjoint.shape[1], right.shape[0]), dtype=np.complex128)
    for start in range(0, n, panel):
        rows = slice(start, start + panel)
        g = nonlinear_rhs(left[rows] @ right_h, params)
        if out_t is not None:
            out_t[rows] = g @ times
        if out_a is not None:
            out_a += adjoint[rows].conj().T @ g
    return out_t, out_a


@dataclass(frozen=True, eq=False)
class TangentVector:
    """``S S^H W - S S^H W V V^H + W V V^H`` kept as its factors."""

    s: np.ndarray
    v: np.ndarray
    sw: np.ndarray
    wv: np.ndarray
    swv: np.ndarray

    def to_dense(self):
        vh = self.v.conj().T
        return self.s @ self.sw - (self.s @ self.swv) @ vh + self.wv @ vh


def tangent_project(x, w):
    """Orthogonal projection of ``w`` onto the tangent space at ``x``."""
    w = check_field(w, name="w", shape=x.shape)
    sw = x.s.conj().T @ w
    wv = w @ x.v
    return TangentVector(x.s, x.v, sw, wv, sw @ x.v)


def tangent_residual(x, params, panel=PANEL_ROWS):
    """``||G(X) - P(X) G(X)||_F``: the part of the nonlinearity the manifold misses."""
    s, v = x.s, x.v
    left = s @ x.sigma
    _, sg = _g_products(left, v, params, adjoint=s, panel=panel)
    # S^H G (I - V V^H)
    sg_perp = sg - (sg @ v) @ v.conj().T
    total = 0.0
    n = s.shape[0]
    vh = v.conj().T
    for start in range(0, n, panel):
        rows = slice(start, start + panel)
        g = nonlinear_rhs(left[rows] @ vh, params)
        block = g - (g @ v) @ vh - s[rows] @ sg_perp
        total += np.vdot(block, block).real
    return float(np.sqrt(total))


def lowrank_linear_flow(x, ax, ay, warn=True):
    """Exact linear flow on the factors, re-orthonormalized by QR."""
    if x.shape != (ax.size, ay.size):
        raise ShapeError(f"state shape {x.shape} != ({ax.size}, {ay.size})")
    q_s, r_s = _qr(expm_action(ax, x.s))
    # X e^{tA_y} = S Sigma (conj(e^{tA_y}) V)^H because e^{tA_y} is symmetric
    q_v, r_v = _qr(expm_action(ay, x.v, conj=True))
    sigma = r_s @ x.sigma @ r_v.conj().T
    if warn:
        _warn_if_degenerate(sigma, limit=1.0 / np.finfo(float).eps)
    return LowRankState(q_s, sigma, q_v)


def _l_step(s, sigma, v, params, tau, substeps, panel):
    def rhs(lf):
        return _g_products(s, lf, params, adjoint=s, panel=panel)[1].conj().T

    lf = rk4(rhs, v @ sigma.conj().T, tau, substeps)
    v1, r = _qr(lf)
    return v1, r.conj().T


def _s_step(s, sigma, v, params, tau, substeps, panel):
    def rhs(sig):
        gv, _ = _g_products(s @ sig, v, params, times=v, panel=panel)
        return -(s.conj().T @ gv)

    return rk4(rhs, sigma, tau, substeps)


def _k_step(s, sigma, v, params, tau, substeps, panel):
    def rhs(k):
        return _g_products(k, v, params, times=v, panel=panel)[0]

    return _qr(rk4(rhs, s @ sigma, tau, substeps))


def projector_split_nonlinear_step(
    x, tau, params, rk4_substeps=1, substep_order="LSK", panel=PANEL_ROWS, warn=True
):
    """Advance ``X' = P(X) G(X)`` by ``tau`` with one projector-splitting sweep."""
    rk4_substeps = check_positive_int(rk4_substeps, "rk4_substeps")
    s, sigma, v = x.s, x.sigma, x.v
    if substep_order == "LSK":
        v, sigma = _l_step(s, sigma, v, params, tau, rk4_substeps, panel)
        sigma = _s_step(s, sigma, v, params, tau, rk4_substeps, panel)
        s, sigma = _k_step(s, sigma, v, params, tau, rk4_substeps, panel)
    elif substep_order == "KSL":
        s, sigma = _k_step(s, sigma, v, params, tau, rk4_substeps, panel)
        sigma = _s_step(s, sigma, v, params, tau, rk4_substeps, panel)
        v, sigma = _l_step(s, sigma, v, params, tau, rk4_substeps, panel)
    else:
        raise ValueError(f"substep_order must be 'LSK' or 'KSL', got {substep_order!r}")
    if not np.all(np.isfinite(sigma)):
        raise NumericalError("non-finite coefficient matrix in projector splitting")
    if warn:
        _warn_if_degenerate(sigma)
    return LowRankState(s, sigma, v)


def lowrank_step(x, stepper, substep_order="LSK", panel=PANEL_ROWS, warn=True):
    """One low-rank Lie-Trotter step: projected nonlinear flow, then linear flow.

    RK4 substep count is taken from ``stepper.substeps``.
    """
    y = projector_split_nonlinear_step(
        x, stepper.tau, stepper.params, stepper.substeps, substep_order, panel, warn
    )
    return lowrank_linear_flow(y, stepper.ax, stepper.ay, warn)


@dataclass
class StepDiagnostics:
    step: int
    t: float
    singular_values: np.ndarray
    tangent_residual: float
    cond: float


@dataclass
class LowRankTrajectory:
    final: LowRankState
    diagnostics: list = field(default_factory=list)
    tau: float = 0.0


def integrate_lowrank(
    x0, stepper, m, *, diagnostics=True, track_residual=True, substep_order="LSK",
    panel=PANEL_ROWS,
):
    """``m`` low-rank Lie-Trotter steps from ``x0``, with optional per-step diagnostics."""
    m = check_positive_int(m, "m")
    if x0.shape != stepper.shape:
        raise ShapeError(f"state shape {x0.shape} != stepper shape {stepper.shape}")
    x = x0
    rows = []
    degenerate = 0
    worst = np.inf
    for k in range(1, m + 1):
        # degenerate Sigma is expected when the rank over-approximates; one
        # summary warning is issued instead of one per step
        x = lowrank_step(x, stepper, substep_order, panel, warn=False)
        if not (np.all(np.isfinite(x.s)) and np.all(np.isfinite(x.v))):
            raise NumericalError(f"non-finite factors after step {k}", step=k)
        sv = x.singular_values()
        cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
        if cond > COND_LIMIT:
            degenerate += 1
            worst = min(worst, sv[-1])
        if diagnostics:
            res = tangent_residual(x, stepper.params, panel) if track_residual else np.nan
            rows.append(StepDiagnostics(k, k * stepper.tau, sv, res, cond))
    if degenerate:
        warnings.warn(
            f"coefficient matrix nearly singular in {degenerate} of {m} steps "
            f"(smallest singular value {worst:.3e})",
            DegeneracyWarning,
            stacklevel=2,
        )
    return LowRankTrajectory(x, rows, stepper.tau)


def write_diagnostics_csv(diagnostics, path, fmt="{:.4E}"):
    """One row per step: step, t, sigma_1..sigma_r, tangent_residual, cond."""
    rank = len(diagnostics[0].singular_values) if diagnostics else 0
    header = ["step", "t"] + [f"sigma_{i + 1}" for i in range(rank)]
    header += ["tangent_residual", "cond"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for d in diagnostics:
            writer.writerow(
                [d.step, fmt.format(d.t)]
                + [fmt.format(s) for s in d.singular_values]
                + [fmt.format(d.tangent_residual), fmt.format(d.cond)]
            )
