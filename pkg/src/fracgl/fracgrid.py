"""Spatial discretization of the Riesz derivatives.

The fractional centered difference of order ``mu`` replaces the Riesz
derivative along one axis by a symmetric Toeplitz matrix.  On a grid with
``N`` intervals and homogeneous Dirichlet data only the ``N - 1`` interior
nodes are unknowns, so each axis contributes an ``(N-1) x (N-1)`` operator
whose first column is ``-(nu + i*eta) / h**mu * [g_0, ..., g_{N-2}]``.
"""

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.fft
import scipy.linalg

from ._validation import check_order, check_positive_int
from .exceptions import ParameterDomainError, ShapeError


@dataclass(frozen=True)
class InitialCondition:
    """Selector for the initial field.

    ``kind`` is one of ``"example1"``, ``"example2"``, ``"rank_r"`` (random
    field of exact rank ``rank`` drawn from ``seed``) or ``"custom"`` (``values``
    sampled on the interior grid).
    """

    kind: str = "example1"
    rank: int | None = None
    seed: int | None = None
    values: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("example1", "example2", "rank_r", "custom"):
            raise ValueError(f"unknown initial condition {self.kind!r}")
        if self.kind == "rank_r" and (self.rank is None or self.rank < 1):
            raise ValueError("rank_r initial condition needs rank >= 1")
        if self.kind == "custom" and self.values is None:
            raise ValueError("custom initial condition needs values")


@dataclass(frozen=True)
class FglParams:
    """Coefficients of the fractional complex Ginzburg-Landau equation.

    u_t = (nu + i eta)(D_x^alpha + D_y^beta) u - (kappa + i xi)|u|^2 u + gamma u
    on ``domain = (x_L, x_R, y_L, y_R)`` up to ``t_final``.

    ``alpha = 2`` or ``beta = 2`` is accepted so that the classical Laplacian
    can serve as a consistency check.
    """

    nu: float = 1.0
    eta: float = 1.0
    kappa: float = 1.0
    xi: float = 1.0
    gamma: float = 1.0
    alpha: float = 1.5
    beta: float = 1.5
    domain: tuple = (-10.0, 10.0, -10.0, 10.0)
    t_final: float = 1.0
    initial_condition: InitialCondition = field(default_factory=InitialCondition)

    def __post_init__(self):
        if not self.nu > 0:
            raise ParameterDomainError(f"nu must be positive, got {self.nu}")
        if self.kappa < 0:
            raise ParameterDomainError(f"kappa must be nonnegative, got {self.kappa}")
        check_order(self.alpha, "alpha", allow_two=True)
        check_order(self.beta, "beta", allow_two=True)
        if len(self.domain) != 4:
            raise ParameterDomainError("domain must be (x_L, x_R, y_L, y_R)")
        x_l, x_r, y_l, y_r = (float(v) for v in self.domain)
        if not (x_l < x_r and y_l < y_r):
            raise ParameterDomainError(f"empty domain {self.domain}")
        if not self.t_final > 0:
            raise ParameterDomainError(f"t_final must be positive, got {self.t_final}")
        object.__setattr__(self, "domain", (x_l, x_r, y_l, y_r))

    @property
    def diffusion(self):
        return complex(self.nu, self.eta)

    @property
    def nonlinearity(self):
        return complex(self.kappa, self.xi)

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self):
        ic = self.initial_condition
        return {
            "nu": self.nu,
            "eta": self.eta,
            "kappa": self.kappa,
            "xi": self.xi,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "beta": self.beta,
            "domain": list(self.domain),
            "t_final": self.t_final,
            "initial_condition": {"kind": ic.kind, "rank": ic.rank, "seed": ic.seed},
        }


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid; ``n_x``/``n_y`` count intervals, ``m`` time steps."""

    n_x: int
    n_y: int
    m: int
    domain: tuple
    t_final: float

    def __post_init__(self):
        check_positive_int(self.n_x, "n_x", 4)
        check_positive_int(self.n_y, "n_y", 4)
        check_positive_int(self.m, "m", 1)

    @classmethod
    def from_params(cls, params, n_x, m, n_y=None):
        return cls(n_x, n_x if n_y is None else n_y, m, params.domain, params.t_final)

    @property
    def h_x(self):
        return (self.domain[1] - self.domain[0]) / self.n_x

    @property
    def h_y(self):
        return (self.domain[3] - self.domain[2]) / self.n_y

    @property
    def tau(self):
        return self.t_final / self.m

    @property
    def shape(self):
        """Shape of the interior unknown matrix."""
        return (self.n_x - 1, self.n_y - 1)

    @property
    def x(self):
        return self.domain[0] + self.h_x * np.arange(1, self.n_x)

    @property
    def y(self):
        return self.domain[2] + self.h_y * np.arange(1, self.n_y)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def with_steps(self, m):
        return Grid(self.n_x, self.n_y, m, self.domain, self.t_final)


@dataclass(frozen=True)
class FracStencil:
    mu: float
    coeffs: np.ndarray

    def partial_sum(self, k=None):
        """``g_0 + 2 * sum_{1 <= j <= k} g_j`` (all stored terms by default)."""
        g = self.coeffs if k is None else self.coeffs[: k + 1]
        return g[0] + 2.0 * g[1:].sum()


def stencil_coeffs(mu, count):
    """Fractional centered difference weights ``g_0 .. g_count`` of order ``mu``.

    Uses the ratio ``g_{k+1} / g_k = (k - mu/2) / (k + 1 + mu/2)``, which stays
    finite where the Gamma-function form overflows (k around 170).
    """
    mu = check_order(mu, allow_two=True)
    count = check_positive_int(count, "count")
    k = np.arange(count, dtype=float)
    ratios = (k - mu / 2) / (k + 1 + mu / 2)
    g = np.empty(count + 1)
    g[0] = math.gamma(1 + mu) / math.gamma(mu / 2 + 1) ** 2
    g[1:] = g[0] * np.cumprod(ratios)
    g.setflags(write=False)
    return FracStencil(mu, g)


@dataclass(frozen=True, eq=False)
class FracOperator:
    """Complex symmetric Toeplitz discretization of one Riesz derivative.

    Application goes through an exact circulant embedding of length
    ``scipy.fft.next_fast_len(2n - 1)``.
    """

    axis: str
    size: int
    mu: float
    h: float
    scale: complex
    first_column: np.ndarray
    fft_symbol: np.ndarray

    @property
    def embed_length(self):
        return self.fft_symbol.shape[0]

    def to_dense(self):
        c = self.first_column
        return scipy.linalg.toeplitz(c, c)

    def norm_bound(self):
        """Upper bound on the spectral norm: ``|scale| * sum_k |g_k|`` over k in Z."""
        g = self.first_column / self.scale
        return abs(self.scale) * (abs(g[0]) + 2.0 * np.abs(g[1:]).sum())

    def matvec(self, v, conj=False):
        return apply_operator(self, np.asarray(v)[:, None], "left", conj=conj)[:, 0]


def _circulant_symbol(column):
    n = column.shape[0]
    length = scipy.fft.next_fast_len(2 * n - 1)
    embed = np.zeros(length, dtype=np.complex128)
    embed[:n] = column
    if n > 1:
        embed[length - n + 1 :] = column[:0:-1]
    return scipy.fft.fft(embed)


def build_operator(params, grid, axis):
    """Toeplitz operator ``A_x`` (``axis="x"``) or ``A_y`` (``axis="y"``)."""
    axis = axis.lower()
    if axis == "x":
        mu, h, n = params.alpha, grid.h_x, grid.n_x - 1
    elif axis == "y":
        mu, h, n = params.beta, grid.h_y, grid.n_y - 1
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    g = stencil_coeffs(mu, max(n - 1, 1)).coeffs[:n]
    scale = -params.diffusion / h**mu
    column = scale * g
    column.setflags(write=False)
    symbol = _circulant_symbol(column)
    symbol.setflags(write=False)
    return FracOperator(axis, n, mu, h, scale, column, symbol)


def apply_operator(op, u, side="left", conj=False):
    """Return ``A @ u`` (side ``"left"``) or ``u @ A`` (side ``"right"``).

    ``conj=True`` applies ``conj(A)`` instead, which is again symmetric Toeplitz.
    """
    u = np.asarray(u)
    if u.ndim != 2:
        raise ShapeError(f"field must be 2-D, got ndim={u.ndim}")
    if side == "left":
        ax = 0
    elif side == "right":
        ax = 1
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if u.shape[ax] != op.size:
        raise ShapeError(
            f"operator of size {op.size} cannot act on {side} of shape {u.shape}"
        )
    if conj:
        return np.conj(apply_operator(op, np.conj(u), side))
    length = op.embed_length
    shape = [1, 1]
    shape[ax] = length
    spec = scipy.fft.fft(u, n=length, axis=ax) * op.fft_symbol.reshape(shape)
    out = scipy.fft.ifft(spec, axis=ax)
    return out[: op.size] if ax == 0 else out[:, : op.size]
