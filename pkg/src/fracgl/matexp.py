"""Matrix exponentials of the fractional operators.

Two backends compute ``exp(tau * A) @ B`` for a Toeplitz operator ``A``:

* ``"dense"`` precomputes ``exp(tau * A)`` once by scaling and squaring
  (scipy's Pade implementation).  Used for moderate ``n`` and as an oracle.
* ``"krylov"`` runs one Arnoldi process per column of ``B``, using only the
  FFT matvec, and stops on an a posteriori error estimate.

Since ``A`` is complex symmetric, ``exp(tau*A)`` is symmetric too, and
``conj(exp(tau*A)) = exp(tau*conj(A))``; both facts are used to apply the
right-hand factor without building a second operator.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import CapabilityError, ConvergenceError, ShapeError

DENSE_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class ExpBackend:
    op: object
    tau: float
    kind: str
    matrix: np.ndarray | None = None
    m_max: int = 60
    tol: float = 1e-10

    @property
    def size(self):
        return self.op.size


def dense_expm(op, tau, dense_limit=DENSE_LIMIT):
    """Dense ``exp(tau * A)`` for an operator of size at most ``dense_limit``."""
    if op.size > dense_limit:
        raise CapabilityError(
            f"dense exponential refused for n={op.size} > dense_limit={dense_limit}"
        )
    return scipy.linalg.expm(tau * op.to_dense())


def make_backend(op, tau, kind="auto", *, dense_limit=DENSE_LIMIT, m_max=60, tol=1e-10):
    """Build an exponential backend for ``exp(tau * op)``.

    ``kind="auto"`` picks the dense backend when ``op.size <= dense_limit``.
    """
    if kind == "auto":
        kind = "dense" if op.size <= dense_limit else "krylov"
    if kind == "dense":
        return ExpBackend(op, tau, "dense", dense_expm(op, tau, dense_limit), m_max, tol)
    if kind == "krylov":
        return ExpBackend(op, tau, "krylov", None, m_max, tol)
    raise ValueError(f"unknown backend kind {kind!r}")


def krylov_expv(matvec, v, tau, m_max=60, tol=1e-10):
    """Approximate ``exp(tau * A) @ v`` in a Krylov space of dimension <= ``m_max``.

    The error estimate is ``|tau * h_{j+1,j} * e_j^T phi_1(tau H_j) e_1| * |v|``,
    read off the exponential of the Hessenberg matrix augmented by one row.
    Returns ``(w, estimate)``; raises ConvergenceError carrying the last
    estimate if ``m_max`` is reached first.
    """
    v = np.asarray(v, dtype=np.complex128)
    beta = np.linalg.norm(v)
    if beta == 0.0:
        return np.zeros_like(v), 0.0
    if tau == 0.0:
        return v.copy(), 0.0
    n = v.shape[0]
    m_max = min(m_max, n)
    basis = np.zeros((m_max + 1, n), dtype=np.complex128)
    hess = np.zeros((m_max + 2, m_max + 2), dtype=np.complex128)
    basis[0] = v / beta
    estimate = np.inf
    for j in range(m_max):
        w = matvec(basis[j])
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            coef = basis[: j + 1].conj() @ w
            w = w - coef @ basis[: j + 1]
            hess[: j + 1, j] += coef
        h_next = np.linalg.norm(w)
        small = tau * hess[: j + 1, : j + 1]
        if h_next <= 1e-14 * max(1.0, np.abs(hess[: j + 1, : j + 1]).max()):
            y = scipy.linalg.expm(small)[:, 0]
            return beta * (y @ basis[: j + 1]), 0.0
        hess[j + 1, j] = h_next
        aug = np.zeros((j + 2, j + 2), dtype=np.complex128)
        aug[: j + 1, : j + 1] = small
        aug[j + 1, j] = tau * h_next
        e = scipy.linalg.expm(aug)
        estimate = beta * abs(e[j + 1, 0])
        if estimate <= tol * beta:
            return beta * (e[: j + 1, 0] @ basis[: j + 1]), estimate
        if j + 1 < n:
            basis[j + 1] = w / h_next
    raise ConvergenceError(
        f"Krylov exponential not converged in {m_max} steps (estimate {estimate:.3e})",
        residual=estimate,
    )


def expm_action(backend, block, conj=False):
    """Columns of ``exp(tau*A) @ block`` (``exp(tau*conj(A))`` if ``conj``)."""
    block = np.asarray(block, dtype=np.complex128)
    if block.ndim == 1:
        return expm_action(backend, block[:, None], conj)[:, 0]
    if block.shape[0] != backend.size:
        raise ShapeError(
            f"block has {block.shape[0]} rows, operator has size {backend.size}"
        )
    if backend.kind == "dense":
        mat = backend.matrix.conj() if conj else backend.matrix
        return mat @ block
    op = backend.op
    out = np.empty_like(block)
    for k in range(block.shape[1]):
        col = block[:, k].conj() if conj else block[:, k]
        w, _ = krylov_expv(op.matvec, col, backend.tau, backend.m_max, backend.tol)
        out[:, k] = w.conj() if conj else w
    return out


def linear_flow(u, ax, ay):
    """Exact flow of ``U' = A_x U + U A_y`` over one step: ``e^{tA_x} U e^{tA_y}``."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (ax.size, ay.size):
        raise ShapeError(f"field shape {u.shape} != ({ax.size}, {ay.size})")
    left = expm_action(ax, u)
    # U e^{tA_y} = (e^{tA_y}^T U^T)^T and e^{tA_y} is symmetric
    return expm_action(ay, left.T).T
