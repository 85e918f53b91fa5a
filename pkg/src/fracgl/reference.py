"""Oracles and error metrics.

The reference solutions used in convergence studies come from the full-rank
splitting itself at a much finer step (exact nonlinear subflow), cached on
disk.  ``rk4_full_ode`` is an unsplit brute-force integrator for small grids,
independent of every piece of the splitting machinery except the operators.
"""

from dataclasses import dataclass, field
import hashlib
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np

from ._validation import check_field, check_finite_step, check_positive_int
from .exceptions import CapabilityError, ShapeError
from .flows import SplitStepper, integrate_full, nonlinear_rhs
from .fracgrid import Grid, apply_operator, build_operator
from .problems import initial_field

RK4_DENSE_LIMIT = 256
CACHE_VERSION = 1


@dataclass
class ErrorReport:
    relerr: float
    rate: float | None = None
    config: dict = field(default_factory=dict)


def rk4_full_ode(u0, params, grid, m, operator="dense"):
    """Classical RK4 on ``U' = A_x U + U A_y + G(U)`` with ``m`` steps up to ``grid.t_final``."""
    m = check_positive_int(m, "m")
    u = check_field(u0, name="u0", shape=grid.shape)
    op_x = build_operator(params, grid, "x")
    op_y = build_operator(params, grid, "y")
    if operator == "dense":
        if max(op_x.size, op_y.size) > RK4_DENSE_LIMIT:
            raise CapabilityError(f"dense RK4 oracle limited to n <= {RK4_DENSE_LIMIT}")
        a_x, a_y = op_x.to_dense(), op_y.to_dense()

        def rhs(v):
            return a_x @ v + v @ a_y + nonlinear_rhs(v, params)
    elif operator == "fft":
        def rhs(v):
            return (
                apply_operator(op_x, v, "left")
                + apply_operator(op_y, v, "right")
                + nonlinear_rhs(v, params)
            )
    else:
        raise ValueError(f"operator must be 'dense' or 'fft', got {operator!r}")
    dt = grid.t_final / m
    for k in range(1, m + 1):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        check_finite_step(u, k)
    return u


def reference_key(params, n, m_ref):
    cfg = {
        "version": CACHE_VERSION,
        "scheme": "lie_trotter_exact",
        "params": params.to_dict(),
        "n": n,
        "m_ref": m_ref,
    }
    values = params.initial_condition.values
    if values is not None:
        cfg["initial_values_sha256"] = hashlib.sha256(
            np.ascontiguousarray(values, dtype="<c16").tobytes()
        ).hexdigest()
    blob = json.dumps(cfg, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest(), cfg


def _atomic_write(path, data):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_cache(bin_path, json_path, key, shape):
    try:
        meta = json.loads(json_path.read_text())
        raw = bin_path.read_bytes()
    except (OSError, ValueError):
        return None
    if meta.get("key") != key or meta.get("shape") != list(shape):
        return None
    if hashlib.sha256(raw).hexdigest() != meta.get("data_sha256"):
        return None
    if len(raw) != 16 * shape[0] * shape[1]:
        return None
    return np.frombuffer(raw, dtype="<c16").reshape(shape).astype(np.complex128)


def reference_solution(params, n, m_ref, cache_dir=None, backend="auto"):
    """Fine-step full-rank splitting solution at ``t_final`` on an ``n x n`` grid.

    With ``cache_dir`` the field is stored as ``<sha256>.bin`` (little-endian
    float64 re/im pairs) plus a ``<sha256>.json`` sidecar; a sidecar that does
    not match its data triggers recomputation.
    """
    grid = Grid.from_params(params, n, m_ref)
    key, cfg = reference_key(params, n, m_ref)
    if cache_dir is not None:
        cache = Path(cache_dir)
        cache.mkdir(parents=True, exist_ok=True)
        bin_path, json_path = cache / f"{key}.bin", cache / f"{key}.json"
        cached = _read_cache(bin_path, json_path, key, grid.shape)
        if cached is not None:
            return cached
    stepper = SplitStepper.build(params, grid, backend=backend)
    u = integrate_full(initial_field(params, grid), stepper, m_ref).final
    if cache_dir is not None:
        raw = np.ascontiguousarray(u, dtype="<c16").tobytes()
        meta = {
            "key": key,
            "config": cfg,
            "shape": list(grid.shape),
            "data_sha256": hashlib.sha256(raw).hexdigest(),
        }
        _atomic_write(bin_path, raw)
        _atomic_write(json_path, json.dumps(meta, sort_keys=True, indent=1).encode())
    return u


def restrict(u_fine, n_fine, n_coarse):
    """Sample a fine interior field at the nodes of a coarser nested grid."""
    if n_fine % n_coarse:
        raise ShapeError(f"grid with {n_coarse} intervals is not nested in {n_fine}")
    k = n_fine // n_coarse
    return u_fine[k - 1 :: k, k - 1 :: k]


def relerr(x_final, u_ref):
    """``||X - U||_F / ||U||_F``."""
    x_final = np.asarray(x_final)
    u_ref = np.asarray(u_ref)
    if x_final.shape != u_ref.shape:
        raise ShapeError(f"shapes differ: {x_final.shape} vs {u_ref.shape}")
    ref_norm = np.linalg.norm(u_ref)
    if ref_norm == 0:
        raise ZeroDivisionError("reference field has zero norm")
    return float(np.linalg.norm(x_final - u_ref) / ref_norm)


def observed_rate(errs, axis="tau"):
    """Pairwise orders ``log(e1/e2) / log(d1/d2)`` for ``[(d, e), ...]``.

    ``d`` is the step (``tau``) or mesh width (``h``) and must strictly
    decrease.  Pairs involving a zero or non-finite error give ``nan``.
    """
    if axis not in ("tau", "h"):
        raise ValueError(f"axis must be 'tau' or 'h', got {axis!r}")
    if len(errs) < 2:
        raise ValueError("need at least two refinement levels")
    steps = [float(d) for d, _ in errs]
    if any(b >= a for a, b in zip(steps, steps[1:])):
        raise ValueError(f"refinement must strictly decrease, got {steps}")
    rates = []
    for (d1, e1), (d2, e2) in zip(errs, errs[1:]):
        if e1 > 0 and e2 > 0 and math.isfinite(e1) and math.isfinite(e2):
            rates.append(math.log(e1 / e2) / math.log(d1 / d2))
        else:
            rates.append(math.nan)
    return rates
