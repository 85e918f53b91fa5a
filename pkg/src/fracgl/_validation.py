"""Input validation helpers shared by the public functions and estimators."""

import numbers

import numpy as np

from .exceptions import NumericalError, ParameterDomainError, ShapeError


def check_field(u, *, name="field", shape=None, allow_nan=False):
    """Return ``u`` as a 2-D complex128 array, validating shape and finiteness.

    sklearn's ``check_array`` rejects complex input, so fields go through here.
    """
    arr = np.asarray(u)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.dtype.kind not in "biufc":
        raise ShapeError(f"{name} must be numeric, got dtype {arr.dtype}")
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    if shape is not None and arr.shape != tuple(shape):
        raise ShapeError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    if not allow_nan and not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains NaN or Inf")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_order(mu, name="mu", *, allow_two=False):
    mu = float(mu)
    upper_ok = mu <= 2.0 if allow_two else mu < 2.0
    if not (mu > 1.0 and upper_ok):
        bound = "(1, 2]" if allow_two else "(1, 2)"
        raise ParameterDomainError(f"{name}={mu} outside {bound}")
    return mu


def check_finite_step(u, step):
    if not np.all(np.isfinite(u)):
        raise NumericalError(f"non-finite values after step {step}", step=step)
