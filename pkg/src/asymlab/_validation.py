"""Input coercion and tolerance helpers shared by all modules."""
import math

import numpy as np

from .errors import DimensionMismatch, InvalidInstance

TOL = 1e-9


def scaled_tol(*magnitudes, tol=TOL):
    """Absolute tolerance ``tol * max(1, |m| for m in magnitudes)``.

    Infinite magnitudes are ignored.
    """
    scale = 1.0
    for m in magnitudes:
        a = np.abs(np.asarray(m, dtype=float))
        a = a[np.isfinite(a)]
        if a.size:
            scale = max(scale, float(a.max()))
    return tol * scale


def as_vector(x, dim=None, name="x"):
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise InvalidInstance(f"{name} has non-finite entries")
    return v


def as_points(X, dim, name="points"):
    """Coerce ``X`` to an ``(N, dim)`` float array.

    For ``dim == 1`` a flat list of scalars is accepted.
    """
    A = np.asarray(X, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    elif A.ndim == 1:
        A = A.reshape(-1, 1) if dim == 1 else A.reshape(1, -1)
    if A.ndim != 2 or A.shape[1] != dim:
        raise DimensionMismatch(f"{name} must have shape (N, {dim}), got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInstance(f"{name} has non-finite entries")
    return A


def as_matrix(M, name="matrix"):
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or 0 in A.shape:
        raise InvalidInstance(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInstance(f"{name} has non-finite entries")
    return A


def check_exact_keys(obj, required, optional=(), what="object"):
    if not isinstance(obj, dict):
        raise InvalidInstance(f"{what} must be a JSON object")
    keys = set(obj)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise InvalidInstance(f"{what} is missing fields {sorted(missing)}")
    if extra:
        raise InvalidInstance(f"{what} has unexpected fields {sorted(extra)}")


# extended nonnegative reals are plain floats with math.inf as +infinity

def ext_add(a, b):
    return math.inf if (a == math.inf or b == math.inf) else a + b


def ext_scale(alpha, a):
    """``alpha * a`` with the convention ``0 * inf = 0``."""
    if alpha < 0:
        raise ValueError("extended scaling needs alpha >= 0")
    if alpha == 0:
        return 0.0
    return alpha * a
