"""Small input-validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import math

import numpy as np


def check_positive(value, name, allow_inf=False):
    value = float(value)
    if math.isnan(value) or value <= 0 or (math.isinf(value) and not allow_inf):
        raise ValueError(f"{name} must be strictly positive, got {value!r}")
    return value


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def check_in_range(value, name, lo, hi):
    value = check_finite(value, name)
    if not lo <= value <= hi:
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {value!r}")
    return value


def check_vector3(vec, name):
    arr = np.asarray(vec, dtype=np.float64)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 3-vector, got {vec!r}")
    return arr


def check_unit_vector(vec, name, tol=1e-6):
    arr = check_vector3(vec, name)
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector (|v| = {norm:.9g})")
    return arr


def check_grid(values, name="values", min_size=1):
    """Return ``values`` as a C-contiguous float64 2-D array.

    NaN marks nodata; infinities are rejected.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < min_size or arr.shape[1] < min_size:
        raise ValueError(f"{name} must be at least {min_size}x{min_size}, got {arr.shape}")
    if np.isinf(arr).any():
        raise ValueError(f"{name} contains infinite values")
    return arr


def check_poses(X):
    """Validate an ``(n, 6)`` array of ``x, y, z, roll, pitch, yaw`` rows."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 6:
        raise ValueError(f"poses must have shape (n, 6), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("poses must be finite")
    return arr
