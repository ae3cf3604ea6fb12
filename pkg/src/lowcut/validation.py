"""Input validation helpers shared by the estimators and density models."""

from __future__ import annotations

import numpy as np

UNIT_NORM_TOL = 1e-9


def as_sample_1d(x, unit_interval: bool = True) -> np.ndarray:
    """Coerce to a 1-d float array of finite values, optionally in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sample, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    if unit_interval and arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("sample points must lie in [0, 1]")
    return arr


def as_points(X, d: int | None = None) -> np.ndarray:
    """Coerce to a finite (m, d) float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d point array, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("points contain non-finite values")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"expected points in R^{d}, got d={arr.shape[1]}")
    return arr


def as_unit_vector(w, tol: float = UNIT_NORM_TOL) -> np.ndarray:
    """Coerce to a 1-d float array and require unit Euclidean norm."""
    arr = np.asarray(w, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("direction contains non-finite values")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction must be unit-norm (got ||w|| = {norm!r})")
    return arr


def check_probability(u: float, name: str = "u") -> float:
    u = float(u)
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {u!r}")
    return u


def check_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if not value >= 0.0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value
