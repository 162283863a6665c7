"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .exceptions import BellscopeError, ShapeError

MAX_DIM = 64


def check_matrix(M, *, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a read-only square complex128 array.

    Raises
    ------
    ShapeError
        If ``M`` is not a non-empty square 2-D array.
    BellscopeError
        If any entry is NaN or infinite.
    """
    arr = np.array(M, dtype=np.complex128, copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ShapeError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BellscopeError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def check_same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise ShapeError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def check_unit_vector(psi, dim: int, *, tol: float = 1e-12) -> np.ndarray:
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if vec.shape[0] != dim:
        raise ShapeError(f"state has dimension {vec.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise BellscopeError("state contains non-finite amplitudes")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > tol:
        raise BellscopeError(f"state is not normalized: |psi| = {norm!r}")
    return vec


def check_probabilities(probs: Sequence[float], *, max_len: int | None = None) -> np.ndarray:
    """Validate a non-empty vector of probabilities in [0, 1]."""
    arr = np.asarray(probs, dtype=float).reshape(-1)
    if arr.size == 0:
        raise BellscopeError("at least one probability is required")
    if not np.all(np.isfinite(arr)):
        raise BellscopeError("probabilities must be finite")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise BellscopeError(f"probabilities must lie in [0, 1], got {arr.tolist()}")
    if max_len is not None and arr.size > max_len:
        raise BellscopeError(f"at most {max_len} events supported, got {arr.size}")
    return arr


def check_angle(value: float, *, name: str = "angle") -> float:
    value = float(value)
    if not math.isfinite(value):
        raise BellscopeError(f"{name} must be finite, got {value!r}")
    return value


def check_budget(budget: int, *, minimum: int = 64) -> int:
    if int(budget) != budget or budget < minimum:
        raise BellscopeError(f"budget must be an integer >= {minimum}, got {budget!r}")
    return int(budget)


def check_angle_array(X) -> np.ndarray:
    """Validate an ``(n_samples, 4)`` array of setting quadruples."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ShapeError(f"expected an array of shape (n_samples, 4), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BellscopeError("angles must be finite")
    return arr
