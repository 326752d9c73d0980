"""Input validation helpers shared across the toolkit."""
from __future__ import annotations

import numpy as np

__all__ = [
    "as_image",
    "as_gray",
    "as_binary",
    "as_control_matrix",
    "check_alpha",
    "check_field_matches",
]


def as_image(x, name: str = "image") -> np.ndarray:
    """Coerce to float64 and require an (H, W) or (H, W, 3) buffer in [0, 1]."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise ValueError(f"{name} must be (H, W) or (H, W, 3), got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values outside [0, 1]")
    return arr


def as_gray(x, name: str = "image") -> np.ndarray:
    arr = as_image(x, name)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be single channel, got shape {arr.shape}")
    return arr


def as_binary(x, name: str = "drawing") -> np.ndarray:
    """Require a single channel buffer whose values are exactly 0 or 1."""
    arr = as_gray(x, name)
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError(f"{name} is not binary (values other than 0 and 1 present)")
    return arr


def as_control_matrix(x, shape, name: str = "control matrix") -> np.ndarray:
    arr = as_gray(x, name)
    if arr.shape != tuple(shape):
        raise ValueError(f"{name} shape {arr.shape} does not match image {tuple(shape)}")
    return arr


def check_alpha(alpha, name: str = "alpha") -> float:
    a = float(alpha)
    if not np.isfinite(a) or a < 0.0 or a > 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {alpha!r}")
    return a


def check_field_matches(field, shape, name: str = "field") -> None:
    if (field.height, field.width) != tuple(shape):
        raise ValueError(
            f"{name} is {field.width}x{field.height}, image is "
            f"{shape[1]}x{shape[0]}"
        )
