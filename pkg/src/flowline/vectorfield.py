"""Unit tangent fields and their binary file format.

A :class:`FlowField` stores per pixel tangents of length 1 (or exactly
0 where no direction is defined) plus a gradient magnitude plane
normalized to [0, 1]. Tangents are sign ambiguous: t and -t describe
the same edge, so comparisons go through ``|t1 . t2|``.

File layout (little endian): float32 magic 202021.25, int32 width,
int32 height, then row major float32 ``(tx, ty)`` pairs. The magnitude
plane is stored next to the field in ``<path>.mag`` with the same
header and one float32 per pixel. ``read_flo(write_flo(x))`` round
trips bit exactly.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = ["FLO_MAGIC", "FlowField", "flo_bytes", "write_flo", "read_flo", "magnitude_path"]

FLO_MAGIC = 202021.25
_HEADER = struct.Struct("<fii")


@dataclass
class FlowField:
    """Per pixel unit-or-zero tangents ``(H, W, 2)`` and magnitudes ``(H, W)``."""

    tangents: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tangents, dtype=np.float64)
        m = np.asarray(self.magnitude, dtype=np.float64)
        if t.ndim != 3 or t.shape[2] != 2:
            raise ValueError(f"tangents must be (H, W, 2), got {t.shape}")
        if m.shape != t.shape[:2]:
            raise ValueError(
                f"magnitude shape {m.shape} does not match tangents {t.shape[:2]}"
            )
        self.tangents = t
        self.magnitude = m

    @property
    def height(self) -> int:
        return self.tangents.shape[0]

    @property
    def width(self) -> int:
        return self.tangents.shape[1]

    def norms(self) -> np.ndarray:
        return np.hypot(self.tangents[..., 0], self.tangents[..., 1])

    def validate(self, tol: float = 1e-4) -> None:
        """Raise ValueError if tangents are not unit-or-zero or magnitudes leave [0, 1]."""
        n = self.norms()
        bad = (n != 0.0) & (np.abs(n - 1.0) > tol)
        if bad.any():
            raise ValueError(f"{int(bad.sum())} tangents are neither unit nor zero")
        if self.magnitude.min() < 0.0 or self.magnitude.max() > 1.0 + tol:
            raise ValueError("magnitude values outside [0, 1]")


def magnitude_path(path) -> str:
    """Sibling file holding the magnitude plane."""
    return str(path) + ".mag"


def flo_bytes(field: FlowField) -> bytes:
    """Serialized tangent plane, exactly the content of a tangent file."""
    header = _HEADER.pack(FLO_MAGIC, field.width, field.height)
    return header + field.tangents.astype("<f4").tobytes()


def write_flo(field: FlowField, path) -> None:
    """Write tangents to ``path`` and magnitudes to ``path + '.mag'``."""
    header = _HEADER.pack(FLO_MAGIC, field.width, field.height)
    with open(path, "wb") as fh:
        fh.write(flo_bytes(field))
    with open(magnitude_path(path), "wb") as fh:
        fh.write(header)
        fh.write(field.magnitude.astype("<f4").tobytes())


def read_flo(path) -> FlowField:
    """Read a tangent file and its magnitude sibling."""
    w, h, payload = _read_plane(path, values_per_pixel=2)
    tangents = payload.reshape(h, w, 2)
    mw, mh, mag = _read_plane(magnitude_path(path), values_per_pixel=1)
    if (mw, mh) != (w, h):
        raise ValueError(
            f"magnitude file {magnitude_path(path)} is {mw}x{mh}, field is {w}x{h}"
        )
    return FlowField(tangents, mag.reshape(h, w))


def _read_plane(path, values_per_pixel: int):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, w, h = _HEADER.unpack_from(raw)
    if magic != FLO_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if w <= 0 or h <= 0:
        raise ValueError(f"{path}: bad dimensions {w}x{h}")
    body = raw[_HEADER.size:]
    expected = 4 * values_per_pixel * w * h
    if len(body) != expected:
        raise ValueError(
            f"{path}: size mismatch, header implies {expected} payload bytes, "
            f"found {len(body)}"
        )
    data = np.frombuffer(body, dtype="<f4").astype(np.float64)
    return w, h, data
