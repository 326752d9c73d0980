"""Raster image buffers and PNG/JPEG I/O.

An image buffer is a numpy float array with values in [0, 1]: ``(H, W)``
for single channel data or ``(H, W, 3)`` for RGB. Line drawings are
single channel buffers whose values are exactly 0 (ink) or 1 (paper).
"""
from __future__ import annotations

import io

import numpy as np
from PIL import Image

__all__ = [
    "load_image",
    "save_image",
    "encode_png",
    "to_grayscale",
    "resize",
]

# BT.601 luma weights, shared with the network grayscale head.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_MODE_CHANNELS = {"L": 1, "RGB": 3}


def load_image(path) -> np.ndarray:
    """Decode a PNG or JPEG file into a float64 buffer in [0, 1].

    Only 1 channel (L) and 3 channel (RGB) files are accepted; anything
    else (palette, alpha, 16 bit) raises ValueError.
    """
    try:
        with Image.open(path) as im:
            if im.mode not in _MODE_CHANNELS:
                raise ValueError(
                    f"unsupported channel count (mode {im.mode!r}) in {path}: "
                    "expected a 1 or 3 channel image"
                )
            arr = np.asarray(im, dtype=np.float64)
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise ValueError(f"cannot decode image {path}: {exc}") from exc
    return arr / 255.0


def encode_png(img: np.ndarray) -> bytes:
    """Encode a buffer to PNG bytes, rounding samples to 8 bit.

    Single encoder for every output path in the toolkit, so identical
    arrays always produce identical bytes.
    """
    arr = _check_saveable(img)
    data = np.rint(arr * 255.0).astype(np.uint8)
    pil = Image.fromarray(data, mode="L" if data.ndim == 2 else "RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def save_image(img: np.ndarray, path) -> None:
    """Write a buffer to ``path`` as PNG (parent directory must exist)."""
    payload = encode_png(img)
    with open(path, "wb") as fh:
        fh.write(payload)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Collapse RGB to single channel with BT.601 weights.

    Single channel input is returned unchanged, so the operation is
    idempotent.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr @ np.asarray(LUMA_WEIGHTS, dtype=np.float64)
    raise ValueError(f"expected (H, W) or (H, W, 3) buffer, got shape {arr.shape}")


def resize(img: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bilinear resample with edge aligned sampling (corners map to corners).

    A 2x1 row [0, 1] resized to 3x1 gives [0, 0.5, 1]. Resizing to the
    identical size returns a copy with identical samples.
    """
    if width < 1 or height < 1:
        raise ValueError(f"target size must be positive, got {width}x{height}")
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected 2d or 3d buffer, got shape {arr.shape}")
    h, w = arr.shape[:2]
    if (width, height) == (w, h):
        return arr.copy()

    rows = np.linspace(0.0, h - 1.0, height) if height > 1 else np.array([(h - 1) / 2.0])
    cols = np.linspace(0.0, w - 1.0, width) if width > 1 else np.array([(w - 1) / 2.0])

    r0 = np.floor(rows).astype(np.intp)
    c0 = np.floor(cols).astype(np.intp)
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = (rows - r0)[:, None]
    fc = (cols - c0)[None, :]
    if arr.ndim == 3:
        fr = fr[..., None]
        fc = fc[..., None]

    v00 = arr[np.ix_(r0, c0)]
    v01 = arr[np.ix_(r0, c1)]
    v10 = arr[np.ix_(r1, c0)]
    v11 = arr[np.ix_(r1, c1)]
    top = v00 + fc * (v01 - v00)
    bot = v10 + fc * (v11 - v10)
    return top + fr * (bot - top)


def _check_saveable(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
        raise ValueError(f"expected (H, W) or (H, W, 3) buffer, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image values outside [0, 1]")
    return arr
