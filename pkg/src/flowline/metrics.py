"""Image quality metrics and diagnostic visualizations for line drawings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .raster import load_image, to_grayscale
from .validation import as_binary, as_gray

__all__ = [
    "MetricReport",
    "ssim",
    "psnr",
    "fft2d",
    "fft_distance",
    "spectrum_image",
    "diff_map",
    "evaluate_batch",
]

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass
class MetricReport:
    ssim: float
    psnr: float
    fft_distance: float


def _ssim_window() -> np.ndarray:
    half = _SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA**2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(a, b) -> float:
    """Structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Unit dynamic range, K1 = 0.01, K2 = 0.03; the mean is taken over
    valid window positions only (no padding).
    """
    x = as_gray(a, "first image")
    y = as_gray(b, "second image")
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < _SSIM_WINDOW:
        raise ValueError(
            f"image {x.shape} is smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} window"
        )
    w = _ssim_window()
    c1 = (_SSIM_K1 * 1.0) ** 2
    c2 = (_SSIM_K2 * 1.0) ** 2

    mu_x = fftconvolve(x, w, mode="valid")
    mu_y = fftconvolve(y, w, mode="valid")
    xx = fftconvolve(x * x, w, mode="valid") - mu_x * mu_x
    yy = fftconvolve(y * y, w, mode="valid") - mu_y * mu_y
    xy = fftconvolve(x * y, w, mode="valid") - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def psnr(a, b) -> float:
    """Peak signal to noise ratio in dB over unit range; +inf for equal inputs."""
    x = as_gray(a, "first image")
    y = as_gray(b, "second image")
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def fft2d(x) -> np.ndarray:
    """Unnormalized 2d DFT of a single channel image."""
    return np.fft.fft2(as_gray(x))


def fft_distance(a, b) -> float:
    """Mean absolute spectrum difference.

    Sum of |d real| + |d imag| over all frequencies, divided by the
    pixel count. Adding a constant k to an image moves only the DC
    term, giving a distance of exactly |k|.
    """
    fa = fft2d(a)
    fb = fft2d(b)
    if fa.shape != fb.shape:
        raise ValueError(f"shape mismatch: {fa.shape} vs {fb.shape}")
    d = fa - fb
    h, w = fa.shape
    return float((np.abs(d.real) + np.abs(d.imag)).sum() / (h * w))


def spectrum_image(x) -> np.ndarray:
    """log(1 + |X|) magnitude spectrum, center shifted, max normalized."""
    mag = np.log1p(np.abs(np.fft.fftshift(fft2d(x))))
    peak = mag.max()
    return mag / peak if peak > 0.0 else mag


def diff_map(gt, pred) -> np.ndarray:
    """RGB overlay of two binary drawings.

    Red marks ink present in the reference but missing from the
    prediction, blue marks predicted ink absent from the reference,
    white everything else.
    """
    g = as_binary(gt, "reference drawing")
    p = as_binary(pred, "predicted drawing")
    if g.shape != p.shape:
        raise ValueError(f"shape mismatch: {g.shape} vs {p.shape}")
    out = np.ones(g.shape + (3,), dtype=np.float64)
    missing = (g == 0.0) & (p == 1.0)
    spurious = (p == 0.0) & (g == 1.0)
    out[missing] = (1.0, 0.0, 0.0)
    out[spurious] = (0.0, 0.0, 1.0)
    return out


def evaluate_batch(pred_dir, gt_dir):
    """Score same-named drawings in two directories.

    Returns ``(pairs, aggregate)`` where pairs is a list of
    ``(filename, MetricReport)`` in name order and aggregate holds the
    mean of every metric. Unmatched filenames on either side are an
    error.
    """
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    exts = {".png", ".jpg", ".jpeg"}
    pred_names = {p.name for p in pred_dir.iterdir() if p.suffix.lower() in exts}
    gt_names = {p.name for p in gt_dir.iterdir() if p.suffix.lower() in exts}
    if pred_names != gt_names:
        odd = sorted(pred_names.symmetric_difference(gt_names))
        raise ValueError(f"unmatched filenames between directories: {odd}")
    if not pred_names:
        raise ValueError("no images to evaluate")

    pairs = []
    for name in sorted(pred_names):
        p = to_grayscale(load_image(pred_dir / name))
        g = to_grayscale(load_image(gt_dir / name))
        if p.shape != g.shape:
            raise ValueError(f"{name}: size mismatch {p.shape} vs {g.shape}")
        pairs.append((name, MetricReport(ssim(g, p), psnr(g, p), fft_distance(g, p))))

    aggregate = MetricReport(
        ssim=float(np.mean([r.ssim for _, r in pairs])),
        psnr=float(np.mean([r.psnr for _, r in pairs])),
        fft_distance=float(np.mean([r.fft_distance for _, r in pairs])),
    )
    return pairs, aggregate
