"""Controllable line drawing generation toolkit.

Classical pipeline (edge tangent flow plus flow guided DoG rendering
with scalar or per pixel detail control), evaluation metrics, a dataset
builder, desk scale GAN training components, a CLI and an HTTP service.

The ``neural`` subpackage imports torch and is loaded lazily; importing
:mod:`flowline` itself stays light.
"""
__version__ = "0.1.0"

from .raster import load_image, save_image, encode_png, to_grayscale, resize
from .vectorfield import FlowField, read_flo, write_flo
from .etf import EtfParams, compute_etf, etf_init, etf_refine, sobel_gradients, visualize_field
from .fdog import (
    ANCHOR_LEVELS,
    FdogParams,
    alpha_to_params,
    fdog_response,
    render_line_drawing,
    render_with_lcm,
    threshold_response,
)
from .metrics import MetricReport, diff_map, evaluate_batch, fft2d, fft_distance, psnr, spectrum_image, ssim
from .dataset import build_dataset, iter_pairs, load_manifest, validate_manifest
from .estimators import EdgeTangentFlow, LineDrawingGenerator

__all__ = [
    "__version__",
    "load_image",
    "save_image",
    "encode_png",
    "to_grayscale",
    "resize",
    "FlowField",
    "read_flo",
    "write_flo",
    "EtfParams",
    "compute_etf",
    "etf_init",
    "etf_refine",
    "sobel_gradients",
    "visualize_field",
    "ANCHOR_LEVELS",
    "FdogParams",
    "alpha_to_params",
    "fdog_response",
    "render_line_drawing",
    "render_with_lcm",
    "threshold_response",
    "MetricReport",
    "ssim",
    "psnr",
    "fft2d",
    "fft_distance",
    "spectrum_image",
    "diff_map",
    "evaluate_batch",
    "build_dataset",
    "validate_manifest",
    "load_manifest",
    "iter_pairs",
    "EdgeTangentFlow",
    "LineDrawingGenerator",
]
