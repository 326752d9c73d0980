"""Layer block vocabulary shared by every network in the package.

Downsampling and upsampling blocks use kernel 4 with stride 2 and
padding 1 (exact 2x shape change); stride 1 blocks use kernel 3 so the
spatial size is preserved. Instance normalization carries no affine
parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

__all__ = ["BLOCK_KINDS", "BlockSpec", "build_block", "Upsampler"]

BLOCK_KINDS = ("CL", "CIL", "DR", "DIR", "UCT", "conv")


@dataclass(frozen=True)
class BlockSpec:
    """One layer block: convolution flavour, channel counts, stride."""

    kind: str
    in_ch: int
    out_ch: int
    stride: int = 2

    def __post_init__(self):
        if self.kind not in BLOCK_KINDS:
            raise ValueError(f"unknown block kind {self.kind!r}, expected one of {BLOCK_KINDS}")
        if self.in_ch < 1 or self.out_ch < 1:
            raise ValueError(f"channel counts must be positive, got {self.in_ch}->{self.out_ch}")
        if self.stride not in (1, 2):
            raise ValueError(f"stride must be 1 or 2, got {self.stride}")

    @property
    def kernel(self) -> int:
        return 4 if self.stride == 2 else 3


def _conv(spec: BlockSpec) -> nn.Conv2d:
    return nn.Conv2d(spec.in_ch, spec.out_ch, spec.kernel, spec.stride, padding=1)


def _deconv(spec: BlockSpec) -> nn.ConvTranspose2d:
    return nn.ConvTranspose2d(spec.in_ch, spec.out_ch, spec.kernel, spec.stride, padding=1)


def build_block(spec: BlockSpec) -> nn.Module:
    """Materialize a block spec as a torch module.

    CL: conv + leaky rectifier (slope 0.2). CIL: conv + instance norm +
    leaky rectifier. DR: transposed conv + rectifier. DIR: transposed
    conv + instance norm + rectifier. UCT: 2x nearest upsample + conv +
    tanh (returned as an :class:`Upsampler` so callers can concatenate
    skip features after the upsample). conv: bare convolution.
    """
    if spec.kind == "CL":
        return nn.Sequential(_conv(spec), nn.LeakyReLU(0.2))
    if spec.kind == "CIL":
        return nn.Sequential(_conv(spec), nn.InstanceNorm2d(spec.out_ch), nn.LeakyReLU(0.2))
    if spec.kind == "DR":
        return nn.Sequential(_deconv(spec), nn.ReLU())
    if spec.kind == "DIR":
        return nn.Sequential(_deconv(spec), nn.InstanceNorm2d(spec.out_ch), nn.ReLU())
    if spec.kind == "UCT":
        return Upsampler(spec.in_ch, spec.out_ch)
    return _conv(spec)


class Upsampler(nn.Module):
    """2x nearest upsample, optional post-upsample concatenation, conv, tanh."""

    def __init__(self, in_ch: int, out_ch: int):
        super().__init__()
        self.conv = nn.Conv2d(in_ch, out_ch, 3, 1, padding=1)

    def forward(self, x: torch.Tensor, extra: list[torch.Tensor] | None = None) -> torch.Tensor:
        up = nn.functional.interpolate(x, scale_factor=2, mode="nearest")
        if extra:
            up = torch.cat([up, *extra], dim=1)
        return torch.tanh(self.conv(up))
