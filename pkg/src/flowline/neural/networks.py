"""Generator, discriminator and regressor architectures.

All four networks are fully convolutional. The two generators are
U-Nets whose encoder features re-enter the decoder through skip
concatenation; the drawing generator additionally receives the control
matrix, downsampled to each decoding resolution, as one extra input
channel per decoding layer. Channel widths follow base_ch * {1, 2, 4,
8, 8, ...} capped at 8x.

FULL_BASE_CH is the production width; unit tests run with base_ch=8.
"""
from __future__ import annotations

import torch
from torch import nn
from torch.nn import functional as F

from ..raster import LUMA_WEIGHTS
from .blocks import BlockSpec, Upsampler, build_block

__all__ = [
    "FULL_BASE_CH",
    "FlowGenerator",
    "DrawingGenerator",
    "PatchDiscriminator",
    "ControlRegressor",
    "postprocess_flow",
    "count_parameters",
    "NETWORK_KINDS",
]

# Width at which the two generators together carry roughly 51M
# parameters; see the parameter-count test.
FULL_BASE_CH = 56


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def postprocess_flow(raw: torch.Tensor) -> torch.Tensor:
    """Map raw 2-channel output to unit-or-zero tangents.

    Vectors of norm > 0.1 are normalized, everything else becomes
    exactly zero.
    """
    if raw.ndim != 4 or raw.shape[1] != 2:
        raise ValueError(f"expected [B, 2, H, W] tensor, got {tuple(raw.shape)}")
    norm = torch.linalg.vector_norm(raw, dim=1, keepdim=True)
    keep = norm > 0.1
    return torch.where(keep, raw / norm.clamp_min(1e-12), torch.zeros_like(raw))


def _encoder_channels(base_ch: int, depth: int) -> list[int]:
    return [base_ch * min(2**i, 8) for i in range(depth)]


def _check_size(h: int, w: int, divisor: int) -> None:
    if h % divisor or w % divisor:
        raise ValueError(f"input size {h}x{w} must be divisible by {divisor}")


class FlowGenerator(nn.Module):
    """Image to tangent-flow generator.

    A grayscale head collapses RGB input with fixed luma weights, the
    encoder stacks one stride-1 CL and depth-1 stride-2 CIL blocks, and
    the decoder mirrors it with a DR bottleneck, DIR upsampling blocks
    and a final tanh upsampler producing 2 channels in [-1, 1]. Use
    :func:`postprocess_flow` to obtain unit-or-zero tangents.
    """

    kind = "flow_generator"

    def __init__(self, base_ch: int = FULL_BASE_CH, depth: int = 5):
        super().__init__()
        if base_ch < 1:
            raise ValueError(f"base_ch must be positive, got {base_ch}")
        if depth < 2:
            raise ValueError(f"depth must be at least 2, got {depth}")
        self.base_ch = base_ch
        self.depth = depth
        self.divisor = 2 ** (depth - 1)
        chs = _encoder_channels(base_ch, depth)
        self.register_buffer("luma", torch.tensor(LUMA_WEIGHTS).view(1, 3, 1, 1))

        enc = [build_block(BlockSpec("CL", 1, chs[0], stride=1))]
        enc += [
            build_block(BlockSpec("CIL", chs[i - 1], chs[i], stride=2))
            for i in range(1, depth)
        ]
        self.encoder = nn.ModuleList(enc)

        self.bottleneck = build_block(BlockSpec("DR", chs[-1], chs[-1], stride=1))
        dec = []
        prev = chs[-1]
        for j in range(depth - 2):
            out = chs[max(depth - 3 - j, 0)]
            dec.append(build_block(BlockSpec("DIR", prev + chs[depth - 1 - j], out, stride=2)))
            prev = out
        self.decoder = nn.ModuleList(dec)
        # Conv input: upsampled [prev + skip at depth 1] plus the full
        # resolution skip concatenated after the upsample.
        self.head = Upsampler(prev + chs[1] + chs[0], 2)

    def config(self) -> dict:
        return {"base_ch": self.base_ch, "depth": self.depth}

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        if image.ndim != 4 or image.shape[1] != 3:
            raise ValueError(f"expected [B, 3, H, W] input, got {tuple(image.shape)}")
        _check_size(image.shape[2], image.shape[3], self.divisor)
        h = (image * self.luma).sum(dim=1, keepdim=True)
        feats = []
        for block in self.encoder:
            h = block(h)
            feats.append(h)
        d = self.bottleneck(feats[-1])
        for j, block in enumerate(self.decoder):
            d = block(torch.cat([d, feats[self.depth - 1 - j]], dim=1))
        return self.head(torch.cat([d, feats[1]], dim=1), extra=[feats[0]])


class DrawingGenerator(nn.Module):
    """Image + flow field + control matrix to line-drawing generator.

    Two parallel encoders (image and field) feed a concatenated
    bottleneck; every decoding layer consumes the previous features,
    the skip features of both encoders at its input resolution, and
    the control matrix area-downsampled to that resolution. Output is
    one channel remapped from tanh range to [0, 1].
    """

    kind = "drawing_generator"

    def __init__(self, base_ch: int = FULL_BASE_CH, depth: int = 6):
        super().__init__()
        if base_ch < 1:
            raise ValueError(f"base_ch must be positive, got {base_ch}")
        if depth < 2:
            raise ValueError(f"depth must be at least 2, got {depth}")
        self.base_ch = base_ch
        self.depth = depth
        self.divisor = 2 ** (depth - 1)
        chs = _encoder_channels(base_ch, depth)

        def encoder(in_ch: int) -> nn.ModuleList:
            blocks = [build_block(BlockSpec("CL", in_ch, chs[0], stride=1))]
            blocks += [
                build_block(BlockSpec("CIL", chs[i - 1], chs[i], stride=2))
                for i in range(1, depth)
            ]
            return nn.ModuleList(blocks)

        self.image_encoder = encoder(3)
        self.field_encoder = encoder(2)

        self.bottleneck = build_block(BlockSpec("DR", 2 * chs[-1] + 1, chs[-1], stride=1))
        dec = []
        prev = chs[-1]
        for j in range(depth - 2):
            skip = chs[self.depth - 1 - j]
            out = chs[max(depth - 3 - j, 0)]
            dec.append(build_block(BlockSpec("DIR", prev + 2 * skip + 1, out, stride=2)))
            prev = out
        self.decoder = nn.ModuleList(dec)
        self.head = Upsampler(prev + 2 * chs[1] + 1 + 2 * chs[0] + 1, 1)

    def config(self) -> dict:
        return {"base_ch": self.base_ch, "depth": self.depth}

    @staticmethod
    def _shrink(control: torch.Tensor, size: int) -> torch.Tensor:
        if control.shape[2] == size and control.shape[3] == size:
            return control
        return F.adaptive_avg_pool2d(control, size)

    def forward(self, image: torch.Tensor, field: torch.Tensor, control: torch.Tensor) -> torch.Tensor:
        if image.ndim != 4 or image.shape[1] != 3:
            raise ValueError(f"expected [B, 3, H, W] image, got {tuple(image.shape)}")
        if field.shape[1] != 2 or field.shape[2:] != image.shape[2:]:
            raise ValueError(f"field shape {tuple(field.shape)} does not match image")
        if control.shape[1] != 1 or control.shape[2:] != image.shape[2:]:
            raise ValueError(f"control shape {tuple(control.shape)} does not match image")
        h, w = image.shape[2], image.shape[3]
        _check_size(h, w, self.divisor)
        if h != w:
            raise ValueError(f"expected square input, got {h}x{w}")

        def run(blocks: nn.ModuleList, x: torch.Tensor) -> list[torch.Tensor]:
            feats = []
            for block in blocks:
                x = block(x)
                feats.append(x)
            return feats

        fi = run(self.image_encoder, image)
        fe = run(self.field_encoder, field)

        res = h // self.divisor
        d = self.bottleneck(torch.cat([fi[-1], fe[-1], self._shrink(control, res)], dim=1))
        for j, block in enumerate(self.decoder):
            k = self.depth - 1 - j
            d = block(torch.cat([d, fi[k], fe[k], self._shrink(control, res)], dim=1))
            res *= 2
        pre = torch.cat([d, fi[1], fe[1], self._shrink(control, res)], dim=1)
        raw = self.head(pre, extra=[fi[0], fe[0], control])
        return (raw + 1.0) * 0.5


class PatchDiscriminator(nn.Module):
    """Patch logit map over channel-concatenated condition and candidate.

    Six kernel-4 convolutions by default; stride-1 tail layers shrink
    the map by one pixel each, growing the receptive field to 94
    without further downsampling. No normalization on the first and
    last layers.
    """

    kind = "patch_discriminator"

    DEFAULT_CHANNELS = (64, 128, 256, 512, 512, 1)
    DEFAULT_STRIDES = (2, 2, 2, 1, 1, 1)

    def __init__(
        self,
        in_ch: int,
        channels: tuple[int, ...] = DEFAULT_CHANNELS,
        strides: tuple[int, ...] = DEFAULT_STRIDES,
    ):
        super().__init__()
        channels = tuple(int(c) for c in channels)
        strides = tuple(int(s) for s in strides)
        if len(channels) != len(strides) or not channels:
            raise ValueError("channels and strides must be equally sized and non-empty")
        if channels[-1] != 1:
            raise ValueError(f"final layer must emit 1 logit channel, got {channels[-1]}")
        if any(s not in (1, 2) for s in strides):
            raise ValueError(f"strides must be 1 or 2, got {strides}")
        self.in_ch = in_ch
        self.channels = channels
        self.strides = strides

        layers: list[nn.Module] = []
        prev = in_ch
        last = len(channels) - 1
        for i, (ch, stride) in enumerate(zip(channels, strides)):
            layers.append(nn.Conv2d(prev, ch, 4, stride, padding=1))
            if 0 < i < last:
                layers.append(nn.InstanceNorm2d(ch))
            if i < last:
                layers.append(nn.LeakyReLU(0.2))
            prev = ch
        self.net = nn.Sequential(*layers)

    def config(self) -> dict:
        return {"in_ch": self.in_ch, "channels": list(self.channels), "strides": list(self.strides)}

    @property
    def receptive_field(self) -> int:
        r, jump = 1, 1
        for stride in self.strides:
            r += 3 * jump  # kernel 4 adds (k - 1) * jump
            jump *= stride
        return r

    def output_size(self, size: int) -> int:
        for stride in self.strides:
            size = (size - 2) // stride + 1
            if size < 1:
                raise ValueError(f"input too small for the layer stack at {size}")
        return size

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise ValueError(f"expected [B, {self.in_ch}, H, W] input, got {tuple(x.shape)}")
        self.output_size(min(x.shape[2], x.shape[3]))
        return self.net(x)


class ControlRegressor(nn.Module):
    """Per-pixel control estimate from a drawing and its flow field.

    Stride-2 CIL stack, 1x1 convolution, sigmoid, bilinear upsample
    back to the input resolution. With ``scalar_output`` the spatial
    mean is broadcast instead, yielding one global estimate.
    """

    kind = "control_regressor"

    def __init__(self, base_ch: int = FULL_BASE_CH, depth: int = 4, scalar_output: bool = False):
        super().__init__()
        if base_ch < 1:
            raise ValueError(f"base_ch must be positive, got {base_ch}")
        if depth < 1:
            raise ValueError(f"depth must be at least 1, got {depth}")
        self.base_ch = base_ch
        self.depth = depth
        self.scalar_output = scalar_output
        self.divisor = 2**depth
        chs = _encoder_channels(base_ch, depth)
        blocks = []
        prev = 3
        for ch in chs:
            blocks.append(build_block(BlockSpec("CIL", prev, ch, stride=2)))
            prev = ch
        self.encoder = nn.Sequential(*blocks)
        self.head = nn.Conv2d(prev, 1, 1)

    def config(self) -> dict:
        return {"base_ch": self.base_ch, "depth": self.depth, "scalar_output": self.scalar_output}

    def forward(self, drawing: torch.Tensor, field: torch.Tensor) -> torch.Tensor:
        if drawing.ndim != 4 or drawing.shape[1] != 1:
            raise ValueError(f"expected [B, 1, H, W] drawing, got {tuple(drawing.shape)}")
        if field.shape[1] != 2 or field.shape[2:] != drawing.shape[2:]:
            raise ValueError(f"field shape {tuple(field.shape)} does not match drawing")
        h, w = drawing.shape[2], drawing.shape[3]
        _check_size(h, w, self.divisor)
        x = torch.cat([drawing, field], dim=1)
        alpha = torch.sigmoid(self.head(self.encoder(x)))
        alpha = F.interpolate(alpha, size=(h, w), mode="bilinear", align_corners=False)
        if self.scalar_output:
            alpha = alpha.mean(dim=(2, 3), keepdim=True).expand_as(alpha)
        return alpha


NETWORK_KINDS = {
    cls.kind: cls
    for cls in (FlowGenerator, DrawingGenerator, PatchDiscriminator, ControlRegressor)
}
