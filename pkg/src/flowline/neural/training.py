"""Training loops for the three networks.

Each trainer is deterministic for a fixed config: the torch seed is
set once up front, networks are constructed in a fixed order, and the
per-epoch sample order comes from ``random.Random(seed * 1000 +
epoch)``. Histories are lists of per-step dicts; pass ``log_path`` to
also emit them as JSON lines.
"""
from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from ..raster import load_image
from ..vectorfield import read_flo
from .losses import TrainConfig, loss_adversarial, loss_control, loss_fft, loss_pixel
from .networks import (
    ControlRegressor,
    DrawingGenerator,
    FlowGenerator,
    PatchDiscriminator,
    postprocess_flow,
)

__all__ = [
    "train_flow_generator",
    "train_control_regressor",
    "train_drawing_generator",
]


def _image_tensor(path, size: int, dtype: torch.dtype) -> torch.Tensor:
    arr = load_image(path)
    if arr.ndim == 2:
        arr = np.stack([arr] * 3, axis=-1)
    if arr.shape[:2] != (size, size):
        raise ValueError(f"{path}: expected {size}x{size}, got {arr.shape[1]}x{arr.shape[0]}")
    return torch.from_numpy(arr.transpose(2, 0, 1).copy()).to(dtype)


def _field_tensor(path, size: int, dtype: torch.dtype) -> torch.Tensor:
    field = read_flo(path)
    if (field.height, field.width) != (size, size):
        raise ValueError(f"{path}: expected {size}x{size}, got {field.width}x{field.height}")
    return torch.from_numpy(field.tangents.transpose(2, 0, 1).copy()).to(dtype)


def _drawing_tensor(path, size: int, dtype: torch.dtype) -> torch.Tensor:
    arr = load_image(path)
    if arr.ndim != 2:
        raise ValueError(f"{path}: drawings must be single channel")
    if arr.shape != (size, size):
        raise ValueError(f"{path}: expected {size}x{size}, got {arr.shape[1]}x{arr.shape[0]}")
    return torch.from_numpy(arr.copy()).to(dtype).unsqueeze(0)


def _batches(n: int, config: TrainConfig, epoch: int) -> list[list[int]]:
    order = list(range(n))
    random.Random(config.seed * 1000 + epoch).shuffle(order)
    size = config.batch_size
    return [order[i : i + size] for i in range(0, n, size)]


def _write_log(log_path, history: list[dict]) -> None:
    if log_path is None:
        return
    with open(log_path, "w") as fh:
        for entry in history:
            fh.write(json.dumps(entry) + "\n")


def train_flow_generator(
    samples: Sequence, config: TrainConfig, log_path=None
) -> tuple[FlowGenerator, list[dict]]:
    """Adversarial + pixel training of the image-to-flow generator.

    ``samples`` holds (image, field) path pairs; the discriminator
    judges (image, field) channel concatenations.
    """
    if not samples:
        raise ValueError("no training samples")
    dtype = config.torch_dtype
    torch.manual_seed(config.seed)
    generator = FlowGenerator(config.base_ch).to(dtype)
    discriminator = PatchDiscriminator(3 + 2).to(dtype)
    opt_g = config.adam(generator.parameters())
    opt_d = config.adam(discriminator.parameters())

    images = [_image_tensor(s.image, config.image_size, dtype) for s in samples]
    fields = [_field_tensor(s.field, config.image_size, dtype) for s in samples]

    history: list[dict] = []
    step = 0
    for epoch in range(config.epochs):
        for batch in _batches(len(samples), config, epoch):
            x = torch.stack([images[i] for i in batch])
            t = torch.stack([fields[i] for i in batch])
            fake = generator(x)

            d_real = discriminator(torch.cat([x, t], dim=1))
            d_fake = discriminator(torch.cat([x, fake.detach()], dim=1))
            d_loss = loss_adversarial(d_real, d_fake, "discriminator")
            opt_d.zero_grad()
            d_loss.backward()
            opt_d.step()

            adv = loss_adversarial(None, discriminator(torch.cat([x, fake], dim=1)), "generator")
            pixel = loss_pixel(fake, t)
            g_loss = config.weight_adv * adv + config.weight_pixel * pixel
            opt_g.zero_grad()
            g_loss.backward()
            opt_g.step()

            step += 1
            history.append(
                {
                    "step": step,
                    "discriminator": d_loss.item(),
                    "adversarial": adv.item(),
                    "pixel": pixel.item(),
                    "total": g_loss.item(),
                }
            )
    _write_log(log_path, history)
    return generator, history


def train_control_regressor(
    samples: Sequence, config: TrainConfig, log_path=None
) -> tuple[ControlRegressor, list[dict]]:
    """L1 regression of the recorded control level from (drawing, field)."""
    if not samples:
        raise ValueError("no training samples")
    dtype = config.torch_dtype
    torch.manual_seed(config.seed)
    regressor = ControlRegressor(config.base_ch).to(dtype)
    opt = config.adam(regressor.parameters())

    drawings = [_drawing_tensor(s.drawing, config.image_size, dtype) for s in samples]
    fields = [_field_tensor(s.field, config.image_size, dtype) for s in samples]
    targets = [
        torch.full((1, config.image_size, config.image_size), float(s.alpha), dtype=dtype)
        for s in samples
    ]

    history: list[dict] = []
    step = 0
    for epoch in range(config.epochs):
        for batch in _batches(len(samples), config, epoch):
            d = torch.stack([drawings[i] for i in batch])
            f = torch.stack([fields[i] for i in batch])
            a = torch.stack([targets[i] for i in batch])
            err = loss_control(regressor(d, f), a)
            opt.zero_grad()
            err.backward()
            opt.step()
            step += 1
            history.append({"step": step, "control": err.item()})
    _write_log(log_path, history)
    return regressor, history


def train_drawing_generator(
    samples: Sequence,
    config: TrainConfig,
    flow_generator: FlowGenerator,
    control_regressor: ControlRegressor,
    log_path=None,
) -> tuple[DrawingGenerator, list[dict]]:
    """Full four-term objective over (image, drawing, alpha) samples.

    The flow generator and control regressor must be trained already;
    both are frozen here. The flow generator supplies the field input
    on the fly; the control matrix is the constant map of each
    sample's recorded alpha. Loss terms with zero weight are skipped
    entirely, so a config with only the pixel weight reduces the loop
    to plain L1 regression.
    """
    if not samples:
        raise ValueError("no training samples")
    if flow_generator is None or control_regressor is None:
        raise ValueError("missing frozen networks")
    dtype = config.torch_dtype
    torch.manual_seed(config.seed)
    generator = DrawingGenerator(config.base_ch).to(dtype)

    use_adv = config.weight_adv > 0.0
    use_control = config.weight_control > 0.0
    use_fft = config.weight_fft > 0.0
    if use_adv:
        discriminator = PatchDiscriminator(3 + 1).to(dtype)
        opt_d = config.adam(discriminator.parameters())
    opt_g = config.adam(generator.parameters())

    flow_generator = flow_generator.to(dtype).eval().requires_grad_(False)
    control_regressor = control_regressor.to(dtype).eval().requires_grad_(False)

    images = [_image_tensor(s.image, config.image_size, dtype) for s in samples]
    drawings = [_drawing_tensor(s.drawing, config.image_size, dtype) for s in samples]
    controls = [
        torch.full((1, config.image_size, config.image_size), float(s.alpha), dtype=dtype)
        for s in samples
    ]

    history: list[dict] = []
    step = 0
    for epoch in range(config.epochs):
        for batch in _batches(len(samples), config, epoch):
            x = torch.stack([images[i] for i in batch])
            target = torch.stack([drawings[i] for i in batch])
            lcm = torch.stack([controls[i] for i in batch])
            with torch.no_grad():
                field = postprocess_flow(flow_generator(x))
            fake = generator(x, field, lcm)

            d_val = 0.0
            if use_adv:
                d_real = discriminator(torch.cat([x, target], dim=1))
                d_fake = discriminator(torch.cat([x, fake.detach()], dim=1))
                d_loss = loss_adversarial(d_real, d_fake, "discriminator")
                opt_d.zero_grad()
                d_loss.backward()
                opt_d.step()
                d_val = d_loss.item()

            pixel = loss_pixel(fake, target)
            total = config.weight_pixel * pixel
            adv_val = control_val = fft_val = 0.0
            if use_adv:
                adv = loss_adversarial(
                    None, discriminator(torch.cat([x, fake], dim=1)), "generator"
                )
                total = total + config.weight_adv * adv
                adv_val = adv.item()
            if use_control:
                control = loss_control(control_regressor(fake, field), lcm)
                total = total + config.weight_control * control
                control_val = control.item()
            if use_fft:
                fft = loss_fft(fake, target)
                total = total + config.weight_fft * fft
                fft_val = fft.item()

            opt_g.zero_grad()
            total.backward()
            opt_g.step()

            step += 1
            history.append(
                {
                    "step": step,
                    "discriminator": d_val,
                    "adversarial": adv_val,
                    "pixel": pixel.item(),
                    "control": control_val,
                    "fft": fft_val,
                    "total": total.item(),
                }
            )
    _write_log(log_path, history)
    return generator, history
