"""Training objective: four loss terms and their weighted total."""
from __future__ import annotations

from dataclasses import dataclass

import torch
from torch.nn import functional as F

__all__ = [
    "TrainConfig",
    "loss_pixel",
    "loss_adversarial",
    "loss_control",
    "loss_fft",
    "loss_total",
]


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and objective settings.

    Loss weights default to (1, 100, 1, 0.05) for the adversarial,
    pixel, control and spectrum terms. Zero weights switch the
    corresponding term off entirely (the trainers skip its
    computation, not just its contribution).
    """

    learning_rate: float = 2e-4
    adam_beta1: float = 0.5
    adam_beta2: float = 0.999
    epochs: int = 200
    batch_size: int = 1
    image_size: int = 64
    base_ch: int = 8
    weight_adv: float = 1.0
    weight_pixel: float = 100.0
    weight_control: float = 1.0
    weight_fft: float = 0.05
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not (0.0 < self.adam_beta1 < 1.0 and 0.0 < self.adam_beta2 < 1.0):
            raise ValueError("adam betas must lie in (0, 1)")
        for name in ("epochs", "batch_size", "image_size", "base_ch"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("weight_adv", "weight_pixel", "weight_control", "weight_fft"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")

    @property
    def torch_dtype(self) -> torch.dtype:
        return torch.float64 if self.dtype == "float64" else torch.float32

    def adam(self, params) -> torch.optim.Adam:
        return torch.optim.Adam(
            params, lr=self.learning_rate, betas=(self.adam_beta1, self.adam_beta2)
        )


def _check_same_shape(a: torch.Tensor, b: torch.Tensor) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {tuple(a.shape)} vs {tuple(b.shape)}")


def loss_pixel(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference."""
    _check_same_shape(pred, target)
    return (pred - target).abs().mean()


def loss_adversarial(
    d_real: torch.Tensor | None, d_fake: torch.Tensor, role: str
) -> torch.Tensor:
    """Non-saturating binary cross-entropy on patch logits.

    Discriminator: mean softplus(-real) + mean softplus(fake).
    Generator: mean softplus(-fake); d_real is ignored and may be None.
    """
    if role == "generator":
        return F.softplus(-d_fake).mean()
    if role == "discriminator":
        if d_real is None:
            raise ValueError("discriminator loss requires real logits")
        return F.softplus(-d_real).mean() + F.softplus(d_fake).mean()
    raise ValueError(f"role must be 'generator' or 'discriminator', got {role!r}")


def loss_control(alpha_hat: torch.Tensor, lcm: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference between regressed and requested control."""
    _check_same_shape(alpha_hat, lcm)
    return (alpha_hat - lcm).abs().mean()


def loss_fft(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean absolute spectrum difference, differentiable.

    Matches the evaluation-side definition: per image, the sum of
    |d real| + |d imag| over all frequencies divided by the pixel
    count, then averaged over batch and channels.
    """
    _check_same_shape(pred, target)
    if pred.ndim < 2:
        raise ValueError(f"expected at least 2 dimensions, got {pred.ndim}")
    d = torch.fft.fft2(pred) - torch.fft.fft2(target)
    per_image = (d.real.abs() + d.imag.abs()).sum(dim=(-2, -1))
    h, w = pred.shape[-2], pred.shape[-1]
    return per_image.mean() / (h * w)


def loss_total(
    adv: torch.Tensor | float,
    pixel: torch.Tensor | float,
    control: torch.Tensor | float,
    fft: torch.Tensor | float,
    config: TrainConfig | None = None,
) -> torch.Tensor | float:
    """Weighted sum of the four objective terms."""
    cfg = config or TrainConfig()
    return (
        cfg.weight_adv * adv
        + cfg.weight_pixel * pixel
        + cfg.weight_control * control
        + cfg.weight_fft * fft
    )
