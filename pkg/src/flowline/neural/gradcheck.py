"""Finite-difference verification of reverse-mode gradients."""
from __future__ import annotations

import torch

__all__ = ["grad_check"]


def grad_check(
    fn,
    tensors: list[torch.Tensor],
    epsilon: float = 1e-6,
    num_coords: int = 100,
    seed: int = 0,
) -> float:
    """Compare backward gradients of ``fn(tensors)`` to central differences.

    ``fn`` must return a scalar tensor computed from ``tensors``, each
    of which is checked at up to ``num_coords`` randomly sampled
    coordinates (all coordinates when a tensor is smaller). Tensors
    should be 64-bit; the returned value is the maximum relative error
    max|a - n| / max(|a|, |n|, floor) over all sampled coordinates,
    where floor = 1e-8 * max(1, |fn()|). A central difference of step
    ``epsilon`` cannot resolve gradients below roughly
    |fn()| * eps_machine / epsilon; coordinates where analytic and
    numeric values both sit under that resolution carry no signal
    either way and count as matching.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if not tensors:
        raise ValueError("no tensors to check")
    for t in tensors:
        t.requires_grad_(True)
        if t.grad is not None:
            t.grad = None

    value = fn()
    if value.ndim != 0:
        raise ValueError(f"fn must return a scalar, got shape {tuple(value.shape)}")
    if not torch.isfinite(value):
        raise ValueError("non-finite value from fn")
    value.backward()

    rng = torch.Generator().manual_seed(seed)
    scale = abs(value.item())
    floor = 1e-8 * max(1.0, scale)
    resolution = scale * 1e-12 / epsilon
    worst = 0.0
    for t in tensors:
        if t.grad is None:
            raise ValueError("tensor received no gradient")
        if not torch.isfinite(t.grad).all():
            raise ValueError("non-finite gradient")
        flat = t.detach().view(-1)
        grad = t.grad.detach().view(-1)
        n = flat.numel()
        count = min(num_coords, n)
        coords = torch.randperm(n, generator=rng)[:count]
        for idx in coords.tolist():
            orig = flat[idx].item()
            with torch.no_grad():
                flat[idx] = orig + epsilon
                hi = float(fn())
                flat[idx] = orig - epsilon
                lo = float(fn())
                flat[idx] = orig
            numeric = (hi - lo) / (2.0 * epsilon)
            analytic = grad[idx].item()
            if abs(analytic) < resolution and abs(numeric) < resolution:
                continue
            denom = max(abs(analytic), abs(numeric), floor)
            worst = max(worst, abs(analytic - numeric) / denom)
    return worst
