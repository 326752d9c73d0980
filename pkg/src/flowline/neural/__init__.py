"""Neural generators, discriminator, regressor, losses and training.

Import of this subpackage pulls in torch; the classical pipeline in the
parent package stays importable without it.
"""
from .blocks import BlockSpec, build_block
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .losses import (
    TrainConfig,
    loss_adversarial,
    loss_control,
    loss_fft,
    loss_pixel,
    loss_total,
)
from .networks import (
    ControlRegressor,
    DrawingGenerator,
    FlowGenerator,
    PatchDiscriminator,
    count_parameters,
    postprocess_flow,
)
from .training import (
    train_control_regressor,
    train_drawing_generator,
    train_flow_generator,
)

__all__ = [
    "BlockSpec",
    "build_block",
    "TrainConfig",
    "loss_pixel",
    "loss_adversarial",
    "loss_control",
    "loss_fft",
    "loss_total",
    "FlowGenerator",
    "DrawingGenerator",
    "PatchDiscriminator",
    "ControlRegressor",
    "postprocess_flow",
    "count_parameters",
    "grad_check",
    "save_checkpoint",
    "load_checkpoint",
    "train_flow_generator",
    "train_control_regressor",
    "train_drawing_generator",
]
