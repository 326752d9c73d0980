"""Block vocabulary: spec validation, materialization, upsampler wiring."""
import pytest
import torch
from torch import nn

from flowline.neural.blocks import BLOCK_KINDS, BlockSpec, Upsampler, build_block


class TestBlockSpec:
    def test_defaults(self):
        spec = BlockSpec("CIL", 4, 8)
        assert spec.stride == 2
        assert spec.kernel == 4

    def test_stride_one_uses_kernel_three(self):
        assert BlockSpec("CL", 4, 8, stride=1).kernel == 3

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown block kind"):
            BlockSpec("XL", 4, 8)

    @pytest.mark.parametrize("in_ch,out_ch", [(0, 8), (4, 0), (-1, 8)])
    def test_bad_channels_rejected(self, in_ch, out_ch):
        with pytest.raises(ValueError, match="positive"):
            BlockSpec("CL", in_ch, out_ch)

    def test_bad_stride_rejected(self):
        with pytest.raises(ValueError, match="stride"):
            BlockSpec("CL", 4, 8, stride=3)

    def test_frozen(self):
        spec = BlockSpec("CL", 4, 8)
        with pytest.raises(Exception):
            spec.kind = "CIL"


class TestBuildBlock:
    @pytest.mark.parametrize("kind", BLOCK_KINDS)
    def test_every_kind_builds(self, kind):
        module = build_block(BlockSpec(kind, 4, 8))
        assert isinstance(module, nn.Module)

    def test_cl_has_no_norm(self):
        module = build_block(BlockSpec("CL", 4, 8))
        kinds = [type(m) for m in module]
        assert nn.InstanceNorm2d not in kinds
        assert kinds[-1] is nn.LeakyReLU

    def test_cil_has_norm(self):
        module = build_block(BlockSpec("CIL", 4, 8))
        assert any(isinstance(m, nn.InstanceNorm2d) for m in module)

    def test_instance_norm_carries_no_affine(self):
        module = build_block(BlockSpec("CIL", 4, 8))
        norm = next(m for m in module if isinstance(m, nn.InstanceNorm2d))
        assert norm.weight is None and norm.bias is None

    def test_dir_uses_plain_relu(self):
        module = build_block(BlockSpec("DIR", 4, 8))
        assert isinstance(module[0], nn.ConvTranspose2d)
        assert isinstance(module[-1], nn.ReLU)

    def test_downsampling_halves(self):
        module = build_block(BlockSpec("CIL", 4, 8, stride=2))
        out = module(torch.zeros(1, 4, 16, 16))
        assert out.shape == (1, 8, 8, 8)

    def test_stride_one_preserves_shape(self):
        module = build_block(BlockSpec("CL", 4, 8, stride=1))
        out = module(torch.zeros(1, 4, 16, 16))
        assert out.shape == (1, 8, 16, 16)

    def test_transposed_doubles(self):
        module = build_block(BlockSpec("DIR", 8, 4, stride=2))
        out = module(torch.zeros(1, 8, 8, 8))
        assert out.shape == (1, 4, 16, 16)

    def test_uct_is_upsampler(self):
        assert isinstance(build_block(BlockSpec("UCT", 4, 2)), Upsampler)

    def test_bare_conv(self):
        module = build_block(BlockSpec("conv", 4, 1, stride=1))
        assert isinstance(module, nn.Conv2d)


class TestUpsampler:
    def test_doubles_resolution(self):
        up = Upsampler(4, 2)
        out = up(torch.zeros(1, 4, 8, 8))
        assert out.shape == (1, 2, 16, 16)

    def test_extra_features_concatenate_after_upsample(self):
        # in_ch counts channels after the concat, so 4 + 3 here.
        up = Upsampler(7, 1)
        out = up(torch.zeros(1, 4, 8, 8), extra=[torch.zeros(1, 3, 16, 16)])
        assert out.shape == (1, 1, 16, 16)

    def test_output_in_tanh_range(self):
        torch.manual_seed(0)
        up = Upsampler(4, 2)
        out = up(torch.randn(2, 4, 8, 8) * 10)
        assert out.min() >= -1.0 and out.max() <= 1.0
