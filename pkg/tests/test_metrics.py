"""Quality metrics: closed form values and metric axioms."""
import math

import numpy as np
import pytest

from flowline.metrics import MetricReport, diff_map, evaluate_batch, fft_distance, psnr, spectrum_image, ssim
from flowline.raster import save_image


def test_ssim_identity_is_exactly_one():
    rng = np.random.default_rng(0)
    img = rng.random((24, 24))
    assert ssim(img, img) == 1.0


def test_ssim_black_vs_white_closed_form():
    black = np.zeros((16, 16))
    white = np.ones((16, 16))
    c1 = 0.01**2
    # Constant images: variances and covariance vanish, the luminance
    # term c1 / (mu^2 + c1) is all that remains.
    assert ssim(black, white) == pytest.approx(c1 / (1.0 + c1), rel=1e-9)


def test_ssim_symmetry_and_range():
    rng = np.random.default_rng(1)
    a = rng.random((20, 20))
    b = rng.random((20, 20))
    s = ssim(a, b)
    assert s == pytest.approx(ssim(b, a), rel=1e-12)
    assert -1.0 <= s < 1.0


def test_ssim_rejects_small_or_mismatched():
    with pytest.raises(ValueError):
        ssim(np.zeros((8, 8)), np.zeros((8, 8)))
    with pytest.raises(ValueError):
        ssim(np.zeros((16, 16)), np.zeros((16, 20)))


def test_psnr_identity_is_infinite():
    img = np.full((8, 8), 0.3)
    assert psnr(img, img) == math.inf


def test_psnr_single_step_closed_form():
    a = np.zeros((8, 8))
    b = np.full((8, 8), 1.0 / 255.0)
    # MSE = (1/255)^2, so PSNR = 20 log10(255) = 48.1308 dB.
    assert psnr(a, b) == pytest.approx(20.0 * math.log10(255.0), rel=1e-9)
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-4)


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


def test_fft_distance_zero_on_identity():
    rng = np.random.default_rng(2)
    img = rng.random((12, 12))
    assert fft_distance(img, img) == 0.0


def test_fft_distance_constant_shift_is_k():
    rng = np.random.default_rng(3)
    img = rng.random((16, 16)) * 0.5
    k = 0.25
    assert fft_distance(img, img + k) == pytest.approx(k, rel=1e-9)


def test_fft_distance_metric_axioms():
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = rng.random((8, 8))
        b = rng.random((8, 8))
        c = rng.random((8, 8))
        dab = fft_distance(a, b)
        dba = fft_distance(b, a)
        assert dab >= 0.0
        assert dab == pytest.approx(dba, rel=1e-9)
        # Triangle inequality, with float headroom.
        assert fft_distance(a, c) <= dab + fft_distance(b, c) + 1e-9


def test_spectrum_image_normalized():
    rng = np.random.default_rng(5)
    img = rng.random((16, 16))
    spec = spectrum_image(img)
    assert spec.shape == img.shape
    assert spec.min() >= 0.0
    assert spec.max() == 1.0
    # DC dominates for a non-negative image; fftshift centers it.
    assert spec[8, 8] == 1.0


def test_diff_map_marks_missing_red_spurious_blue():
    gt = np.ones((3, 3))
    pred = np.ones((3, 3))
    gt[0, 0] = 0.0   # ink the prediction misses
    pred[1, 1] = 0.0  # ink the reference lacks
    rgb = diff_map(gt, pred)
    assert np.array_equal(rgb[0, 0], (1.0, 0.0, 0.0))
    assert np.array_equal(rgb[1, 1], (0.0, 0.0, 1.0))
    assert np.array_equal(rgb[2, 2], (1.0, 1.0, 1.0))
    # Agreement on ink stays white.
    gt2 = np.zeros((3, 3))
    assert (diff_map(gt2, gt2) == 1.0).all()


def test_diff_map_rejects_non_binary():
    with pytest.raises(ValueError):
        diff_map(np.full((3, 3), 0.5), np.ones((3, 3)))


def test_evaluate_batch_aggregates(tmp_path):
    rng = np.random.default_rng(6)
    pred_dir = tmp_path / "pred"
    gt_dir = tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    names = ["a.png", "b.png"]
    for name in names:
        save_image(rng.random((16, 16)), pred_dir / name)
        save_image(rng.random((16, 16)), gt_dir / name)

    pairs, aggregate = evaluate_batch(pred_dir, gt_dir)
    assert [n for n, _ in pairs] == sorted(names)
    assert isinstance(aggregate, MetricReport)
    assert aggregate.ssim == pytest.approx(np.mean([r.ssim for _, r in pairs]))
    assert aggregate.psnr == pytest.approx(np.mean([r.psnr for _, r in pairs]))
    assert aggregate.fft_distance == pytest.approx(np.mean([r.fft_distance for _, r in pairs]))


def test_evaluate_batch_requires_matching_names(tmp_path):
    pred_dir = tmp_path / "pred"
    gt_dir = tmp_path / "gt"
    pred_dir.mkdir()
    gt_dir.mkdir()
    save_image(np.zeros((16, 16)), pred_dir / "a.png")
    save_image(np.zeros((16, 16)), gt_dir / "b.png")
    with pytest.raises(ValueError, match="unmatched"):
        evaluate_batch(pred_dir, gt_dir)


def test_evaluate_batch_rejects_empty(tmp_path):
    (tmp_path / "pred").mkdir()
    (tmp_path / "gt").mkdir()
    with pytest.raises(ValueError, match="no images"):
        evaluate_batch(tmp_path / "pred", tmp_path / "gt")
