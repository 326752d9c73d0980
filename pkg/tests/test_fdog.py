"""Flow guided DoG rendering: response, thresholding, control."""
import math

import numpy as np
import pytest

from flowline.etf import EtfParams, compute_etf
from flowline.fdog import (
    ANCHOR_LEVELS,
    FdogParams,
    alpha_to_params,
    fdog_response,
    render_line_drawing,
    render_with_lcm,
    threshold_response,
)
from flowline.vectorfield import FlowField

from helpers import count_ink_components, mean_stroke_width, step_image, textured_image, two_stripe_image
from oracles import dense_fdog_response


def test_alpha_mapping_endpoints():
    lo = alpha_to_params(0.0)
    hi = alpha_to_params(1.0)
    assert (lo.sigma_c, lo.sigma_m, lo.tau) == (1.0, 2.0, 0.6)
    assert (hi.sigma_c, hi.sigma_m) == (3.0, 6.0)
    assert hi.tau == pytest.approx(0.4, rel=1e-12)
    assert lo.rho == hi.rho == 0.99
    assert lo.passes == hi.passes == 2


def test_derived_kernel_extents():
    p = alpha_to_params(0.5)
    assert p.sigma_s == pytest.approx(1.6 * p.sigma_c)
    assert p.cross_halfwidth == math.ceil(3.0 * p.sigma_s)
    assert p.flow_halflength == math.ceil(3.0 * p.sigma_m)


def test_params_validation():
    with pytest.raises(ValueError):
        FdogParams(sigma_c=0.0, sigma_m=2.0, tau=0.5)
    with pytest.raises(ValueError):
        FdogParams(sigma_c=1.0, sigma_m=2.0, tau=1.0)
    with pytest.raises(ValueError):
        FdogParams(sigma_c=1.0, sigma_m=2.0, tau=0.5, rho=0.0)
    with pytest.raises(ValueError):
        FdogParams(sigma_c=1.0, sigma_m=2.0, tau=0.5, passes=0)
    with pytest.raises(ValueError):
        alpha_to_params(1.5)


def test_response_matches_dense_oracle():
    img = step_image(20, 20)
    field = compute_etf(img, EtfParams(kernel_radius=3, eta=1.0, iterations=2))
    p = alpha_to_params(0.3)
    ours = fdog_response(img, field, p)
    ref = dense_fdog_response(img, field.tangents, p.sigma_c, p.sigma_m, p.rho)
    assert np.abs(ours - ref).max() < 1e-9


def test_response_matches_dense_oracle_with_zero_tangents():
    # A flat image gives an all zero field: every pixel takes the
    # fallback frame and no streamline advects.
    img = np.full((16, 16), 0.5)
    field = compute_etf(img)
    assert not field.tangents.any()
    p = alpha_to_params(0.5)
    ours = fdog_response(img, field, p)
    ref = dense_fdog_response(img, field.tangents, p.sigma_c, p.sigma_m, p.rho)
    assert np.abs(ours - ref).max() < 1e-9
    assert (ours >= 0.0).all()


def test_threshold_rule():
    resp = np.array([[-3.0, -0.1], [0.5, 0.0]])
    out = threshold_response(resp, tau=0.5)
    # 1 + tanh(-3) = 0.005 < 0.5: ink. 1 + tanh(-0.1) = 0.9: paper.
    # Non-negative responses are always paper.
    assert np.array_equal(out, [[0.0, 1.0], [1.0, 1.0]])
    # A looser threshold admits the weak negative response.
    out95 = threshold_response(resp, tau=0.95)
    assert np.array_equal(out95, [[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        threshold_response(resp, tau=0.0)


def test_flat_image_renders_blank():
    img = np.full((24, 24), 0.7)
    field = compute_etf(img)
    for alpha in ANCHOR_LEVELS:
        drawing = render_line_drawing(img, field, alpha)
        assert np.array_equal(drawing, np.ones_like(img))


def test_render_output_is_binary_and_inked():
    img = step_image()
    field = compute_etf(img)
    drawing = render_line_drawing(img, field, 0.5)
    assert set(np.unique(drawing)) <= {0.0, 1.0}
    assert (drawing == 0.0).any()


def test_stroke_width_grows_with_alpha():
    img = step_image()
    field = compute_etf(img)
    widths = []
    for alpha in ANCHOR_LEVELS:
        drawing = render_line_drawing(img, field, alpha)
        assert (drawing == 0.0).any(axis=1).all()  # every row crossed
        widths.append(mean_stroke_width(drawing))
    assert all(b > a for a, b in zip(widths, widths[1:]))


def test_texture_suppression_grows_with_alpha():
    img = textured_image()
    field = compute_etf(img)
    counts = [count_ink_components(render_line_drawing(img, field, a)) for a in ANCHOR_LEVELS]
    assert counts[0] > counts[-1]


def test_passes_accumulate_ink():
    img = two_stripe_image()
    field = compute_etf(img)
    one = render_line_drawing(img, field, 0.5, passes=1)
    two = render_line_drawing(img, field, 0.5, passes=2)
    # Superimposing ink before the second pass can only strengthen edges.
    assert (two == 0.0).sum() >= (one == 0.0).sum()
    assert not np.array_equal(one, two)


def test_lcm_constant_at_anchor_matches_scalar():
    img = two_stripe_image()
    field = compute_etf(img)
    for alpha in (0.1, 0.5, 0.9):
        scalar = render_line_drawing(img, field, alpha)
        control = render_with_lcm(img, field, np.full(img.shape, alpha))
        assert np.array_equal(scalar, control)


def test_lcm_clips_to_anchor_range():
    img = textured_image(48)
    field = compute_etf(img)
    assert np.array_equal(
        render_with_lcm(img, field, np.zeros(img.shape)),
        render_line_drawing(img, field, ANCHOR_LEVELS[0]),
    )
    assert np.array_equal(
        render_with_lcm(img, field, np.ones(img.shape)),
        render_line_drawing(img, field, ANCHOR_LEVELS[-1]),
    )


def test_lcm_blend_snaps_to_nearer_anchor():
    img = textured_image(48)
    field = compute_etf(img)
    r01 = render_line_drawing(img, field, 0.1)
    r03 = render_line_drawing(img, field, 0.3)
    assert not np.array_equal(r01, r03)
    assert np.array_equal(render_with_lcm(img, field, np.full(img.shape, 0.15)), r01)
    assert np.array_equal(render_with_lcm(img, field, np.full(img.shape, 0.25)), r03)


def test_lcm_blend_bounded_by_anchor_renders():
    img = textured_image(48)
    field = compute_etf(img)
    ink = lambda d: d == 0.0
    r01 = render_line_drawing(img, field, 0.1)
    r03 = render_line_drawing(img, field, 0.3)
    mid = render_with_lcm(img, field, np.full(img.shape, 0.2))
    assert ((ink(r01) & ink(r03)) <= ink(mid)).all()
    assert (ink(mid) <= (ink(r01) | ink(r03))).all()


def test_lcm_split_control():
    img = two_stripe_image()
    field = compute_etf(img)
    control = np.full(img.shape, 0.1)
    control[:, img.shape[1] // 2 :] = 0.9
    drawing = render_with_lcm(img, field, control)
    left = mean_stroke_width(drawing, cols=slice(0, 32))
    right = mean_stroke_width(drawing, cols=slice(32, 64))
    assert 0.0 < left < right


def test_lcm_rejects_bad_control():
    img = two_stripe_image()
    field = compute_etf(img)
    with pytest.raises(ValueError):
        render_with_lcm(img, field, np.full((8, 8), 0.5))  # shape mismatch
    with pytest.raises(ValueError):
        render_with_lcm(img, field, np.full(img.shape, -0.2))
    with pytest.raises(ValueError):
        render_with_lcm(img, field, np.full(img.shape, 1.4))


def test_field_shape_must_match_image():
    img = step_image(16, 16)
    other = compute_etf(step_image(20, 20))
    with pytest.raises(ValueError):
        render_line_drawing(img, other, 0.5)
    with pytest.raises(ValueError):
        fdog_response(img, other, alpha_to_params(0.5))
