"""Scikit-learn style wrappers around the classical pipeline."""
import numpy as np
import pytest
from sklearn.base import clone

from flowline.estimators import EdgeTangentFlow, LineDrawingGenerator
from flowline.etf import EtfParams, compute_etf
from flowline.fdog import render_line_drawing, render_with_lcm
from flowline.vectorfield import FlowField

from helpers import step_image, two_stripe_image


def test_etf_get_params_and_clone():
    est = EdgeTangentFlow(kernel_radius=4, eta=2.0, iterations=2)
    params = est.get_params()
    assert params == {"kernel_radius": 4, "eta": 2.0, "iterations": 2}
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(iterations=1)
    assert est.get_params()["iterations"] == 1


def test_etf_transform_matches_function():
    img = step_image(20, 20)
    est = EdgeTangentFlow(kernel_radius=4, eta=2.0, iterations=2)
    out = est.fit(img).transform(img)
    ref = compute_etf(img, EtfParams(kernel_radius=4, eta=2.0, iterations=2))
    assert isinstance(out, FlowField)
    assert np.array_equal(out.tangents, ref.tangents)
    assert np.array_equal(out.magnitude, ref.magnitude)


def test_etf_transform_batch():
    imgs = [step_image(16, 16), step_image(18, 18)]
    out = EdgeTangentFlow().fit(imgs).transform(imgs)
    assert isinstance(out, list) and len(out) == 2
    assert out[0].magnitude.shape == (16, 16)
    assert out[1].magnitude.shape == (18, 18)


def test_etf_invalid_params_raise_on_fit():
    with pytest.raises(ValueError):
        EdgeTangentFlow(kernel_radius=0).fit()


def test_generator_scalar_alpha_matches_function():
    img = step_image(24, 24)
    gen = LineDrawingGenerator(alpha=0.3)
    drawing = gen.fit(img).transform(img)
    field = compute_etf(img)
    assert np.array_equal(drawing, render_line_drawing(img, field, 0.3))


def test_generator_control_matrix_matches_function():
    img = two_stripe_image(48)
    control = np.full(img.shape, 0.1)
    control[:, 24:] = 0.9
    gen = LineDrawingGenerator(control_matrix=control)
    drawing = gen.fit(img).transform(img)
    field = compute_etf(img)
    assert np.array_equal(drawing, render_with_lcm(img, field, control))


def test_generator_batch_and_clone():
    imgs = [step_image(16, 16), step_image(16, 16)]
    gen = LineDrawingGenerator(alpha=0.5, passes=1)
    out = clone(gen).fit(imgs).transform(imgs)
    assert isinstance(out, list) and len(out) == 2
    assert np.array_equal(out[0], out[1])


def test_generator_invalid_params():
    img = step_image(16, 16)
    with pytest.raises(ValueError):
        LineDrawingGenerator(alpha=1.5).fit(img)
    with pytest.raises(ValueError):
        LineDrawingGenerator(passes=0).fit(img)
    # Control matrix shape is checked at render time.
    with pytest.raises(ValueError):
        LineDrawingGenerator(control_matrix=np.full((4, 4), 0.5)).fit(img).transform(img)
