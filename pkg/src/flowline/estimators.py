"""Scikit-learn style entry points for the classical pipeline.

Both transformers are stateless: ``fit`` only validates parameters, and
``transform`` accepts a single image buffer or a list of them,
returning a matching single result or list.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .etf import EtfParams, compute_etf
from .fdog import render_line_drawing, render_with_lcm
from .validation import check_alpha

__all__ = ["EdgeTangentFlow", "LineDrawingGenerator"]


def _is_batch(X) -> bool:
    return isinstance(X, (list, tuple))


class EdgeTangentFlow(BaseEstimator, TransformerMixin):
    """Transformer from images to tangent flow fields."""

    def __init__(self, kernel_radius: int = 5, eta: float = 1.0, iterations: int = 3):
        self.kernel_radius = kernel_radius
        self.eta = eta
        self.iterations = iterations

    def _params(self) -> EtfParams:
        return EtfParams(
            kernel_radius=self.kernel_radius,
            eta=self.eta,
            iterations=self.iterations,
        )

    def fit(self, X=None, y=None):
        self._params()
        return self

    def transform(self, X):
        params = self._params()
        if _is_batch(X):
            return [compute_etf(np.asarray(img), params) for img in X]
        return compute_etf(np.asarray(X), params)


class LineDrawingGenerator(BaseEstimator, TransformerMixin):
    """Transformer from images to binary line drawings.

    ``alpha`` sets a global detail level; ``control_matrix`` (a per
    pixel alpha plane matching the image size) overrides it when given.
    """

    def __init__(
        self,
        alpha: float = 0.5,
        control_matrix=None,
        passes: int = 2,
        kernel_radius: int = 5,
        eta: float = 1.0,
        iterations: int = 3,
    ):
        self.alpha = alpha
        self.control_matrix = control_matrix
        self.passes = passes
        self.kernel_radius = kernel_radius
        self.eta = eta
        self.iterations = iterations

    def _etf_params(self) -> EtfParams:
        return EtfParams(
            kernel_radius=self.kernel_radius,
            eta=self.eta,
            iterations=self.iterations,
        )

    def fit(self, X=None, y=None):
        self._etf_params()
        if self.control_matrix is None:
            check_alpha(self.alpha)
        if int(self.passes) != self.passes or self.passes < 1:
            raise ValueError(f"passes must be a positive integer, got {self.passes!r}")
        return self

    def transform(self, X):
        self.fit()
        if _is_batch(X):
            return [self._render(np.asarray(img)) for img in X]
        return self._render(np.asarray(X))

    def _render(self, img: np.ndarray) -> np.ndarray:
        field = compute_etf(img, self._etf_params())
        if self.control_matrix is not None:
            return render_with_lcm(img, field, self.control_matrix, passes=self.passes)
        return render_line_drawing(img, field, self.alpha, passes=self.passes)
