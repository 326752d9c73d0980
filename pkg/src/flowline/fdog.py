"""Flow guided difference-of-Gaussians line rendering.

One rendering pass filters the grayscale image with a one dimensional
DoG across the flow (along the local normal) and accumulates the
filtered values along flow streamlines with a Gaussian in arc length:

    H(x) = sum_s G_m(s) * sum_t (G_c(t) - rho * G_s(t)) * I(l(x, s) + t * n_s)

where l(x, s) walks the streamline through x in unit steps (midpoint
advection with bilinear field sampling) and n_s is the unit normal at
the local tangent. Streamlines stop at the image border or at a zero
tangent sample; pixels whose own tangent is zero keep the image axes
as fallback frame and do not advect. Pixel lookups are bilinear with
clamped coordinates. A pixel is ink iff H < 0 and 1 + tanh(H) < tau.

The response is computed on the 8 bit intensity scale (gray * 255):
genuine edges then saturate the tanh and a threshold tau in (0, 1)
separates weak from strong responses. On the unit scale the response
never leaves the linear region of the tanh and no tau below 1 can
produce ink.

The scalar control value alpha in [0, 1] maps to kernel widths and
threshold; small alpha keeps lines thin and detailed, large alpha
makes them thick, smooth and continuous. A control matrix applies
alpha per pixel by blending full renders at five anchor levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .raster import to_grayscale
from .validation import as_control_matrix, as_image, check_alpha, check_field_matches
from .vectorfield import FlowField

__all__ = [
    "ANCHOR_LEVELS",
    "FdogParams",
    "alpha_to_params",
    "fdog_response",
    "threshold_response",
    "render_line_drawing",
    "render_with_lcm",
]

ANCHOR_LEVELS = (0.1, 0.3, 0.5, 0.7, 0.9)

_EPS_TANGENT = 1e-8
_INTENSITY_SCALE = 255.0


@dataclass(frozen=True)
class FdogParams:
    sigma_c: float
    sigma_m: float
    tau: float
    rho: float = 0.99
    passes: int = 2

    def __post_init__(self):
        if not (self.sigma_c > 0.0 and self.sigma_m > 0.0):
            raise ValueError("sigma_c and sigma_m must be positive")
        if not (0.0 < self.tau < 1.0):
            raise ValueError(f"tau must be in (0, 1), got {self.tau!r}")
        if not (0.0 < self.rho <= 1.0):
            raise ValueError(f"rho must be in (0, 1], got {self.rho!r}")
        if int(self.passes) != self.passes or self.passes < 1:
            raise ValueError(f"passes must be a positive integer, got {self.passes!r}")

    @property
    def sigma_s(self) -> float:
        """Surround width of the DoG, fixed at 1.6 sigma_c."""
        return 1.6 * self.sigma_c

    @property
    def cross_halfwidth(self) -> int:
        return math.ceil(3.0 * self.sigma_s)

    @property
    def flow_halflength(self) -> int:
        return math.ceil(3.0 * self.sigma_m)


def alpha_to_params(alpha: float) -> FdogParams:
    """Map a control value in [0, 1] onto rendering parameters."""
    a = check_alpha(alpha)
    return FdogParams(
        sigma_c=1.0 + 2.0 * a,
        sigma_m=2.0 + 4.0 * a,
        tau=0.6 - 0.2 * a,
    )


def _gauss(halfwidth: int, sigma: float) -> np.ndarray:
    x = np.arange(-halfwidth, halfwidth + 1, dtype=np.float64)
    return np.exp(-(x * x) / (2.0 * sigma * sigma)) / (math.sqrt(2.0 * math.pi) * sigma)


def _bilinear(plane: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    top = plane[y0, x0] + fx * (plane[y0, x1] - plane[y0, x0])
    bot = plane[y1, x0] + fx * (plane[y1, x1] - plane[y1, x0])
    return top + fy * (bot - top)


def fdog_response(gray, field: FlowField, params: FdogParams) -> np.ndarray:
    """Accumulated DoG response H for every pixel (float64, 8 bit scale)."""
    g = np.asarray(gray, dtype=np.float64)
    if g.ndim != 2:
        raise ValueError(f"expected single channel image, got shape {g.shape}")
    check_field_matches(field, g.shape)

    img = g * _INTENSITY_SCALE
    tx = field.tangents[..., 0]
    ty = field.tangents[..., 1]
    h, w = g.shape
    big_t = params.cross_halfwidth
    big_s = params.flow_halflength
    dog = _gauss(big_t, params.sigma_c) - params.rho * _gauss(big_t, params.sigma_s)
    gm = _gauss(big_s, params.sigma_m)

    def cross(px, py, dirx, diry):
        # DoG along the unit normal of the local direction.
        nx, ny = -diry, dirx
        acc = np.zeros_like(px)
        for t in range(-big_t, big_t + 1):
            acc += dog[t + big_t] * _bilinear(img, px + t * nx, py + t * ny)
        return acc

    xs0, ys0 = np.meshgrid(
        np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64)
    )
    norm0 = np.hypot(tx, ty)
    zero0 = norm0 < _EPS_TANGENT
    # Fallback frame for zero tangents: x axis tangent, y axis normal.
    f0x = np.where(zero0, 1.0, tx / np.where(zero0, 1.0, norm0))
    f0y = np.where(zero0, 0.0, ty / np.where(zero0, 1.0, norm0))

    response = gm[big_s] * cross(xs0, ys0, f0x, f0y)

    for sign in (1.0, -1.0):
        px = xs0.copy()
        py = ys0.copy()
        dx = sign * f0x
        dy = sign * f0y
        alive = ~zero0
        for s in range(1, big_s + 1):
            midx = px + 0.5 * dx
            midy = py + 0.5 * dy
            vx = _bilinear(tx, midx, midy)
            vy = _bilinear(ty, midx, midy)
            vn = np.hypot(vx, vy)
            alive = alive & (vn >= _EPS_TANGENT)
            vsafe = np.where(vn < _EPS_TANGENT, 1.0, vn)
            vx = vx / vsafe
            vy = vy / vsafe
            flip = (vx * dx + vy * dy) < 0.0
            vx = np.where(flip, -vx, vx)
            vy = np.where(flip, -vy, vy)
            nxp = px + vx
            nyp = py + vy
            alive = alive & (nxp >= 0.0) & (nxp <= w - 1.0) & (nyp >= 0.0) & (nyp <= h - 1.0)
            px = np.where(alive, nxp, px)
            py = np.where(alive, nyp, py)
            dx = np.where(alive, vx, dx)
            dy = np.where(alive, vy, dy)
            if not alive.any():
                break
            contrib = cross(px, py, dx, dy)
            response += np.where(alive, gm[big_s + s] * contrib, 0.0)
    return response


def threshold_response(response: np.ndarray, tau: float) -> np.ndarray:
    """Binarize a response: ink (0) iff H < 0 and 1 + tanh(H) < tau."""
    if not (0.0 < tau < 1.0):
        raise ValueError(f"tau must be in (0, 1), got {tau!r}")
    resp = np.asarray(response, dtype=np.float64)
    ink = (resp < 0.0) & (1.0 + np.tanh(resp) < tau)
    return np.where(ink, 0.0, 1.0)


def render_line_drawing(img, field: FlowField, alpha: float, passes: int | None = None) -> np.ndarray:
    """Render a binary line drawing at a single control value.

    Runs ``passes`` rounds of response, threshold, and pointwise-min
    superimposition of the ink onto the working grayscale image; the
    drawing of the final round is returned.
    """
    params = alpha_to_params(alpha)
    if passes is not None:
        params = replace(params, passes=passes)
    gray = to_grayscale(as_image(img))
    check_field_matches(field, gray.shape)
    work = gray
    drawing = np.ones_like(gray)
    for _ in range(params.passes):
        response = fdog_response(work, field, params)
        drawing = threshold_response(response, params.tau)
        work = np.minimum(work, drawing)
    return drawing


def render_with_lcm(img, field: FlowField, lcm, passes: int | None = None) -> np.ndarray:
    """Render with a per pixel control matrix.

    Anchor renders at the five levels bracket each pixel's alpha; the
    two bracketing binary drawings are blended linearly and the result
    re-binarized at 0.5. Only the anchors actually referenced are
    rendered. A control matrix constant at an anchor level reproduces
    the scalar render of that level bit for bit.
    """
    gray = to_grayscale(as_image(img))
    control = as_control_matrix(lcm, gray.shape)
    check_field_matches(field, gray.shape)

    lo_level = ANCHOR_LEVELS[0]
    step = ANCHOR_LEVELS[1] - ANCHOR_LEVELS[0]
    a = np.clip(control, lo_level, ANCHOR_LEVELS[-1])
    pos = (a - lo_level) / step
    idx = np.clip(np.floor(pos).astype(int), 0, len(ANCHOR_LEVELS) - 2)
    weight = np.clip(pos - idx, 0.0, 1.0)
    hi_idx = np.where(weight > 0.0, idx + 1, idx)

    renders: dict[int, np.ndarray] = {}
    for i in np.union1d(np.unique(idx), np.unique(hi_idx)):
        renders[int(i)] = render_line_drawing(img, field, ANCHOR_LEVELS[int(i)], passes)

    lo = np.zeros_like(gray)
    hi = np.zeros_like(gray)
    for i, drawing in renders.items():
        lo = np.where(idx == i, drawing, lo)
        hi = np.where(hi_idx == i, drawing, hi)
    soft = lo + weight * (hi - lo)
    return np.where(soft < 0.5, 0.0, 1.0)
