"""Independent reference implementations used to pin expected values.

Everything here is written as plain per pixel Python, kept deliberately
separate from the library's vectorized code paths.
"""
from __future__ import annotations

import math

import numpy as np


def naive_etf_refine(tangents, magnitude, radius, eta):
    """One flow smoothing pass, literal double loop form."""
    t = np.asarray(tangents, dtype=np.float64)
    g = np.asarray(magnitude, dtype=np.float64)
    h, w = g.shape
    out = np.zeros_like(t)
    for y in range(h):
        for x in range(w):
            cx, cy = t[y, x]
            center_zero = cx == 0.0 and cy == 0.0
            sx = sy = 0.0
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    if dx * dx + dy * dy >= radius * radius:
                        continue  # w_s box gate, strict
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    nx, ny = t[yy, xx]
                    wm = 0.5 * (1.0 + math.tanh(eta * (g[yy, xx] - g[y, x])))
                    if center_zero:
                        sx += wm * nx
                        sy += wm * ny
                    else:
                        dot = cx * nx + cy * ny
                        phi = 1.0 if dot >= 0.0 else -1.0
                        wd = abs(dot)
                        sx += phi * wd * wm * nx
                        sy += phi * wd * wm * ny
            n = math.hypot(sx, sy)
            if n > 1e-12:
                out[y, x] = (sx / n, sy / n)
            else:
                out[y, x] = (cx, cy)
    return out


def _bilinear_scalar(plane, x, y):
    h, w = plane.shape
    x = min(max(x, 0.0), w - 1.0)
    y = min(max(y, 0.0), h - 1.0)
    x0 = int(math.floor(x))
    y0 = int(math.floor(y))
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = plane[y0, x0] + fx * (plane[y0, x1] - plane[y0, x0])
    bot = plane[y1, x0] + fx * (plane[y1, x1] - plane[y1, x0])
    return top + fy * (bot - top)


def dense_fdog_response(gray, tangents, sigma_c, sigma_m, rho):
    """Per pixel streamline DoG accumulation, scalar loops only."""
    img = np.asarray(gray, dtype=np.float64) * 255.0
    t = np.asarray(tangents, dtype=np.float64)
    h, w = img.shape
    sigma_s = 1.6 * sigma_c
    big_t = math.ceil(3.0 * sigma_s)
    big_s = math.ceil(3.0 * sigma_m)

    def pdf(u, sigma):
        return math.exp(-(u * u) / (2.0 * sigma * sigma)) / (math.sqrt(2.0 * math.pi) * sigma)

    dog = [pdf(u, sigma_c) - rho * pdf(u, sigma_s) for u in range(-big_t, big_t + 1)]
    gm = [pdf(u, sigma_m) for u in range(-big_s, big_s + 1)]

    tx = t[..., 0]
    ty = t[..., 1]

    def cross_sum(px, py, dx, dy):
        nx, ny = -dy, dx
        acc = 0.0
        for k in range(-big_t, big_t + 1):
            acc += dog[k + big_t] * _bilinear_scalar(img, px + k * nx, py + k * ny)
        return acc

    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            vx, vy = tx[y, x], ty[y, x]
            n = math.hypot(vx, vy)
            if n < 1e-8:
                fx, fy = 1.0, 0.0  # fallback frame
                advect = False
            else:
                fx, fy = vx / n, vy / n
                advect = True
            total = gm[big_s] * cross_sum(float(x), float(y), fx, fy)
            if advect:
                for sign in (1.0, -1.0):
                    px, py = float(x), float(y)
                    dx, dy = sign * fx, sign * fy
                    for s in range(1, big_s + 1):
                        mx, my = px + 0.5 * dx, py + 0.5 * dy
                        ux = _bilinear_scalar(tx, mx, my)
                        uy = _bilinear_scalar(ty, mx, my)
                        un = math.hypot(ux, uy)
                        if un < 1e-8:
                            break
                        ux, uy = ux / un, uy / un
                        if ux * dx + uy * dy < 0.0:
                            ux, uy = -ux, -uy
                        npx, npy = px + ux, py + uy
                        if not (0.0 <= npx <= w - 1.0 and 0.0 <= npy <= h - 1.0):
                            break
                        px, py, dx, dy = npx, npy, ux, uy
                        total += gm[big_s + s] * cross_sum(px, py, dx, dy)
            out[y, x] = total
    return out
