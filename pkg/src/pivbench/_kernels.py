"""Hot numeric kernels, numba-compiled when available.

Every kernel has two implementations: an explicit-loop version compiled with
``numba.njit`` and a vectorized pure-numpy version. The active backend is
picked at import time; set ``PIVBENCH_PURE_NUMPY=1`` to force the numpy path
(the benchmark suite and CI without numba use this). Both backends keep the
same per-particle accumulation order so outputs agree to floating-point
rounding; within one backend results are bitwise reproducible.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("PIVBENCH_PURE_NUMPY", "").strip().lower() in {
    "1",
    "true",
    "yes",
}

if _FORCE_NUMPY:
    NUMBA_ENABLED = False
else:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def maybe_njit(func):
    """Compile ``func`` with njit when the numba backend is active."""
    if NUMBA_ENABLED:
        return njit(cache=True)(func)
    return func


# ---------------------------------------------------------------------------
# bilinear gather

def _bilinear_many_loops(u, v, xs, ys):
    h, w = u.shape
    n = xs.shape[0]
    out_u = np.empty(n)
    out_v = np.empty(n)
    for k in range(n):
        x = xs[k]
        if x < 0.0:
            x = 0.0
        elif x > w - 1.0:
            x = w - 1.0
        y = ys[k]
        if y < 0.0:
            y = 0.0
        elif y > h - 1.0:
            y = h - 1.0
        i0 = int(x)
        if i0 > w - 2:
            i0 = w - 2
        j0 = int(y)
        if j0 > h - 2:
            j0 = h - 2
        fx = x - i0
        fy = y - j0
        w00 = (1.0 - fx) * (1.0 - fy)
        w10 = fx * (1.0 - fy)
        w01 = (1.0 - fx) * fy
        w11 = fx * fy
        out_u[k] = (
            w00 * u[j0, i0]
            + w10 * u[j0, i0 + 1]
            + w01 * u[j0 + 1, i0]
            + w11 * u[j0 + 1, i0 + 1]
        )
        out_v[k] = (
            w00 * v[j0, i0]
            + w10 * v[j0, i0 + 1]
            + w01 * v[j0 + 1, i0]
            + w11 * v[j0 + 1, i0 + 1]
        )
    return out_u, out_v


def bilinear_many_numpy(u, v, xs, ys):
    """Sample (u, v) grids at many points, clamped to the valid domain."""
    h, w = u.shape
    x = np.clip(xs, 0.0, w - 1.0)
    y = np.clip(ys, 0.0, h - 1.0)
    i0 = np.minimum(x.astype(np.int64), w - 2)
    j0 = np.minimum(y.astype(np.int64), h - 2)
    fx = x - i0
    fy = y - j0
    w00 = (1.0 - fx) * (1.0 - fy)
    w10 = fx * (1.0 - fy)
    w01 = (1.0 - fx) * fy
    w11 = fx * fy
    out_u = (
        w00 * u[j0, i0]
        + w10 * u[j0, i0 + 1]
        + w01 * u[j0 + 1, i0]
        + w11 * u[j0 + 1, i0 + 1]
    )
    out_v = (
        w00 * v[j0, i0]
        + w10 * v[j0, i0 + 1]
        + w01 * v[j0 + 1, i0]
        + w11 * v[j0 + 1, i0 + 1]
    )
    return out_u, out_v


bilinear_many_numba = njit(cache=True)(_bilinear_many_loops) if NUMBA_ENABLED else None
bilinear_many = bilinear_many_numba if NUMBA_ENABLED else bilinear_many_numpy


# ---------------------------------------------------------------------------
# Gaussian spot rendering
#
# Spot profile: amp * exp((-(dx^2) - dy^2) / (0.125 * d^2)), evaluated on
# pixel centers inside a square window of half-width trunc*d around the spot.

def _render_spots_loops(img, xs, ys, diameters, amps, trunc):
    h, w = img.shape
    for k in range(xs.shape[0]):
        x0 = xs[k]
        y0 = ys[k]
        d = diameters[k]
        a = amps[k]
        r = trunc * d
        denom = 0.125 * d * d
        ix0 = int(np.ceil(x0 - r))
        ix1 = int(np.floor(x0 + r))
        iy0 = int(np.ceil(y0 - r))
        iy1 = int(np.floor(y0 + r))
        if ix0 < 0:
            ix0 = 0
        if iy0 < 0:
            iy0 = 0
        if ix1 > w - 1:
            ix1 = w - 1
        if iy1 > h - 1:
            iy1 = h - 1
        for py in range(iy0, iy1 + 1):
            dy = py - y0
            dy2 = dy * dy
            for px in range(ix0, ix1 + 1):
                dx = px - x0
                img[py, px] += a * np.exp((-(dx * dx) - dy2) / denom)
    return img


def render_spots_numpy(img, xs, ys, diameters, amps, trunc):
    h, w = img.shape
    for k in range(xs.shape[0]):
        x0 = xs[k]
        y0 = ys[k]
        d = diameters[k]
        r = trunc * d
        denom = 0.125 * d * d
        ix0 = max(int(np.ceil(x0 - r)), 0)
        ix1 = min(int(np.floor(x0 + r)), w - 1)
        iy0 = max(int(np.ceil(y0 - r)), 0)
        iy1 = min(int(np.floor(y0 + r)), h - 1)
        if ix1 < ix0 or iy1 < iy0:
            continue
        dx = np.arange(ix0, ix1 + 1) - x0
        dy = np.arange(iy0, iy1 + 1) - y0
        patch = amps[k] * np.exp(
            (-(dx[None, :] ** 2) - dy[:, None] ** 2) / denom
        )
        img[iy0 : iy1 + 1, ix0 : ix1 + 1] += patch
    return img


render_spots_numba = njit(cache=True)(_render_spots_loops) if NUMBA_ENABLED else None
render_spots = render_spots_numba if NUMBA_ENABLED else render_spots_numpy


# ---------------------------------------------------------------------------
# isotropic Gaussian blob (glare): amp * exp(-(dx^2 + dy^2) / (2 sigma^2))

def _add_blob_loops(img, cx, cy, sigma, amp, trunc_sigmas):
    h, w = img.shape
    r = trunc_sigmas * sigma
    denom = 2.0 * sigma * sigma
    ix0 = int(np.ceil(cx - r))
    ix1 = int(np.floor(cx + r))
    iy0 = int(np.ceil(cy - r))
    iy1 = int(np.floor(cy + r))
    if ix0 < 0:
        ix0 = 0
    if iy0 < 0:
        iy0 = 0
    if ix1 > w - 1:
        ix1 = w - 1
    if iy1 > h - 1:
        iy1 = h - 1
    for py in range(iy0, iy1 + 1):
        dy2 = (py - cy) * (py - cy)
        for px in range(ix0, ix1 + 1):
            dx = px - cx
            img[py, px] += amp * np.exp(-(dx * dx + dy2) / denom)
    return img


def add_blob_numpy(img, cx, cy, sigma, amp, trunc_sigmas):
    h, w = img.shape
    r = trunc_sigmas * sigma
    denom = 2.0 * sigma * sigma
    ix0 = max(int(np.ceil(cx - r)), 0)
    ix1 = min(int(np.floor(cx + r)), w - 1)
    iy0 = max(int(np.ceil(cy - r)), 0)
    iy1 = min(int(np.floor(cy + r)), h - 1)
    if ix1 < ix0 or iy1 < iy0:
        return img
    dx = np.arange(ix0, ix1 + 1) - cx
    dy = np.arange(iy0, iy1 + 1) - cy
    img[iy0 : iy1 + 1, ix0 : ix1 + 1] += amp * np.exp(
        -(dx[None, :] ** 2 + dy[:, None] ** 2) / denom
    )
    return img


add_blob_numba = njit(cache=True)(_add_blob_loops) if NUMBA_ENABLED else None
add_blob = add_blob_numba if NUMBA_ENABLED else add_blob_numpy
