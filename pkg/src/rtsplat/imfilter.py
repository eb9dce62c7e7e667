"""Small image-filtering kernels with exact adjoints.

All filters use replicate (edge) padding. The adjoints are the exact
transposes of pad-then-correlate, including the border fold, so analytic
backward passes built on them match finite differences to machine precision.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def gaussian_kernel_1d(size=11, sigma=1.5):
    """Normalized 1D Gaussian taps."""
    t = np.arange(size, dtype=np.float64) - (size - 1) / 2
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def conv1d_edge(x, k, axis):
    """Same-size correlation along `axis` with edge padding."""
    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, -1)
    r = len(k) // 2
    pad = [(0, 0)] * (x.ndim - 1) + [(r, r)]
    xp = np.pad(x, pad, mode="edge")
    win = sliding_window_view(xp, len(k), axis=-1)
    out = win @ np.asarray(k, dtype=np.float64)
    return np.moveaxis(out, -1, axis)


def conv1d_edge_adjoint(gy, k, axis):
    """Exact adjoint of conv1d_edge with respect to its input."""
    gy = np.moveaxis(np.asarray(gy, dtype=np.float64), axis, -1)
    k = np.asarray(k, dtype=np.float64)
    L = len(k)
    r = L // 2
    n = gy.shape[-1]
    pad = [(0, 0)] * (gy.ndim - 1) + [(L - 1, L - 1)]
    gyp = np.pad(gy, pad, mode="constant")
    win = sliding_window_view(gyp, L, axis=-1)
    gxp = win @ k[::-1]  # gradient w.r.t. the padded input, length n + 2r
    gx = gxp[..., r:r + n].copy()
    gx[..., 0] += gxp[..., :r].sum(axis=-1)
    gx[..., -1] += gxp[..., r + n:].sum(axis=-1)
    return np.moveaxis(gx, -1, axis)


def filter_sep_edge(img, k):
    """Separable 2D filter over the leading two (H, W) axes."""
    return conv1d_edge(conv1d_edge(img, k, axis=0), k, axis=1)


def filter_sep_edge_adjoint(g, k):
    return conv1d_edge_adjoint(conv1d_edge_adjoint(g, k, axis=1), k, axis=0)


_BOX3 = np.full(3, 1.0 / 3.0)


def box_variance_3x3(img):
    """Per-pixel population variance over the 3x3 neighborhood.

    img: (H, W) or (H, W, C); variance is computed per channel and averaged
    over channels. Borders use replicate padding.
    """
    img = np.asarray(img, dtype=np.float64)
    mean = filter_sep_edge(img, _BOX3)
    meansq = filter_sep_edge(img * img, _BOX3)
    var = np.maximum(meansq - mean * mean, 0.0)
    if var.ndim == 3:
        var = var.mean(axis=2)
    return var


def central_diff_edge(x, axis):
    """Central difference (f[i+1] - f[i-1]) / 2 with replicate padding."""
    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, -1)
    pad = [(0, 0)] * (x.ndim - 1) + [(1, 1)]
    xp = np.pad(x, pad, mode="edge")
    out = (xp[..., 2:] - xp[..., :-2]) / 2.0
    return np.moveaxis(out, -1, axis)


def central_diff_edge_adjoint(g, axis):
    g = np.moveaxis(np.asarray(g, dtype=np.float64), axis, -1)
    n = g.shape[-1]
    gxp = np.zeros(g.shape[:-1] + (n + 2,), dtype=np.float64)
    gxp[..., 2:] += g / 2.0
    gxp[..., :-2] -= g / 2.0
    gx = gxp[..., 1:1 + n].copy()
    gx[..., 0] += gxp[..., 0]
    gx[..., -1] += gxp[..., -1]
    return np.moveaxis(gx, -1, axis)
