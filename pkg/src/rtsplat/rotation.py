"""Quaternion-parameterized tangent frames and their derivatives.

Quaternions are stored as (w, x, y, z) and need not be pre-normalized; every
function normalizes internally and the backward accounts for the
normalization Jacobian.
"""

import numpy as np

from .errors import InvalidParameterError


def normalize_quaternions(q):
    """Return (unit quaternions, original norms). Raises on zero quaternions."""
    q = np.asarray(q, dtype=np.float64)
    norms = np.linalg.norm(q, axis=-1)
    if np.any(norms < 1e-12):
        bad = int(np.argmax(norms < 1e-12))
        raise InvalidParameterError(f"surfel {bad}: zero quaternion")
    return q / norms[..., None], norms


def quat_to_frame(q):
    """Quaternions (N, 4) -> rotation matrices (N, 3, 3).

    Columns are the tangent frame (t_u, t_v, n); n = t_u x t_v for any unit
    quaternion, so the frame is right-handed and orthonormal.
    """
    qn, _ = normalize_quaternions(q)
    w, x, y, z = qn[..., 0], qn[..., 1], qn[..., 2], qn[..., 3]
    R = np.empty(qn.shape[:-1] + (3, 3), dtype=np.float64)
    R[..., 0, 0] = 1 - 2 * (y * y + z * z)
    R[..., 0, 1] = 2 * (x * y - w * z)
    R[..., 0, 2] = 2 * (x * z + w * y)
    R[..., 1, 0] = 2 * (x * y + w * z)
    R[..., 1, 1] = 1 - 2 * (x * x + z * z)
    R[..., 1, 2] = 2 * (y * z - w * x)
    R[..., 2, 0] = 2 * (x * z - w * y)
    R[..., 2, 1] = 2 * (y * z + w * x)
    R[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def quat_to_frame_backward(q, dL_dR):
    """Pull gradients on the rotation matrices back onto raw quaternions.

    q: (N, 4) raw quaternions, dL_dR: (N, 3, 3). Returns (N, 4).
    """
    q = np.asarray(q, dtype=np.float64)
    qn, norms = normalize_quaternions(q)
    w, x, y, z = qn[..., 0], qn[..., 1], qn[..., 2], qn[..., 3]
    g = dL_dR

    # dR/d(unit quaternion); each matrix entry is a quadratic in (w,x,y,z).
    dw = 2 * (
        -z * g[..., 0, 1] + y * g[..., 0, 2]
        + z * g[..., 1, 0] - x * g[..., 1, 2]
        - y * g[..., 2, 0] + x * g[..., 2, 1]
    )
    dx = 2 * (
        y * g[..., 0, 1] + z * g[..., 0, 2]
        + y * g[..., 1, 0] - 2 * x * g[..., 1, 1] - w * g[..., 1, 2]
        + z * g[..., 2, 0] + w * g[..., 2, 1] - 2 * x * g[..., 2, 2]
    )
    dy = 2 * (
        -2 * y * g[..., 0, 0] + x * g[..., 0, 1] + w * g[..., 0, 2]
        + x * g[..., 1, 0] + z * g[..., 1, 2]
        - w * g[..., 2, 0] + z * g[..., 2, 1] - 2 * y * g[..., 2, 2]
    )
    dz = 2 * (
        -2 * z * g[..., 0, 0] - w * g[..., 0, 1] + x * g[..., 0, 2]
        + w * g[..., 1, 0] - 2 * z * g[..., 1, 1] + y * g[..., 1, 2]
        + x * g[..., 2, 0] + y * g[..., 2, 1]
    )
    d_unit = np.stack([dw, dx, dy, dz], axis=-1)

    # Through the normalization: d(q/|q|) = (I - qn qn^T) / |q|.
    proj = d_unit - qn * np.sum(d_unit * qn, axis=-1, keepdims=True)
    return proj / norms[..., None]


def random_unit_quaternions(n, rng):
    """Uniform random unit quaternions (Shoemake's subgroup algorithm)."""
    u1, u2, u3 = rng.random(n), rng.random(n), rng.random(n)
    a, b = np.sqrt(1 - u1), np.sqrt(u1)
    return np.stack(
        [
            a * np.sin(2 * np.pi * u2),
            a * np.cos(2 * np.pi * u2),
            b * np.sin(2 * np.pi * u3),
            b * np.cos(2 * np.pi * u3),
        ],
        axis=-1,
    )
