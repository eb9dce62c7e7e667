"""Pinhole camera model.

Conventions: world-to-camera rigid transform (R, t) with x_cam = R @ x_world
+ t; the camera looks down +z in camera space and depth is camera-space z.
Pixel (i, j) has its center at (i + 0.5, j + 0.5) in intrinsic coordinates.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


@dataclass
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=np.float64).reshape(3, 3)
        self.t = np.asarray(self.t, dtype=np.float64).reshape(3)
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidParameterError("focal lengths must be positive")
        if np.max(np.abs(self.R @ self.R.T - np.eye(3))) > 1e-6:
            raise InvalidParameterError("camera rotation is not orthonormal")

    @property
    def origin(self):
        """Camera center in world coordinates."""
        return -self.R.T @ self.t

    def to_camera(self, pts):
        return np.asarray(pts, dtype=np.float64) @ self.R.T + self.t

    def ray_grid(self):
        """Per-pixel unit ray directions.

        Returns (dirs_world (H, W, 3), dirs_cam (H, W, 3), kappa (H, W)) where
        kappa converts ray parameter t to camera-space depth (depth = t * kappa).
        """
        xs = (np.arange(self.width) + 0.5 - self.cx) / self.fx
        ys = (np.arange(self.height) + 0.5 - self.cy) / self.fy
        gx, gy = np.meshgrid(xs, ys)
        d = np.stack([gx, gy, np.ones_like(gx)], axis=-1)
        inv_norm = 1.0 / np.linalg.norm(d, axis=-1)
        d_cam = d * inv_norm[..., None]
        d_world = d_cam @ self.R  # R^T applied to each row
        return d_world, d_cam, inv_norm

    def backproject_dirs(self):
        """Unnormalized camera-space directions k with x_cam = depth * k."""
        xs = (np.arange(self.width) + 0.5 - self.cx) / self.fx
        ys = (np.arange(self.height) + 0.5 - self.cy) / self.fy
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx, gy, np.ones_like(gx)], axis=-1)


def look_at(eye, target, up=(0.0, 1.0, 0.0)):
    """World-to-camera transform for a camera at `eye` looking at `target`."""
    eye = np.asarray(eye, dtype=np.float64)
    fwd = np.asarray(target, dtype=np.float64) - eye
    n = np.linalg.norm(fwd)
    if n < 1e-12:
        raise InvalidParameterError("look_at: eye equals target")
    fwd = fwd / n
    right = np.cross(np.asarray(up, dtype=np.float64), fwd)
    rn = np.linalg.norm(right)
    if rn < 1e-12:
        raise InvalidParameterError("look_at: view direction parallel to up")
    right = right / rn
    down = np.cross(fwd, right)
    R = np.stack([right, down, fwd], axis=0)
    return R, -R @ eye


def arc_cameras(n_views, radius, arc_degrees, target, height, intrinsics):
    """Cameras spread on a horizontal arc, all looking at `target`."""
    fx, fy, cx, cy, w, h = intrinsics
    cams = []
    angles = np.linspace(-np.radians(arc_degrees) / 2,
                         np.radians(arc_degrees) / 2, n_views)
    for a in angles:
        eye = np.array([radius * np.sin(a), height, -radius * np.cos(a)])
        R, t = look_at(eye, target)
        cams.append(Camera(fx, fy, cx, cy, w, h, R, t))
    return cams
