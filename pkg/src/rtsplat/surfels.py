"""Surfel primitive and its parameter activations.

Each surfel is a 2D Gaussian disk embedded in 3D. Storage is raw
(unconstrained) parameters; rendering consumes activated values:

* logistic map for everything living in [0, 1] (geometric occupancy,
  optical opacity, roughness, transmissivity, scattered color), clipped to
  [1e-6, 1 - 1e-6] so logits and cross-entropies stay finite;
* exponential map for the two tangent-plane scales;
* quaternion normalization for the tangent frame.

`SurfelCloud` is the struct-of-arrays container used everywhere;
`GaussianSurfel` is the single-record view used to build scenes by hand.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .rotation import quat_to_frame, random_unit_quaternions

ACT_CLIP = 1e-6

# (name, trailing shape); sh_color's coefficient count and the feature width
# are fixed per cloud. This order is also the checkpoint field order.
FIELD_SPECS = (
    ("positions", (3,)),
    ("rotations", (4,)),
    ("log_scales", (2,)),
    ("occupancy_raw", ()),
    ("opacity_raw", ()),
    ("sh_color", None),      # (n_sh_coeffs, 3)
    ("roughness_raw", ()),
    ("material_feature", None),  # (feature_dim,)
    ("scatter_color_raw", (3,)),
    ("transmissivity_raw", ()),
)


def sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out

def inverse_sigmoid(p):
    p = np.clip(np.asarray(p, dtype=np.float64), ACT_CLIP, 1.0 - ACT_CLIP)
    return np.log(p / (1.0 - p))


def clipped_sigmoid(x):
    """Logistic activation with clipping; returns (value, clip_mask).

    clip_mask is -1 where clamped at the floor, +1 at the ceiling, else 0.
    The mask freezes the branch for backward and for finite-difference
    re-evaluation.
    """
    s = sigmoid(x)
    mask = np.zeros(s.shape, dtype=np.int8)
    mask[s < ACT_CLIP] = -1
    mask[s > 1.0 - ACT_CLIP] = 1
    return np.clip(s, ACT_CLIP, 1.0 - ACT_CLIP), mask


def clipped_sigmoid_frozen(x, mask):
    s = sigmoid(x)
    out = np.where(mask == 0, s, np.where(mask < 0, ACT_CLIP, 1.0 - ACT_CLIP))
    return out


@dataclass
class GaussianSurfel:
    """One surfel in raw parameterization."""
    position: np.ndarray
    rotation: np.ndarray
    log_scale: np.ndarray
    occupancy_raw: float
    opacity_raw: float
    sh_color: np.ndarray
    roughness_raw: float
    material_feature: np.ndarray
    scatter_color_raw: np.ndarray
    transmissivity_raw: float


class SurfelCloud:
    """Struct-of-arrays storage for N surfels (all float64)."""

    def __init__(self, positions, rotations, log_scales, occupancy_raw,
                 opacity_raw, sh_color, roughness_raw, material_feature,
                 scatter_color_raw, transmissivity_raw):
        self.positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
        n = len(self.positions)
        self.rotations = np.asarray(rotations, dtype=np.float64).reshape(n, 4)
        self.log_scales = np.asarray(log_scales, dtype=np.float64).reshape(n, 2)
        self.occupancy_raw = np.asarray(occupancy_raw, dtype=np.float64).reshape(n)
        self.opacity_raw = np.asarray(opacity_raw, dtype=np.float64).reshape(n)
        self.sh_color = np.asarray(sh_color, dtype=np.float64).reshape(n, -1, 3)
        self.roughness_raw = np.asarray(roughness_raw, dtype=np.float64).reshape(n)
        self.material_feature = np.asarray(material_feature, dtype=np.float64).reshape(n, -1)
        self.scatter_color_raw = np.asarray(scatter_color_raw, dtype=np.float64).reshape(n, 3)
        self.transmissivity_raw = np.asarray(transmissivity_raw, dtype=np.float64).reshape(n)

    def __len__(self):
        return len(self.positions)

    @property
    def n_sh_coeffs(self):
        return self.sh_color.shape[1]

    @property
    def feature_dim(self):
        return self.material_feature.shape[1]

    def __getitem__(self, i):
        return GaussianSurfel(
            self.positions[i], self.rotations[i], self.log_scales[i],
            float(self.occupancy_raw[i]), float(self.opacity_raw[i]),
            self.sh_color[i], float(self.roughness_raw[i]),
            self.material_feature[i], self.scatter_color_raw[i],
            float(self.transmissivity_raw[i]))

    @classmethod
    def from_surfels(cls, surfels):
        return cls(
            [s.position for s in surfels],
            [s.rotation for s in surfels],
            [s.log_scale for s in surfels],
            [s.occupancy_raw for s in surfels],
            [s.opacity_raw for s in surfels],
            [s.sh_color for s in surfels],
            [s.roughness_raw for s in surfels],
            [s.material_feature for s in surfels],
            [s.scatter_color_raw for s in surfels],
            [s.transmissivity_raw for s in surfels])

    @classmethod
    def empty(cls, n, n_sh_coeffs=9, feature_dim=8):
        z = np.zeros
        return cls(z((n, 3)), np.tile([1.0, 0, 0, 0], (n, 1)), z((n, 2)),
                   z(n), z(n), z((n, n_sh_coeffs, 3)), z(n),
                   z((n, feature_dim)), z((n, 3)), z(n))

    def field_arrays(self):
        """(name, array) pairs in declared field order."""
        return [(name, getattr(self, name)) for name, _ in FIELD_SPECS]

    def copy(self):
        return SurfelCloud(*(arr.copy() for _, arr in self.field_arrays()))

    def select(self, idx):
        """New cloud holding the surfels at `idx` (indices or boolean mask)."""
        return SurfelCloud(*(arr[idx] for _, arr in self.field_arrays()))

    def append(self, other):
        return SurfelCloud(*(np.concatenate([a, b], axis=0)
                             for (_, a), (_, b) in
                             zip(self.field_arrays(), other.field_arrays())))

    def validate(self):
        """Raise InvalidParameterError naming the first offending surfel."""
        for name, arr in self.field_arrays():
            finite = np.isfinite(arr).reshape(len(self), -1).all(axis=1)
            if not finite.all():
                bad = int(np.argmin(finite))
                raise InvalidParameterError(f"surfel {bad}: non-finite {name}")
        norms = np.linalg.norm(self.rotations, axis=1)
        if np.any(norms < 1e-12):
            bad = int(np.argmax(norms < 1e-12))
            raise InvalidParameterError(f"surfel {bad}: zero quaternion")


class Activated:
    """Activated surfel attributes plus the clip masks taken at activation."""

    def __init__(self, cloud: SurfelCloud):
        cloud.validate()
        self.positions = cloud.positions
        self.sigma, self.sigma_clip = clipped_sigmoid(cloud.occupancy_raw)
        self.alpha, self.alpha_clip = clipped_sigmoid(cloud.opacity_raw)
        self.rho, self.rho_clip = clipped_sigmoid(cloud.roughness_raw)
        self.tau, self.tau_clip = clipped_sigmoid(cloud.transmissivity_raw)
        self.scatter, self.scatter_clip = clipped_sigmoid(cloud.scatter_color_raw)
        self.scales = np.exp(cloud.log_scales)
        self.frames = quat_to_frame(cloud.rotations)  # columns t_u, t_v, n
        self.feature = cloud.material_feature
        self.sh_color = cloud.sh_color

    @property
    def normals(self):
        return self.frames[:, :, 2]


def activate(cloud: SurfelCloud) -> Activated:
    """Activate every raw attribute (the scene-model `activate` operation)."""
    return Activated(cloud)


def surfel_frame(surfel: GaussianSurfel):
    """World-space orthonormal frame (t_u, t_v, n) of a single surfel."""
    R = quat_to_frame(np.asarray(surfel.rotation, dtype=np.float64)[None])[0]
    return R[:, 0], R[:, 1], R[:, 2]


def random_cloud(n, bounds_lo, bounds_hi, rng, n_sh_coeffs=9, feature_dim=8,
                 scale_range=(0.05, 0.3)):
    """Surfels scattered uniformly in an axis-aligned box (unbiased start:
    sigma = alpha = rho = tau = 0.5, gray scatter color)."""
    lo = np.asarray(bounds_lo, dtype=np.float64)
    hi = np.asarray(bounds_hi, dtype=np.float64)
    cloud = SurfelCloud.empty(n, n_sh_coeffs, feature_dim)
    cloud.positions = lo + (hi - lo) * rng.random((n, 3))
    cloud.rotations = random_unit_quaternions(n, rng)
    cloud.log_scales = np.log(scale_range[0] + (scale_range[1] - scale_range[0])
                              * rng.random((n, 2)))
    cloud.material_feature = 0.01 * rng.standard_normal((n, feature_dim))
    return cloud


def cloud_from_points(points, rng, n_sh_coeffs=9, feature_dim=8):
    """Initialize surfels at the given points; scales from nearest-neighbor
    spacing (brute force, fine at desk scale)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = len(pts)
    cloud = SurfelCloud.empty(n, n_sh_coeffs, feature_dim)
    cloud.positions = pts.copy()
    cloud.rotations = np.tile([1.0, 0, 0, 0], (n, 1))
    if n > 1:
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(d2, np.inf)
        k = min(3, n - 1)
        nn = np.sqrt(np.maximum(np.sort(d2, axis=1)[:, :k].mean(axis=1), 1e-14))
    else:
        nn = np.full(1, 0.1)
    cloud.log_scales = np.log(np.clip(nn, 1e-7, None))[:, None] * np.ones((1, 2))
    cloud.material_feature = 0.01 * rng.standard_normal((n, feature_dim))
    return cloud
