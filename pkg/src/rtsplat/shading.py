"""Per-pixel specular shading: SH environment lookup plus a small
feed-forward head producing the specular color and the transmission
attenuation factor.

The head takes (environment RGB at the reflected direction, aggregated
material feature, n.v) and maps through two 64-wide rectified layers to four
logistic outputs: C_spec (3) and beta (1).
"""

from dataclasses import dataclass, field

import numpy as np

from . import sh
from .errors import InvalidParameterError
from .surfels import sigmoid

ENV_DEGREE = 4
HIDDEN = 64


@dataclass
class ShadingParams:
    env: np.ndarray          # (25, 3) SH coefficients
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    feature_dim: int = 8

    @property
    def input_dim(self):
        return 3 + self.feature_dim + 1

    def param_arrays(self):
        return [("env", self.env), ("head_w1", self.w1), ("head_b1", self.b1),
                ("head_w2", self.w2), ("head_b2", self.b2),
                ("head_w3", self.w3), ("head_b3", self.b3)]

    def copy(self):
        return ShadingParams(self.env.copy(), self.w1.copy(), self.b1.copy(),
                             self.w2.copy(), self.b2.copy(), self.w3.copy(),
                             self.b3.copy(), self.feature_dim)

    @classmethod
    def init(cls, rng, feature_dim=8, env_dc=None):
        """Glorot-uniform head, zero biases, flat mid-gray environment."""
        def glorot(fan_out, fan_in):
            lim = np.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-lim, lim, size=(fan_out, fan_in))

        n_in = 3 + feature_dim + 1
        env = np.zeros((sh.num_coeffs(ENV_DEGREE), 3))
        env[0, :] = np.sqrt(np.pi) if env_dc is None else env_dc
        return cls(env, glorot(HIDDEN, n_in), np.zeros(HIDDEN),
                   glorot(HIDDEN, HIDDEN), np.zeros(HIDDEN),
                   glorot(4, HIDDEN), np.zeros(4), feature_dim)


def reflect_dir(n, v):
    """Mirror the view direction about the normal: r = 2 (n.v) n - v.

    Both inputs must be unit vectors; broadcasting over leading axes.
    """
    n = np.asarray(n, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1) > 1e-6):
        raise InvalidParameterError("reflect_dir: normal is not unit length")
    if np.any(np.abs(np.linalg.norm(v, axis=-1) - 1) > 1e-6):
        raise InvalidParameterError("reflect_dir: view vector is not unit length")
    return _reflect(n, v)


def _reflect(n, v):
    ndv = np.sum(n * v, axis=-1, keepdims=True)
    return 2.0 * ndv * n - v


def env_eval(env_coeffs, r, rho):
    """Environment radiance along unit directions r with roughness prefilter
    a_l = exp(-l(l+1) rho^2); negative radiance clamps to zero."""
    r = np.atleast_2d(np.asarray(r, dtype=np.float64))
    rho = np.broadcast_to(np.asarray(rho, dtype=np.float64), r.shape[:-1])
    basis = sh.sh_basis(r, ENV_DEGREE)
    att = sh.band_attenuation(rho, ENV_DEGREE)
    return np.maximum((att * basis) @ env_coeffs, 0.0)


class ShadeRecord:
    """Intermediates of one shading evaluation (per shaded pixel)."""
    __slots__ = ("n", "v", "nv", "r", "basis", "dbasis", "att", "env_pre",
                 "env_mask", "xi", "m1", "h1", "m2", "h2", "s")


def spec_head(params: ShadingParams, env_rgb, z, ndotv):
    """Head-only evaluation (public operation); returns (C_spec, beta)."""
    env_rgb = np.atleast_2d(np.asarray(env_rgb, dtype=np.float64))
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    ndotv = np.atleast_1d(np.asarray(ndotv, dtype=np.float64))
    if not (np.isfinite(env_rgb).all() and np.isfinite(z).all()
            and np.isfinite(ndotv).all()):
        bad = int(np.argmin(np.isfinite(env_rgb).all(axis=1)
                            & np.isfinite(z).all(axis=1) & np.isfinite(ndotv)))
        raise InvalidParameterError(f"spec_head: non-finite input at pixel {bad}")
    xi = np.concatenate([env_rgb, z, ndotv[:, None]], axis=1)
    s = _head_forward(params, xi)[0]
    return s[:, :3], s[:, 3]


def _head_forward(params, xi, frozen=None):
    u1 = xi @ params.w1.T + params.b1
    m1 = frozen.m1 if frozen is not None else u1 > 0
    h1 = u1 * m1
    u2 = h1 @ params.w2.T + params.b2
    m2 = frozen.m2 if frozen is not None else u2 > 0
    h2 = u2 * m2
    u3 = h2 @ params.w3.T + params.b3
    return sigmoid(u3), m1, h1, m2, h2


def shade(params: ShadingParams, normals, views, rho, z, frozen=None):
    """Full shading chain for shaded pixels.

    normals, views: (M, 3) unit vectors; rho: (M,); z: (M, F).
    Returns (C_spec (M, 3), beta (M,), ShadeRecord). Passing a previous
    record as `frozen` replays its branch decisions (relu and clamp masks)
    so re-evaluations stay on the differentiated branch.
    """
    rec = ShadeRecord()
    rec.n, rec.v = normals, views
    rec.nv = np.sum(normals * views, axis=-1)
    rec.r = 2.0 * rec.nv[:, None] * normals - views
    rec.basis, rec.dbasis = sh.sh_basis_grad(rec.r, ENV_DEGREE)
    rec.att = sh.band_attenuation(rho, ENV_DEGREE)
    rec.env_pre = (rec.att * rec.basis) @ params.env
    rec.env_mask = frozen.env_mask if frozen is not None else rec.env_pre > 0
    env = rec.env_pre * rec.env_mask
    rec.xi = np.concatenate([env, z, rec.nv[:, None]], axis=1)
    s, rec.m1, rec.h1, rec.m2, rec.h2 = _head_forward(params, rec.xi, frozen)
    rec.s = s
    return s[:, :3], s[:, 3], rec


def shade_backward(params: ShadingParams, rec: ShadeRecord, rho,
                   d_cspec, d_beta):
    """Reverse-mode through the shading chain.

    Returns (param grads dict, dL/dnormal (M, 3), dL/drho (M,), dL/dz (M, F)).
    """
    ds = np.concatenate([d_cspec, d_beta[:, None]], axis=1)
    du3 = ds * rec.s * (1.0 - rec.s)
    g_w3 = du3.T @ rec.h2
    g_b3 = du3.sum(axis=0)
    dh2 = du3 @ params.w3
    du2 = dh2 * rec.m2
    g_w2 = du2.T @ rec.h1
    g_b2 = du2.sum(axis=0)
    dh1 = du2 @ params.w2
    du1 = dh1 * rec.m1
    g_w1 = du1.T @ rec.xi
    g_b1 = du1.sum(axis=0)
    dxi = du1 @ params.w1

    denv = dxi[:, :3] * rec.env_mask
    dz = dxi[:, 3:-1]
    dnv = dxi[:, -1]

    g_env = (rec.att * rec.basis).T @ denv
    w_env = denv @ params.env.T                      # (M, 25)
    l = sh.band_indices(ENV_DEGREE).astype(np.float64)
    datt_drho = -2.0 * (l * (l + 1))[None, :] * rho[:, None] * rec.att
    drho = np.sum(w_env * rec.basis * datt_drho, axis=1)
    dr = np.einsum("mk,mkd->md", w_env * rec.att, rec.dbasis)

    # r = 2 (n.v) n - v, plus the n.v head input
    n_dot_dr = np.sum(rec.n * dr, axis=-1)
    dn = 2.0 * n_dot_dr[:, None] * rec.v + 2.0 * rec.nv[:, None] * dr
    dn += dnv[:, None] * rec.v

    grads = {"env": g_env, "head_w1": g_w1, "head_b1": g_b1,
             "head_w2": g_w2, "head_b2": g_b2, "head_w3": g_w3,
             "head_b3": g_b3}
    return grads, dn, drho, dz
