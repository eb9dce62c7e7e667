"""Real spherical harmonics up to degree 4, with directional derivatives.

Basis functions use the hardcoded Cartesian polynomial forms standard in
splatting codebases. The polynomials assume unit directions; derivatives are
the raw polynomial partials, which agree with the tangential derivative on
the sphere (directions produced by the pipeline stay exactly unit-norm, so
radial components never enter the chain).
"""

import numpy as np

C0 = 0.28209479177387814
C1 = 0.4886025119029199
C2 = (1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
      -1.0925484305920792, 0.5462742152960396)
C3 = (-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
      0.3731763325901154, -0.4570457994644658, 1.445305721320277,
      -0.5900435899266435)
C4 = (2.5033429417967046, -1.7701307697799304, 0.9461746957575601,
      -0.6690465435572892, 0.10578554691520431, -0.6690465435572892,
      0.47308734787878004, -1.7701307697799304, 0.6258357354491761)

MAX_DEGREE = 4


def num_coeffs(degree):
    return (degree + 1) ** 2


def band_indices(degree):
    """Band number l for each coefficient slot, shape (num_coeffs,)."""
    return np.repeat(np.arange(degree + 1), 2 * np.arange(degree + 1) + 1)


def sh_basis(dirs, degree):
    """Evaluate the basis at unit directions (..., 3) -> (..., num_coeffs)."""
    if degree < 0 or degree > MAX_DEGREE:
        raise ValueError(f"unsupported SH degree {degree}")
    dirs = np.asarray(dirs, dtype=np.float64)
    x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    out = np.empty(dirs.shape[:-1] + (num_coeffs(degree),), dtype=np.float64)
    out[..., 0] = C0
    if degree >= 1:
        out[..., 1] = -C1 * y
        out[..., 2] = C1 * z
        out[..., 3] = -C1 * x
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        out[..., 4] = C2[0] * x * y
        out[..., 5] = C2[1] * y * z
        out[..., 6] = C2[2] * (2 * zz - xx - yy)
        out[..., 7] = C2[3] * x * z
        out[..., 8] = C2[4] * (xx - yy)
    if degree >= 3:
        out[..., 9] = C3[0] * y * (3 * xx - yy)
        out[..., 10] = C3[1] * x * y * z
        out[..., 11] = C3[2] * y * (4 * zz - xx - yy)
        out[..., 12] = C3[3] * z * (2 * zz - 3 * xx - 3 * yy)
        out[..., 13] = C3[4] * x * (4 * zz - xx - yy)
        out[..., 14] = C3[5] * z * (xx - yy)
        out[..., 15] = C3[6] * x * (xx - 3 * yy)
    if degree >= 4:
        out[..., 16] = C4[0] * x * y * (xx - yy)
        out[..., 17] = C4[1] * y * z * (3 * xx - yy)
        out[..., 18] = C4[2] * x * y * (7 * zz - 1)
        out[..., 19] = C4[3] * y * z * (7 * zz - 3)
        out[..., 20] = C4[4] * (35 * zz * zz - 30 * zz + 3)
        out[..., 21] = C4[5] * x * z * (7 * zz - 3)
        out[..., 22] = C4[6] * (xx - yy) * (7 * zz - 1)
        out[..., 23] = C4[7] * x * z * (xx - yy)
        out[..., 24] = C4[8] * (xx * xx - 6 * xx * yy + yy * yy)
    return out


def sh_basis_grad(dirs, degree):
    """Basis values and their (free-coordinate) partials.

    Returns (basis (..., K), grad (..., K, 3)).
    """
    dirs = np.asarray(dirs, dtype=np.float64)
    x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    basis = sh_basis(dirs, degree)
    grad = np.zeros(dirs.shape[:-1] + (num_coeffs(degree), 3), dtype=np.float64)
    if degree >= 1:
        grad[..., 1, 1] = -C1
        grad[..., 2, 2] = C1
        grad[..., 3, 0] = -C1
    if degree >= 2:
        xx, yy, zz = x * x, y * y, z * z
        grad[..., 4, 0] = C2[0] * y
        grad[..., 4, 1] = C2[0] * x
        grad[..., 5, 1] = C2[1] * z
        grad[..., 5, 2] = C2[1] * y
        grad[..., 6, 0] = -2 * C2[2] * x
        grad[..., 6, 1] = -2 * C2[2] * y
        grad[..., 6, 2] = 4 * C2[2] * z
        grad[..., 7, 0] = C2[3] * z
        grad[..., 7, 2] = C2[3] * x
        grad[..., 8, 0] = 2 * C2[4] * x
        grad[..., 8, 1] = -2 * C2[4] * y
    if degree >= 3:
        grad[..., 9, 0] = C3[0] * 6 * x * y
        grad[..., 9, 1] = C3[0] * 3 * (xx - yy)
        grad[..., 10, 0] = C3[1] * y * z
        grad[..., 10, 1] = C3[1] * x * z
        grad[..., 10, 2] = C3[1] * x * y
        grad[..., 11, 0] = -2 * C3[2] * x * y
        grad[..., 11, 1] = C3[2] * (4 * zz - xx - 3 * yy)
        grad[..., 11, 2] = 8 * C3[2] * y * z
        grad[..., 12, 0] = -6 * C3[3] * x * z
        grad[..., 12, 1] = -6 * C3[3] * y * z
        grad[..., 12, 2] = C3[3] * (6 * zz - 3 * xx - 3 * yy)
        grad[..., 13, 0] = C3[4] * (4 * zz - 3 * xx - yy)
        grad[..., 13, 1] = -2 * C3[4] * x * y
        grad[..., 13, 2] = 8 * C3[4] * x * z
        grad[..., 14, 0] = 2 * C3[5] * x * z
        grad[..., 14, 1] = -2 * C3[5] * y * z
        grad[..., 14, 2] = C3[5] * (xx - yy)
        grad[..., 15, 0] = 3 * C3[6] * (xx - yy)
        grad[..., 15, 1] = -6 * C3[6] * x * y
    if degree >= 4:
        xx, yy, zz = x * x, y * y, z * z
        grad[..., 16, 0] = C4[0] * y * (3 * xx - yy)
        grad[..., 16, 1] = C4[0] * x * (xx - 3 * yy)
        grad[..., 17, 0] = 6 * C4[1] * x * y * z
        grad[..., 17, 1] = 3 * C4[1] * z * (xx - yy)
        grad[..., 17, 2] = C4[1] * y * (3 * xx - yy)
        grad[..., 18, 0] = C4[2] * y * (7 * zz - 1)
        grad[..., 18, 1] = C4[2] * x * (7 * zz - 1)
        grad[..., 18, 2] = 14 * C4[2] * x * y * z
        grad[..., 19, 1] = C4[3] * z * (7 * zz - 3)
        grad[..., 19, 2] = C4[3] * y * (21 * zz - 3)
        grad[..., 20, 2] = C4[4] * (140 * zz * z - 60 * z)
        grad[..., 21, 0] = C4[5] * z * (7 * zz - 3)
        grad[..., 21, 2] = C4[5] * x * (21 * zz - 3)
        grad[..., 22, 0] = 2 * C4[6] * x * (7 * zz - 1)
        grad[..., 22, 1] = -2 * C4[6] * y * (7 * zz - 1)
        grad[..., 22, 2] = 14 * C4[6] * z * (xx - yy)
        grad[..., 23, 0] = C4[7] * z * (3 * xx - yy)
        grad[..., 23, 1] = -2 * C4[7] * x * y * z
        grad[..., 23, 2] = C4[7] * x * (xx - yy)
        grad[..., 24, 0] = C4[8] * (4 * xx * x - 12 * x * yy)
        grad[..., 24, 1] = C4[8] * (4 * yy * y - 12 * xx * y)
    return basis, grad


def band_attenuation(rho, degree):
    """Roughness prefilter a_l = exp(-l(l+1) rho^2), one entry per coefficient.

    rho may be an array; result broadcasts to (..., num_coeffs).
    """
    l = band_indices(degree).astype(np.float64)
    rho = np.asarray(rho, dtype=np.float64)
    return np.exp(-l * (l + 1) * rho[..., None] ** 2)
