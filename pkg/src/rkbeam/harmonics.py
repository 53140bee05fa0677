"""Real orthonormal spherical harmonics on S^1 and S^2.

Flat basis order (fixed, used for every coefficient vector in the package):

* ``d = 2``: ``[1/sqrt(2 pi)]`` then per degree ``nu >= 1`` the pair
  ``cos(nu theta)/sqrt(pi)`` (``mu = 0``) and ``sin(nu theta)/sqrt(pi)``
  (``mu = 1``).
* ``d = 3``: per degree, ``mu = 0 .. 2 nu`` maps to the signed order
  ``m = mu - nu``. ``m > 0`` uses ``cos(m phi)``, ``m < 0`` uses
  ``sin(|m| phi)``, both scaled by ``sqrt(2)``. Associated Legendre functions
  carry no Condon-Shortley phase.
"""
import math

import numpy as np

from .specialfn import legendre_p

__all__ = [
    "dim_y",
    "dim_p",
    "n_basis",
    "flat_index",
    "basis_indices",
    "basis_degrees",
    "sph_harm",
    "sph_harm_all",
    "solid_harm",
    "solid_harm_all",
    "zonal_kernel",
    "zonal_kernel_closed",
    "quadrature",
    "project_directivity",
]


def _check_dim(d):
    if d not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {d!r}")


def dim_y(d, nu):
    """Dimension of the space of degree-`nu` spherical harmonics."""
    _check_dim(d)
    if nu < 0:
        raise ValueError("degree must be non-negative")
    if nu == 0:
        return 1
    return (d + 2 * nu - 2) * math.factorial(d + nu - 3) // (math.factorial(d - 2) * math.factorial(nu))


def dim_p(d, nu):
    """Dimension of the space of homogeneous degree-`nu` polynomials."""
    _check_dim(d)
    if nu < 0:
        raise ValueError("degree must be non-negative")
    return math.factorial(d + nu - 1) // (math.factorial(nu) * math.factorial(d - 1))


def n_basis(d, nu_max):
    return sum(dim_y(d, nu) for nu in range(nu_max + 1))


def flat_index(d, nu, mu):
    if not 0 <= mu < dim_y(d, nu):
        raise IndexError(f"order {mu} out of range for degree {nu} (d={d})")
    return n_basis(d, nu - 1) + mu if nu > 0 else 0


def basis_indices(d, nu_max):
    """List of ``(nu, mu)`` pairs in flat basis order."""
    return [(nu, mu) for nu in range(nu_max + 1) for mu in range(dim_y(d, nu))]


def basis_degrees(d, nu_max):
    return np.array([nu for nu, _ in basis_indices(d, nu_max)], dtype=int)


def _assoc_legendre(nu_max, x):
    """``P_l^m(x)`` for ``0 <= m <= l <= nu_max`` without Condon-Shortley phase.

    Returns an array of shape ``(nu_max + 1, nu_max + 1) + x.shape`` indexed
    ``[l, m]``.
    """
    out = np.zeros((nu_max + 1, nu_max + 1) + x.shape)
    sin_t = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    for m in range(nu_max + 1):
        if m > 0:
            pmm = pmm * (2 * m - 1) * sin_t
        out[m, m] = pmm
        if m + 1 <= nu_max:
            out[m + 1, m] = x * (2 * m + 1) * pmm
        for ll in range(m + 2, nu_max + 1):
            out[ll, m] = ((2 * ll - 1) * x * out[ll - 1, m] - (ll + m - 1) * out[ll - 2, m]) / (ll - m)
    return out


def sph_harm_all(d, nu_max, dirs):
    """All basis functions up to degree `nu_max` at the given directions.

    Parameters
    ----------
    d : int
    nu_max : int
    dirs : array_like of shape (..., d)
        Directions; normalised internally.

    Returns
    -------
    ndarray of shape (..., n_basis(d, nu_max))
    """
    _check_dim(d)
    dirs = np.asarray(dirs, dtype=float)
    if dirs.shape[-1] != d:
        raise ValueError(f"directions must have trailing dimension {d}")
    norm = np.linalg.norm(dirs, axis=-1)
    norm = np.where(norm == 0.0, 1.0, norm)
    u = dirs / norm[..., None]
    phi = np.arctan2(u[..., 1], u[..., 0])
    cols = []
    if d == 2:
        cols.append(np.full(phi.shape, 1.0 / math.sqrt(2.0 * math.pi)))
        for nu in range(1, nu_max + 1):
            cols.append(np.cos(nu * phi) / math.sqrt(math.pi))
            cols.append(np.sin(nu * phi) / math.sqrt(math.pi))
    else:
        x = np.clip(u[..., 2], -1.0, 1.0)
        plm = _assoc_legendre(nu_max, x)
        for nu in range(nu_max + 1):
            for m in range(-nu, nu + 1):
                am = abs(m)
                norm_c = math.sqrt((2 * nu + 1) / (4 * math.pi) * math.factorial(nu - am) / math.factorial(nu + am))
                if m == 0:
                    cols.append(norm_c * plm[nu, 0])
                elif m > 0:
                    cols.append(math.sqrt(2.0) * norm_c * plm[nu, am] * np.cos(am * phi))
                else:
                    cols.append(math.sqrt(2.0) * norm_c * plm[nu, am] * np.sin(am * phi))
    return np.stack(cols, axis=-1)


def sph_harm(d, idx, theta):
    """Single basis function ``Y_nu^mu`` at direction `theta` (shape ``(..., d)``)."""
    nu, mu = idx
    j = flat_index(d, nu, mu)
    return sph_harm_all(d, nu, theta)[..., j]


def solid_harm_all(d, nu_max, r):
    """Solid harmonics ``|r|^nu Y_nu^mu(r/|r|)`` for every basis index."""
    r = np.asarray(r, dtype=float)
    rad = np.linalg.norm(r, axis=-1)
    vals = sph_harm_all(d, nu_max, r)
    return vals * rad[..., None] ** basis_degrees(d, nu_max)


def solid_harm(d, idx, r):
    """Homogeneous harmonic polynomial of the basis function `idx` at `r`."""
    nu, mu = idx
    return solid_harm_all(d, nu, r)[..., flat_index(d, nu, mu)]


def zonal_kernel(d, nu, a, b):
    """Reproducing kernel of the degree-`nu` harmonics, by explicit sum over orders."""
    lo = n_basis(d, nu - 1) if nu > 0 else 0
    ya = sph_harm_all(d, nu, a)[..., lo:]
    yb = sph_harm_all(d, nu, b)[..., lo:]
    return np.sum(ya * yb, axis=-1)


def zonal_kernel_closed(d, nu, a, b):
    """Addition-theorem closed form of :func:`zonal_kernel`."""
    _check_dim(d)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cos_t = np.sum(a * b, axis=-1) / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))
    cos_t = np.clip(cos_t, -1.0, 1.0)
    if d == 3:
        return (2 * nu + 1) / (4 * math.pi) * legendre_p(nu, cos_t)
    if nu == 0:
        return np.full(np.shape(cos_t), 1.0 / (2 * math.pi))[()]
    return np.cos(nu * np.arccos(cos_t)) / math.pi


def quadrature(d, n):
    """Quadrature rule on the unit sphere.

    ``d = 2``: `n` uniform angles (trapezoid, exact for trigonometric
    polynomials of degree < n). ``d = 3``: `n` Gauss-Legendre nodes in
    ``cos(theta)`` times ``2 n`` uniform azimuths.

    Returns
    -------
    dirs : ndarray of shape (M, d)
    weights : ndarray of shape (M,)
    """
    _check_dim(d)
    if d == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        return dirs, np.full(n, 2.0 * np.pi / n)
    x, wx = np.polynomial.legendre.leggauss(n)
    az = 2.0 * np.pi * np.arange(2 * n) / (2 * n)
    st = np.sqrt(1.0 - x * x)
    dirs = np.stack(
        [np.outer(st, np.cos(az)), np.outer(st, np.sin(az)), np.outer(x, np.ones_like(az))], axis=-1
    ).reshape(-1, 3)
    weights = np.outer(wx, np.full(2 * n, 2.0 * np.pi / (2 * n))).reshape(-1)
    return dirs, weights


def project_directivity(d, zeta, nu_max, n_quad=None):
    """Project a directivity function onto the harmonic basis.

    Parameters
    ----------
    d : int
    zeta : callable
        Maps an array of unit directions of shape ``(M, d)`` to ``M`` complex
        responses.
    nu_max : int
        Truncation degree.
    n_quad : int, optional
        Quadrature size. Defaults to ``4 * nu_max + 2`` plus a safety margin.

    Returns
    -------
    coeffs : ndarray of complex, shape (n_basis(d, nu_max),)
    residual : float
        L2 norm of ``zeta`` minus its truncated expansion, relative to the
        L2 norm of ``zeta`` (0 when ``zeta`` vanishes).
    """
    if n_quad is None:
        n_quad = 4 * nu_max + 34 if d == 2 else 2 * nu_max + 18
    dirs, w = quadrature(d, n_quad)
    vals = np.asarray(zeta(dirs), dtype=complex)
    basis = sph_harm_all(d, nu_max, dirs)
    coeffs = basis.T @ (w * vals)
    resid = vals - basis @ coeffs
    total = math.sqrt(float(np.sum(w * np.abs(vals) ** 2)))
    err = math.sqrt(float(np.sum(w * np.abs(resid) ** 2)))
    return coeffs, (err / total if total > 0 else 0.0)
