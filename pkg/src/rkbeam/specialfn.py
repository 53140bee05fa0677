"""Special functions used by the kernel and harmonic machinery.

The radial kernel ``big_j(d, nu, z) = (2 pi)^(d/2) J_{nu+d/2-1}(z) / z^(d/2-1)``
appears in the reproducing kernel of band-limited interior fields and in all
of its spatial derivatives.
"""
import math

import numpy as np
from scipy import special

__all__ = ["bessel_j", "big_j", "surface_area", "legendre_p"]


def _check_dim(d):
    if d not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {d!r}")


def bessel_j(order, z):
    """Bessel function of the first kind for integer or half-integer order.

    Parameters
    ----------
    order : float
        Non-negative, ``2 * order`` must be an integer.
    z : float or ndarray
        Non-negative argument.

    Returns
    -------
    float or ndarray
    """
    if order < 0 or (2 * order) != int(2 * order):
        raise ValueError(f"unsupported Bessel order {order!r}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0) or not np.all(np.isfinite(z_arr)):
        raise ValueError("Bessel argument must be finite and non-negative")
    if float(order).is_integer():
        out = special.jv(int(order), z_arr)
    else:
        # half-integer orders through spherical Bessel functions:
        # J_{n+1/2}(z) = sqrt(2z/pi) j_n(z)
        n = int(order - 0.5)
        out = np.sqrt(2.0 * z_arr / np.pi) * special.spherical_jn(n, z_arr)
    return out if np.ndim(z) else float(out)


def big_j(d, nu, z):
    """Radial kernel function of degree `nu` in dimension `d`.

    Zero argument is an explicit case: ``|S^{d-1}|`` for ``nu == 0`` and 0
    otherwise.
    """
    _check_dim(d)
    if nu < 0 or int(nu) != nu:
        raise ValueError(f"degree must be a non-negative integer, got {nu!r}")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0):
        raise ValueError("argument must be non-negative")
    out = np.empty_like(z_arr)
    zero = z_arr == 0.0
    out[zero] = surface_area(d) if nu == 0 else 0.0
    zp = z_arr[~zero]
    if d == 2:
        out[~zero] = 2.0 * np.pi * special.jv(nu, zp)
    else:
        # (2 pi)^{3/2} J_{nu+1/2}(z) / sqrt(z) = 4 pi j_nu(z)
        out[~zero] = 4.0 * np.pi * special.spherical_jn(nu, zp)
    return out if np.ndim(z) else float(out)


def surface_area(d):
    """Surface area of the unit sphere ``S^{d-1}`` in ``R^d``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d!r}")
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def legendre_p(nu, x):
    """Legendre polynomial ``P_nu(x)`` by the three-term recurrence."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.abs(x_arr) > 1.0 + 1e-12):
        raise ValueError("legendre_p requires |x| <= 1")
    p_prev = np.ones_like(x_arr)
    if nu == 0:
        out = p_prev
    else:
        p = x_arr.copy()
        for n in range(1, nu):
            p_prev, p = p, ((2 * n + 1) * x_arr * p - n * p_prev) / (n + 1)
        out = p
    return out if np.ndim(x) else float(out)
