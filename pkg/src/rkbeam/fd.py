"""Finite-difference application of polynomial differential operators.

These are the brute-force counterparts of the closed forms elsewhere in the
package; the self-test suites compare the two.
"""
import itertools
import math

import numpy as np

from .harmonics import dim_p, solid_harm


def central_weights(order):
    """Central finite-difference stencil for the derivative of given order.

    Returns integer offsets and weights (to be divided by ``h**order``),
    second-order accurate.
    """
    if order == 0:
        return np.array([0]), np.array([1.0])
    half = (order + 1) // 2
    offsets = np.arange(-half, half + 1)
    vander = np.vander(offsets.astype(float), increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return offsets, np.linalg.solve(vander, rhs)


def monomials(d, nu):
    """Multi-indices of total degree `nu` in `d` variables."""
    return [a for a in itertools.product(range(nu + 1), repeat=d) if sum(a) == nu]


def harmonic_monomials(d, idx):
    """Monomial coefficients of the solid harmonic ``y_nu^mu``.

    Fitted exactly on a fixed set of points; the result is a mapping
    ``alpha -> c_alpha`` with ``y(r) = sum c_alpha r^alpha``.
    """
    nu, _ = idx
    alphas = monomials(d, nu)
    rng = np.random.default_rng(12345 + 17 * nu + d)
    pts = rng.normal(size=(3 * dim_p(d, nu) + 4, d))
    design = np.stack([np.prod(pts ** np.array(a), axis=-1) for a in alphas], axis=-1)
    vals = solid_harm(d, idx, pts)
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    return {a: c for a, c in zip(alphas, coef) if abs(c) > 1e-13}


def apply_operator(f, point, coeffs, h):
    """Apply ``sum_alpha c_alpha D^alpha`` to `f` at `point` by finite differences.

    Parameters
    ----------
    f : callable
        Maps points of shape ``(M, d)`` to ``M`` (complex) values.
    point : array_like of shape (d,)
    coeffs : dict
        Multi-index -> coefficient.
    h : float
        Step size.
    """
    point = np.asarray(point, dtype=float)
    d = point.shape[0]
    total = 0.0 + 0.0j
    for alpha, c in coeffs.items():
        stencils = [central_weights(a) for a in alpha]
        offs = list(itertools.product(*[s[0] for s in stencils]))
        wts = [np.prod(w) for w in itertools.product(*[s[1] for s in stencils])]
        pts = point + h * np.array(offs, dtype=float).reshape(-1, d)
        vals = np.asarray(f(pts))
        total += c * np.dot(wts, vals) / h ** sum(alpha)
    return total


def radial_operator(g, z, nu, h):
    """Nested ``(1/z d/dz)^nu g`` at `z` by central differences."""
    if nu == 0:
        return g(z)
    return (radial_operator(g, z + h, nu - 1, h) - radial_operator(g, z - h, nu - 1, h)) / (2 * h * z)
