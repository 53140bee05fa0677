"""Beamformers built on the kernel field estimate.

A beamformer is a linear functional of the reconstructed field, so its
weights follow from the regularized inverse ``R`` (``a = R s``) and a
steering vector ``v`` (output ``= v^T a``): ``w = conj(R^T v)`` and the
output is ``w^H s``.
"""
from dataclasses import dataclass

import numpy as np

from .directivity import Directivity, plane_wave_response, rk_directional_derivative
from .harmonics import basis_degrees, quadrature, sph_harm_all, zonal_kernel_closed
from .kernelfield import regularized_inverse
from .specialfn import surface_area

__all__ = [
    "BeamWeights",
    "ExtractionMatrix",
    "simple_weights",
    "general_weights",
    "apply",
    "extraction_matrix",
    "beam_pattern",
    "directivity_index",
    "pattern_table",
    "sh_domain_weights",
    "plane_wave_modes",
    "sh_apply",
    "axisymmetric_pattern",
]


@dataclass(frozen=True, eq=False)
class BeamWeights:
    """Precomputed weights; `target` is a look direction or a :class:`Directivity`."""

    w: np.ndarray
    k: float
    target: object
    position: np.ndarray


@dataclass(frozen=True, eq=False)
class ExtractionMatrix:
    W: np.ndarray
    points: np.ndarray


def _weights(R, v):
    w = np.conj(R.T @ v)
    probe = np.ones(R.shape[1], dtype=complex)
    lhs = np.conj(w) @ probe if w.ndim == 1 else np.conj(w).T @ probe
    rhs = v.T @ (R @ probe)
    if not np.allclose(lhs, rhs, rtol=1e-8, atol=1e-10 * (1.0 + np.abs(rhs).max())):
        raise AssertionError("weight construction does not reproduce v^T R s")
    return w


def _simple_steering(positions, k, phi, points):
    phi = np.asarray(phi, dtype=float)
    # (N, M): exp(i k phi . (r_n - r_m))
    return np.exp(1j * k * ((positions @ phi)[:, None] - (points @ phi)[None, :]))


def _general_steering(positions, k, zeta, points):
    return rk_directional_derivative(zeta, k, points[None, :, :], positions[:, None, :])


def simple_weights(C, array, k, phi, r=None, lam=0.0, relative=False):
    """Weights extracting the plane-wave component from `phi` at position `r`."""
    r = np.zeros(array.d) if r is None else np.asarray(r, dtype=float)
    v = _simple_steering(array.positions, k, phi, r[None, :])[:, 0]
    w = _weights(regularized_inverse(C, lam, relative), v)
    return BeamWeights(w, float(k), np.asarray(phi, dtype=float), r)


def general_weights(C, array, k, zeta, r=None, lam=0.0, relative=False):
    """Weights realising a virtual sensor with directivity `zeta` at `r`."""
    r = np.zeros(array.d) if r is None else np.asarray(r, dtype=float)
    v = _general_steering(array.positions, k, zeta, r[None, :])[:, 0]
    w = _weights(regularized_inverse(C, lam, relative), v)
    return BeamWeights(w, float(k), zeta, r)


def apply(w, s):
    """Beamformer output ``w^H s``."""
    wv = w.w if isinstance(w, BeamWeights) else np.asarray(w)
    s = np.asarray(s)
    if wv.shape[0] != s.shape[0]:
        raise ValueError(f"length mismatch: {wv.shape[0]} weights, {s.shape[0]} inputs")
    out = np.conj(wv) @ s
    return out if np.ndim(out) else complex(out)


def extraction_matrix(C, array, k, target, points, lam=0.0, relative=False):
    """Stacked weights for `target` at every point; ``W^H s`` is the extracted field.

    `target` is either a look direction (simple beam) or a :class:`Directivity`.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] < 1:
        raise ValueError("at least one extraction point required")
    if isinstance(target, Directivity):
        V = _general_steering(array.positions, k, target, points)
    else:
        V = _simple_steering(array.positions, k, target, points)
    return ExtractionMatrix(_weights(regularized_inverse(C, lam, relative), V), points)


def _array_responses(array, k, dirs):
    # (M, N) plane-wave responses of every sensor
    return np.stack(
        [plane_wave_response(z, dirs, k, pos) for pos, z in zip(array.positions, array.directivities)], axis=-1
    )


def beam_pattern(w, array, k, dirs):
    """Beamformer output for unit plane waves from each direction in `dirs`."""
    wv = w.w if isinstance(w, BeamWeights) else np.asarray(w)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    return _array_responses(array, k, dirs) @ np.conj(wv)


def directivity_index(w, array, k, phi, n_quad=3600):
    """Directivity index in dB by angular quadrature of the array response.

    Returns ``-inf`` when the look-direction response vanishes.
    """
    d = array.d
    if d == 2 and n_quad < 360:
        raise ValueError("n_quad must be at least 360")
    dirs, wts = quadrature(d, n_quad)
    y = beam_pattern(w, array, k, dirs)
    denom = float(np.sum(wts * np.abs(y) ** 2))
    if denom < 1e-300:
        raise ValueError("beam pattern has no energy")
    look = abs(beam_pattern(w, array, k, np.asarray(phi, dtype=float)[None, :])[0]) ** 2
    if look == 0.0:
        return -np.inf
    return 10.0 * np.log10(surface_area(d) * look / denom)


def pattern_table(w, array, k, phi, n_angles=360):
    """Rows ``(angle_deg, re, im, magnitude_db)`` normalised to the look direction (d=2)."""
    ang = np.arange(n_angles) * 360.0 / n_angles
    rad = np.deg2rad(ang)
    y = beam_pattern(w, array, k, np.stack([np.cos(rad), np.sin(rad)], axis=-1))
    look = abs(beam_pattern(w, array, k, np.asarray(phi, dtype=float)[None, :])[0])
    with np.errstate(divide="ignore"):
        mag = 20.0 * np.log10(np.abs(y) / look) if look > 0 else np.full(n_angles, -np.inf)
    return [(float(a), float(v.real), float(v.imag), float(m)) for a, v, m in zip(ang, y, mag)]


def sh_domain_weights(b, *, d=3, d_nu=None, look=None, coeffs=None):
    """Harmonic-domain weights from radial functions `b` (one value per degree).

    Axisymmetric mode (`d_nu` and `look`): ``w = i^nu d_nu Y(look) / b_nu``.
    General mode (`coeffs`): ``w = i^nu c / b_nu``.
    """
    b = np.asarray(b, dtype=complex)
    if np.any(b == 0):
        raise ZeroDivisionError("radial functions b_nu must not vanish")
    nu_max = b.shape[0] - 1
    nu = basis_degrees(d, nu_max)
    if coeffs is not None:
        c = np.asarray(coeffs, dtype=complex)
        if c.shape[0] != nu.shape[0]:
            raise ValueError("coefficient count does not match the degrees in b")
    elif d_nu is not None and look is not None:
        d_nu = np.asarray(d_nu, dtype=complex)
        if d_nu.shape[0] != nu_max + 1:
            raise ValueError("need one beam weight per degree")
        c = d_nu[nu] * sph_harm_all(d, nu_max, look)
    else:
        raise ValueError("give either coeffs or both d_nu and look")
    return (1j ** nu) * c / b[nu]


def plane_wave_modes(d, nu_max, theta, b):
    """Measured mode coefficients ``i^-nu Y(theta) b_nu`` of a unit plane wave."""
    b = np.asarray(b, dtype=complex)
    nu = basis_degrees(d, nu_max)
    return (1j ** (-nu)) * sph_harm_all(d, nu_max, theta) * b[nu]


def sh_apply(w_modes, s_modes):
    """Harmonic-domain beamformer output ``sum w_nu^mu s_nu^mu``."""
    return np.asarray(s_modes) @ np.asarray(w_modes)


def axisymmetric_pattern(d_nu, Theta, d=3):
    """Closed-form axisymmetric beam ``sum d_nu Psi_nu(cos Theta)``."""
    Theta = np.asarray(Theta, dtype=float)
    u = np.stack([np.zeros_like(Theta)] * (d - 1) + [np.ones_like(Theta)], axis=-1)
    if d == 3:
        v = np.stack([np.sin(Theta), np.zeros_like(Theta), np.cos(Theta)], axis=-1)
    else:
        v = np.stack([np.sin(Theta), np.cos(Theta)], axis=-1)
    out = sum(dn * zonal_kernel_closed(d, n, u, v) for n, dn in enumerate(d_nu))
    return out if np.ndim(out) else float(out)
