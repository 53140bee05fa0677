"""Directivity functions and the differential operators they induce.

A directivity is stored as complex harmonic coefficients in the flat basis
order of :mod:`rkbeam.harmonics`. Receiving a field with directivity ``zeta``
is the same as applying the polynomial differential operator whose harmonic
coefficients are ``(-ik)^(-nu) c_nu^mu``; applied to the reproducing kernel
this reduces to a finite sum of radial kernel functions.
"""
from dataclasses import dataclass

import numpy as np

from .harmonics import basis_degrees, n_basis, project_directivity, sph_harm_all
from .specialfn import big_j, surface_area

__all__ = [
    "Directivity",
    "InducedCoeffs",
    "induce",
    "evaluate",
    "plane_wave_response",
    "rk_derivative_terms",
    "rk_directional_derivative",
]


@dataclass(frozen=True, eq=False)
class Directivity:
    """Harmonic expansion of a receiver or beam directivity."""

    d: int
    nu_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != n_basis(self.d, self.nu_max):
            raise ValueError(
                f"expected {n_basis(self.d, self.nu_max)} coefficients for d={self.d}, "
                f"nu_max={self.nu_max}, got {c.shape[0]}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("directivity coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def omni(cls, d, nu_max=0):
        """Unit omnidirectional response."""
        c = np.zeros(n_basis(d, nu_max), dtype=complex)
        c[0] = np.sqrt(surface_area(d))
        return cls(d, nu_max, c)

    @classmethod
    def zeros(cls, d, nu_max):
        return cls(d, nu_max, np.zeros(n_basis(d, nu_max), dtype=complex))

    @classmethod
    def from_function(cls, d, zeta, nu_max, n_quad=None):
        """Project a callable directivity; returns ``(Directivity, residual)``."""
        c, resid = project_directivity(d, zeta, nu_max, n_quad)
        return cls(d, nu_max, c), resid

    @classmethod
    def delta(cls, d, nu_max, look):
        """Degree-truncated delta beam pointing at `look`."""
        return cls(d, nu_max, sph_harm_all(d, nu_max, look).astype(complex))

    def padded(self, nu_max):
        """Same directivity expressed with a larger truncation degree."""
        if nu_max < self.nu_max:
            raise ValueError("cannot pad to a smaller degree")
        c = np.zeros(n_basis(self.d, nu_max), dtype=complex)
        c[: self.coeffs.shape[0]] = self.coeffs
        return Directivity(self.d, nu_max, c)

    def __add__(self, other):
        m = max(self.nu_max, other.nu_max)
        return Directivity(self.d, m, self.padded(m).coeffs + other.padded(m).coeffs)

    def to_record(self):
        """Flat record ``[d, nu_max, re_0, im_0, re_1, im_1, ...]``."""
        rec = [float(self.d), float(self.nu_max)]
        for c in self.coeffs:
            rec.extend([c.real, c.imag])
        return rec

    @classmethod
    def from_record(cls, rec):
        rec = [float(x) for x in rec]
        if len(rec) < 2 or len(rec) % 2:
            raise ValueError("malformed directivity record")
        d, nu_max = int(rec[0]), int(rec[1])
        vals = np.array(rec[2:])
        return cls(d, nu_max, vals[0::2] + 1j * vals[1::2])


@dataclass(frozen=True, eq=False)
class InducedCoeffs:
    """Harmonic coefficients of the induced differential operator at wavenumber `k`."""

    d: int
    nu_max: int
    k: float
    coeffs: np.ndarray


def _check_k(k):
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")


def induce(zeta, k):
    _check_k(k)
    nu = basis_degrees(zeta.d, zeta.nu_max)
    return InducedCoeffs(zeta.d, zeta.nu_max, float(k), zeta.coeffs * (-1j * k) ** (-nu.astype(float)))


def evaluate(zeta, theta):
    """Directivity value at direction(s) `theta` of shape ``(..., d)``."""
    return sph_harm_all(zeta.d, zeta.nu_max, theta) @ zeta.coeffs


def plane_wave_response(zeta, theta, k, r):
    """Output of a sensor at `r` for a unit plane wave from `theta`."""
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    return evaluate(zeta, theta) * np.exp(-1j * k * np.sum(theta * r, axis=-1))


def rk_derivative_terms(d, nu_max, k, s):
    """Per-basis terms ``i^(-nu) J_{d,nu}(k|s|) Y_nu^mu(s/|s|)``.

    Parameters
    ----------
    s : array_like of shape (..., d)
        Separation vectors ``r - r'``.

    Returns
    -------
    ndarray of complex, shape (..., n_basis(d, nu_max))
    """
    _check_k(k)
    s = np.asarray(s, dtype=float)
    dist = np.linalg.norm(s, axis=-1)
    coincident = dist == 0.0
    nu = basis_degrees(d, nu_max)
    radial = np.stack([big_j(d, n, k * dist) for n in range(nu_max + 1)], axis=-1)
    terms = (1j ** (-nu)) * radial[..., nu] * sph_harm_all(d, nu_max, s)
    # zero separation: the direction is undefined but only the nu=0 term survives
    if np.any(coincident):
        terms[coincident] = 0.0
        terms[coincident, 0] = np.sqrt(surface_area(d))
    return terms


def rk_directional_derivative(zeta, k, r, rp):
    """Induced operator of `zeta` applied to the kernel in its first argument.

    Returns ``zeta'(d_1) kappa_k(r, rp)``; broadcasts over leading axes of
    `r` and `rp`.
    """
    s = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    out = rk_derivative_terms(zeta.d, zeta.nu_max, k, s) @ zeta.coeffs
    return out if np.ndim(out) else complex(out)
