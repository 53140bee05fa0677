"""Kernel-based sound field reconstruction from directional sensors.

The estimated field is ``p(r) = sum_n a_n kappa_k(r, r_n)`` with
``kappa_k(r, r') = J_{d,0}(k |r - r'|)``. Directional sensor outputs are
related to the coefficients through ``s = C a`` where
``C[i, j] = zeta_i'(d_1) kappa_k(r_i, r_j)``.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .directivity import Directivity, rk_derivative_terms
from .specialfn import big_j

__all__ = [
    "SingularMatrixError",
    "MicArray",
    "CMatrix",
    "KernelField",
    "kernel",
    "gram",
    "build_c",
    "effective_lambda",
    "regularized_inverse",
    "solve_coeffs",
    "reconstruct",
    "estimate_spectrum",
]

PIVOT_RTOL = 1e-12


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised by the unregularized solve when ``C`` is numerically rank deficient."""


@dataclass(frozen=True, eq=False)
class MicArray:
    """Ordered sensors: positions of shape ``(N, d)`` and one directivity each."""

    positions: np.ndarray
    directivities: tuple

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        dirs = tuple(self.directivities)
        if pos.ndim != 2 or pos.shape[0] != len(dirs):
            raise ValueError("positions must have shape (N, d) matching the directivities")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if any(z.d != pos.shape[1] for z in dirs):
            raise ValueError("directivity dimension does not match positions")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "directivities", dirs)

    @property
    def d(self):
        return self.positions.shape[1]

    @property
    def nu_max(self):
        return max(z.nu_max for z in self.directivities)

    def __len__(self):
        return self.positions.shape[0]

    def coeff_matrix(self, nu_max=None):
        """Directivity coefficients stacked as ``(N, n_basis)``, padded to `nu_max`."""
        m = self.nu_max if nu_max is None else nu_max
        return np.stack([z.padded(m).coeffs for z in self.directivities])

    def as_omni(self):
        """Same positions, every sensor assumed omnidirectional."""
        return MicArray(self.positions, tuple(Directivity.omni(self.d) for _ in self.directivities))


@dataclass(frozen=True, eq=False)
class CMatrix:
    entries: np.ndarray
    k: float
    nu_max: int


@dataclass(frozen=True, eq=False)
class KernelField:
    """Field estimate ``sum_n a_n kappa_k(., centers_n)``."""

    a: np.ndarray
    centers: np.ndarray
    k: float
    d: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex).reshape(-1)
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if c.shape[0] != a.shape[0]:
            raise ValueError("one coefficient per kernel center required")
        if not np.all(np.isfinite(a)):
            raise ValueError("kernel coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "d", c.shape[1])


def _check_k(k):
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k!r}")


def kernel(d, k, r, rp):
    """Reproducing kernel ``J_{d,0}(k |r - r'|)``; broadcasts over leading axes."""
    _check_k(k)
    dist = np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(rp, dtype=float), axis=-1)
    return big_j(d, 0, k * dist)


def gram(positions, d, k):
    pos = np.asarray(positions, dtype=float)
    return kernel(d, k, pos[:, None, :], pos[None, :, :])


def build_c(array, k, nu_max=None):
    """Assemble ``C[i, j] = zeta_i'(d_1) kappa_k(r_i, r_j)``."""
    nu_max = array.nu_max if nu_max is None else nu_max
    if nu_max < array.nu_max:
        raise ValueError("nu_max below the array's directivity degree")
    pos = array.positions
    terms = rk_derivative_terms(array.d, nu_max, k, pos[:, None, :] - pos[None, :, :])
    entries = np.einsum("ijb,ib->ij", terms, array.coeff_matrix(nu_max))
    return CMatrix(entries, float(k), nu_max)


def _entries(c):
    return c.entries if isinstance(c, CMatrix) else np.asarray(c, dtype=complex)


def _lu(mat):
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(mat, check_finite=True)
    diag = np.abs(np.diag(lu))
    if diag.max() == 0.0 or diag.min() <= PIVOT_RTOL * diag.max():
        raise SingularMatrixError("C is numerically singular; use a positive regularization")
    return lu, piv


def effective_lambda(c, lam, relative=False):
    """Absolute regularization; in relative mode scaled by ``sigma_max(C)**2``."""
    if lam < 0:
        raise ValueError("regularization must be non-negative")
    if not relative or lam == 0:
        return float(lam)
    return float(lam) * float(np.linalg.norm(_entries(c), 2)) ** 2


def regularized_inverse(c, lam, relative=False):
    """Matrix ``R`` such that ``a = R s`` (``C^-1`` when ``lam == 0``)."""
    mat = _entries(c)
    lam = effective_lambda(mat, lam, relative)
    n = mat.shape[0]
    if lam == 0:
        return scipy.linalg.lu_solve(_lu(mat), np.eye(n, dtype=complex))
    ch = mat.conj().T
    return scipy.linalg.solve(ch @ mat + lam * np.eye(n), ch, assume_a="her")


def solve_coeffs(c, s, lam, relative=False):
    """Kernel coefficients from sensor outputs.

    ``lam == 0`` solves ``C a = s`` by LU and raises :class:`SingularMatrixError`
    on a pivot below ``1e-12`` relative. ``lam > 0`` returns the Tikhonov
    solution ``(C^H C + lam I)^-1 C^H s``.
    """
    mat = _entries(c)
    s = np.asarray(s, dtype=complex)
    lam = effective_lambda(mat, lam, relative)
    if lam == 0:
        return scipy.linalg.lu_solve(_lu(mat), s)
    ch = mat.conj().T
    return scipy.linalg.solve(ch @ mat + lam * np.eye(mat.shape[0]), ch @ s, assume_a="her")


def reconstruct(fld, eval_points):
    """Evaluate the kernel expansion at points of shape ``(..., d)``."""
    pts = np.asarray(eval_points, dtype=float)
    kern = kernel(fld.d, fld.k, pts[..., None, :], fld.centers)
    return kern @ fld.a


def estimate_spectrum(fld, theta):
    """Angular spectrum estimate ``sum_n a_n exp(i k theta . r_n)``."""
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * fld.k * (theta @ fld.centers.T))
    out = phase @ fld.a
    return out if np.ndim(out) else complex(out)
