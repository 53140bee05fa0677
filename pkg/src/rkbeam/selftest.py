"""Property suites comparing closed forms against finite-difference oracles.

Each suite returns a :class:`SuiteResult`; ``run_all`` is what the ``selftest``
CLI subcommand executes.
"""
import math
import time
from dataclasses import dataclass

import numpy as np

from .directivity import Directivity, evaluate, induce, rk_directional_derivative
from .fd import apply_operator, harmonic_monomials, radial_operator
from .harmonics import basis_indices, dim_y, flat_index, n_basis, zonal_kernel, zonal_kernel_closed
from .simharness import ModeField, field_values
from .specialfn import big_j, surface_area

__all__ = ["SuiteResult", "SUITES", "run_all"]


@dataclass
class SuiteResult:
    name: str
    max_error: float
    tolerance: float
    seconds: float

    @property
    def passed(self):
        return bool(self.max_error <= self.tolerance)


def _unit(rng, d, size=None):
    v = rng.normal(size=(d,) if size is None else (size, d))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _operator(d, nu_max, coeffs):
    """Monomial coefficients of ``sum coeffs[j] y_j``."""
    op = {}
    for j, idx in enumerate(basis_indices(d, nu_max)):
        if coeffs[j] == 0:
            continue
        for alpha, c in harmonic_monomials(d, idx).items():
            op[alpha] = op.get(alpha, 0.0) + coeffs[j] * c
    return op


def appendix_a(seed=0):
    """Induced operator on a plane wave equals multiplication by the directivity."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (2, 3):
        for k in (1.0, 10.0):
            for _ in range(3):
                nu_max = int(rng.integers(0, 3))
                nb = n_basis(d, nu_max)
                zeta = Directivity(d, nu_max, rng.uniform(-1, 1, nb) + 1j * rng.uniform(-1, 1, nb))
                op = _operator(d, nu_max, induce(zeta, k).coeffs)
                theta = _unit(rng, d)
                zval = evaluate(zeta, theta)
                scale = max(abs(zval), 0.1 * np.linalg.norm(zeta.coeffs))
                for _ in range(10):
                    r = rng.uniform(-1, 1, d)
                    num = apply_operator(lambda p: np.exp(-1j * k * (p @ theta)), r, op, 1e-4 / k)
                    exact = zval * np.exp(-1j * k * (r @ theta))
                    worst = max(worst, abs(num - exact) / scale)
    return worst


def appendix_b():
    """Radial derivative identity of the kernel functions."""
    worst = 0.0
    for d in (2, 3):
        for nu in (1, 2):
            for z in (0.5, 1.0, 2.0):
                num = radial_operator(lambda t: big_j(d, 0, t), z, nu, 1e-3)
                exact = (-1) ** nu * big_j(d, nu, z) / z**nu
                worst = max(worst, abs(num - exact) / abs(exact))
    return worst


def appendix_c(seed=0):
    """Harmonic operators at the origin pick out scaled mode coefficients."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (2, 3):
        nu_field = 3
        nb = n_basis(d, nu_field)
        fld = ModeField(d, nu_field, rng.uniform(-1, 1, nb) + 1j * rng.uniform(-1, 1, nb))
        k = float(rng.uniform(1.0, 5.0))
        origin = np.zeros(d)
        for nu in range(3):
            for mu in range(dim_y(d, nu)):
                op = harmonic_monomials(d, (nu, mu))
                num = apply_operator(lambda p: field_values(fld, k, p), origin, op, 1e-3 / k)
                exact = k**nu * fld.coeffs[flat_index(d, nu, mu)]
                scale = max(abs(exact), 0.1 * k**nu * np.linalg.norm(fld.coeffs))
                worst = max(worst, abs(num - exact) / scale)
    return worst


def hobson_corollary(seed=0, n_pairs=20):
    """Closed-form kernel derivative against finite differences of the kernel."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (2, 3):
        k = 4.0
        for _ in range(n_pairs):
            rp = rng.uniform(-1, 1, d)
            dist = rng.uniform(0.5, 20.0) / k
            r = rp + dist * _unit(rng, d)
            for nu in range(3):
                lo = n_basis(d, nu - 1) if nu else 0
                block = []
                for mu in range(dim_y(d, nu)):
                    c = np.zeros(n_basis(d, nu), dtype=complex)
                    c[lo + mu] = 1.0
                    zeta = Directivity(d, nu, c)
                    ana = rk_directional_derivative(zeta, k, r, rp)
                    op = {a: induce(zeta, k).coeffs[lo + mu] * v for a, v in harmonic_monomials(d, (nu, mu)).items()}
                    num = apply_operator(lambda p: big_j(d, 0, k * np.linalg.norm(p - rp, axis=-1)), r, op, 1e-3 / k)
                    block.append((ana, num))
                norm = math.sqrt(sum(abs(a) ** 2 for a, _ in block))
                scale = max(norm, 1e-2 * surface_area(d))
                worst = max(worst, max(abs(a - n) for a, n in block) / scale)
    return worst


def addition_theorem(seed=0, n_pairs=100):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for d in (2, 3):
        a = _unit(rng, d, n_pairs)
        b = _unit(rng, d, n_pairs)
        for nu in range(5):
            worst = max(worst, float(np.max(np.abs(zonal_kernel(d, nu, a, b) - zonal_kernel_closed(d, nu, a, b)))))
    return worst


SUITES = {
    "appendix_a": (appendix_a, 1e-5),
    "appendix_b": (appendix_b, 1e-4),
    "appendix_c": (appendix_c, 1e-4),
    "hobson_corollary": (hobson_corollary, 1e-4),
    "addition_theorem": (addition_theorem, 1e-12),
}


def run_suite(name):
    fn, tol = SUITES[name]
    t0 = time.perf_counter()
    err = fn()
    return SuiteResult(name, float(err), tol, time.perf_counter() - t0)


def run_all():
    return [run_suite(name) for name in SUITES]
