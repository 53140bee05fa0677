import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rkbeam.directivity import Directivity, rk_directional_derivative
from rkbeam.kernelfield import (
    CMatrix,
    KernelField,
    MicArray,
    SingularMatrixError,
    build_c,
    effective_lambda,
    estimate_spectrum,
    gram,
    kernel,
    reconstruct,
    regularized_inverse,
    solve_coeffs,
)

from conftest import bessel_series

TWO_PI = 2 * math.pi


def _j0_root():
    lo, hi = 2.0, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if bessel_series(0, lo) * bessel_series(0, mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


J0_ROOT = _j0_root()


def _omni_array(pos):
    pos = np.asarray(pos, dtype=float)
    return MicArray(pos, tuple(Directivity.omni(pos.shape[1]) for _ in pos))


def test_j0_root_oracle():
    assert J0_ROOT == pytest.approx(2.404826, abs=1e-6)


def test_kernel_examples():
    assert kernel(2, 1.0, [0.3, 0.1], [0.3, 0.1]) == pytest.approx(TWO_PI)
    assert kernel(3, 1.0, [0, 0, 0], [0, 0, 0]) == pytest.approx(4 * math.pi)
    assert kernel(2, 1.0, [1.0, 0.0], [0.0, 0.0]) == pytest.approx(TWO_PI * 0.7651976866, abs=1e-9)
    with pytest.raises(ValueError):
        kernel(2, -1.0, [0, 0], [1, 0])


def test_gram_examples():
    np.testing.assert_allclose(gram([[0.2, 0.1]], 2, 3.0), [[TWO_PI]])
    g = gram([[0.2, 0.1], [0.2, 0.1]], 2, 3.0)
    np.testing.assert_allclose(g, np.full((2, 2), TWO_PI))
    assert np.linalg.matrix_rank(g) == 1
    k = 2.0
    g = gram([[0.0, 0.0], [J0_ROOT / k, 0.0]], 2, k)
    assert abs(g[0, 1]) < 1e-9


@pytest.mark.parametrize("seed", range(50))
def test_gram_psd(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(1, 31))
    pos = r.uniform(-0.2, 0.2, (n, 2))
    g = gram(pos, 2, r.uniform(1, 150))
    assert np.isrealobj(g)
    np.testing.assert_array_equal(g, g.T)
    assert np.linalg.eigvalsh(g).min() >= -1e-9 * np.trace(g)


@pytest.mark.parametrize("seed", range(50))
def test_build_c_equals_gram_for_omni(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(1, 31))
    pos = r.uniform(-0.2, 0.2, (n, 2))
    k = r.uniform(1, 150)
    np.testing.assert_allclose(build_c(_omni_array(pos), k).entries, gram(pos, 2, k), rtol=0, atol=1e-12)


def test_build_c_single_mic():
    z = Directivity(2, 2, [0.7 - 0.2j, 1, 2, 3, 4])
    C = build_c(MicArray([[0.1, 0.2]], (z,)), 5.0)
    assert C.entries[0, 0] == pytest.approx((0.7 - 0.2j) * math.sqrt(TWO_PI))


def test_build_c_matches_pointwise(rng):
    dip = Directivity(2, 1, [0, 1.0, 0])
    arr = MicArray([[0.0, 0.0], [0.05, 0.02]], (Directivity.omni(2, 1), dip))
    C = build_c(arr, 20.0)
    for i in range(2):
        for j in range(2):
            ref = rk_directional_derivative(arr.directivities[i], 20.0, arr.positions[i], arr.positions[j])
            assert C.entries[i, j] == ref


def test_build_c_mixed_degrees(rng):
    arr = MicArray(rng.uniform(-0.1, 0.1, (3, 2)), (Directivity.omni(2), Directivity(2, 2, rng.normal(size=5)),
                                                    Directivity(2, 1, rng.normal(size=3))))
    C = build_c(arr, 10.0)
    assert C.nu_max == 2
    assert C.entries[2, 0] == pytest.approx(
        rk_directional_derivative(arr.directivities[2], 10.0, arr.positions[2], arr.positions[0])
    )
    with pytest.raises(ValueError):
        build_c(arr, 10.0, nu_max=1)


def test_mic_array_validation():
    with pytest.raises(ValueError):
        MicArray([[0.0, 0.0]], (Directivity.omni(2), Directivity.omni(2)))
    with pytest.raises(ValueError):
        MicArray([[np.inf, 0.0]], (Directivity.omni(2),))
    with pytest.raises(ValueError):
        MicArray([[0.0, 0.0]], (Directivity.omni(3),))


def test_solve_examples():
    assert solve_coeffs(np.array([[TWO_PI]]), [TWO_PI], 0.0) == pytest.approx([1.0])
    s = np.array([1 + 2j, -3, 0.5j])
    np.testing.assert_allclose(solve_coeffs(np.eye(3), s, 0.0), s)
    assert solve_coeffs(np.array([[2.0]]), [2.0], 1.0) == pytest.approx([0.8])


def test_solve_accepts_cmatrix():
    C = CMatrix(np.array([[2.0 + 0j]]), 1.0, 0)
    assert solve_coeffs(C, [2.0], 1.0) == pytest.approx([0.8])


def test_singular_raises():
    C = build_c(_omni_array([[0.1, 0.1], [0.1, 0.1]]), 5.0)
    with pytest.raises(SingularMatrixError):
        solve_coeffs(C, [1.0, 1.0], 0.0)
    with pytest.raises(np.linalg.LinAlgError):
        regularized_inverse(C, 0.0)
    a = solve_coeffs(C, [1.0, 1.0], 1e-3)
    assert np.all(np.isfinite(a))


def test_negative_lambda():
    with pytest.raises(ValueError):
        solve_coeffs(np.eye(2), [1, 1], -1.0)


def test_relative_lambda():
    C = np.diag([3.0, 1.0])
    assert effective_lambda(C, 0.1, relative=True) == pytest.approx(0.9)
    assert effective_lambda(C, 0.1) == 0.1


def test_tikhonov_uses_conjugate_transpose(rng):
    C = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    s = rng.normal(size=4) + 1j * rng.normal(size=4)
    lam = 0.3
    # minimiser of |C a - s|^2 + lam |a|^2 via stacked least squares
    A = np.vstack([C, math.sqrt(lam) * np.eye(4)])
    ref = np.linalg.lstsq(A, np.concatenate([s, np.zeros(4)]), rcond=None)[0]
    np.testing.assert_allclose(solve_coeffs(C, s, lam), ref, atol=1e-12)
    np.testing.assert_allclose(regularized_inverse(C, lam) @ s, ref, atol=1e-12)


def test_tikhonov_limit_monotone(rng):
    C = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)) + 4 * np.eye(6)
    s = rng.normal(size=6) + 1j * rng.normal(size=6)
    a0 = solve_coeffs(C, s, 0.0)
    errs = [np.linalg.norm(solve_coeffs(C, s, lam) - a0) for lam in (1e-2, 1e-4, 1e-6)]
    assert errs[0] > errs[1] > errs[2]


def _well_conditioned_positions(r, n, k):
    while True:
        pos = r.uniform(-0.5, 0.5, (n, 2))
        if np.linalg.cond(gram(pos, 2, k)) < 1e10:
            return pos


@pytest.mark.parametrize("seed", range(5))
def test_reproducing_property(seed):
    r = np.random.default_rng(seed)
    k = 30.0
    pos = _well_conditioned_positions(r, 12, k)
    j = int(r.integers(12))
    arr = _omni_array(pos)
    s = kernel(2, k, pos, pos[j])
    a = solve_coeffs(build_c(arr, k), s, 0.0)
    pts = r.uniform(-0.5, 0.5, (100, 2))
    ref = kernel(2, k, pts, pos[j])
    est = reconstruct(KernelField(a, pos, k), pts)
    assert np.max(np.abs(est - ref)) <= 1e-8 * np.max(np.abs(ref))


def test_reconstruct_examples():
    fld = KernelField([1.0], [[0.3, -0.2]], 4.0)
    assert reconstruct(fld, [0.3, -0.2]) == pytest.approx(TWO_PI)
    zero = KernelField([0.0, 0.0], [[0, 0], [1, 1]], 4.0)
    np.testing.assert_array_equal(reconstruct(zero, np.random.default_rng(0).normal(size=(7, 2))), 0)
    k = 3.0
    at_origin = KernelField([1.0], [[0.0, 0.0]], k)
    assert abs(reconstruct(at_origin, [0.0, J0_ROOT / k])) < 1e-9


def test_reconstruct_shapes():
    fld = KernelField([1.0, 2.0], [[0, 0], [0.1, 0]], 4.0)
    assert reconstruct(fld, np.zeros((3, 5, 2))).shape == (3, 5)


def test_kernel_field_validation():
    with pytest.raises(ValueError):
        KernelField([1.0, 2.0], [[0, 0]], 1.0)
    with pytest.raises(ValueError):
        KernelField([np.nan], [[0, 0]], 1.0)


def test_estimate_spectrum_examples():
    assert estimate_spectrum(KernelField([1.0], [[0, 0]], 2.0), [0.6, 0.8]) == pytest.approx(1.0)
    assert estimate_spectrum(KernelField([0.0], [[0.4, 0]], 2.0), [0.6, 0.8]) == 0
    k = 2.0
    fld = KernelField([1.0], [[math.pi / k, 0.0]], k)
    assert estimate_spectrum(fld, [1.0, 0.0]) == pytest.approx(-1.0)


@given(seed=st.integers(0, 2**32 - 1))
def test_spectrum_synthesises_field(seed):
    # the field is the circle integral of the angular spectrum times plane waves
    r = np.random.default_rng(seed)
    fld = KernelField(r.normal(size=4) + 1j * r.normal(size=4), r.uniform(-0.3, 0.3, (4, 2)), 7.0)
    t = np.linspace(0, TWO_PI, 512, endpoint=False)
    dirs = np.stack([np.cos(t), np.sin(t)], axis=-1)
    p = r.uniform(-0.3, 0.3, 2)
    synth = TWO_PI * np.mean(estimate_spectrum(fld, dirs) * np.exp(-1j * 7.0 * dirs @ p))
    assert synth == pytest.approx(reconstruct(fld, p), abs=1e-9)
