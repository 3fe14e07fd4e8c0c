import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussib.analysis import (
    GaussianVectorPair,
    gaussian_mi,
    grad_check,
    logdet,
    measure_equivalence,
    random_gaussian_pair,
    snr_matrix,
    szego_convergence,
)
from gaussib.errors import SingularNoise
from gaussib.waterfill import LN2, vector_ib

seeds = st.integers(0, 2 ** 31)


def test_scalar_mi():
    rho = 0.5
    pair = GaussianVectorPair([[1.0]], [[1.0]], [[rho]])
    assert gaussian_mi(pair) == pytest.approx(-0.5 * math.log2(1 - rho ** 2), abs=1e-14)


def test_independent_is_zero():
    pair = GaussianVectorPair(np.eye(3), 2 * np.eye(2), np.zeros((3, 2)))
    assert gaussian_mi(pair) == pytest.approx(0.0, abs=1e-14)


def test_singular_noise():
    pair = GaussianVectorPair([[1.0]], [[1.0]], [[1.0]])
    with pytest.raises(SingularNoise):
        gaussian_mi(pair)


def test_invalid_joint_covariance():
    with pytest.raises(ValueError):
        GaussianVectorPair([[1.0]], [[1.0]], [[2.0]])


@given(seed=seeds, n=st.integers(1, 5), m=st.integers(1, 5))
def test_mi_symmetric(seed, n, m):
    pair = random_gaussian_pair(n, np.random.default_rng(seed), m)
    assert gaussian_mi(pair) == pytest.approx(gaussian_mi(pair.swapped()), abs=1e-9)


@given(seed=seeds, n=st.integers(1, 5))
def test_mi_is_half_logdet_one_plus_snr(seed, n):
    pair = random_gaussian_pair(n, np.random.default_rng(seed))
    snr = snr_matrix(pair)
    direct = 0.5 * logdet(np.eye(n) + snr) / LN2
    assert gaussian_mi(pair) == pytest.approx(direct, abs=1e-9)


@given(seed=seeds, n=st.integers(1, 4))
def test_data_processing(seed, n):
    # Z = A Y + noise: I(X;Z) <= I(X;Y)
    rng = np.random.default_rng(seed)
    pair = random_gaussian_pair(n, rng)
    a = rng.standard_normal((n, n))
    s_z = a @ pair.sigma_y @ a.T + 0.3 * np.eye(n)
    xz = GaussianVectorPair(pair.sigma_x, s_z, pair.sigma_xy @ a.T)
    assert gaussian_mi(xz) <= gaussian_mi(pair) + 1e-10


@given(seed=seeds, n=st.integers(1, 6))
def test_vector_ib_large_c_is_mi(seed, n):
    pair = random_gaussian_pair(n, np.random.default_rng(seed))
    gammas = tuple(np.maximum(np.linalg.eigvalsh(snr_matrix(pair)), 0.0))
    if max(gammas) == 0:
        return
    # vector rates are per dimension
    assert n * vector_ib(gammas, 40.0).r == pytest.approx(gaussian_mi(pair), abs=1e-6)


@settings(max_examples=25)
@given(seed=seeds, n=st.integers(1, 6), m=st.integers(1, 6))
def test_correlation_snr_equivalence(seed, n, m):
    rep = measure_equivalence(random_gaussian_pair(n, np.random.default_rng(seed), m))
    assert rep.max_mismatch <= 1e-8


def test_szego_ar1(ar1):
    rate, rows = szego_convergence(ar1, [8, 16, 32, 64])
    gaps = [r.gap for r in rows]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    # the block MI overshoots the rate by an O(1/n) edge term
    assert rows[-1].per_symbol_mi >= rate


def test_szego_flat_is_exact(flat):
    rate, rows = szego_convergence(flat, [1, 4, 16])
    assert rate == pytest.approx(1.0, abs=1e-12)
    assert max(r.gap for r in rows) < 1e-10


def test_szego_sizes_must_ascend(flat):
    with pytest.raises(ValueError):
        szego_convergence(flat, [16, 8])


def test_grad_check_detects_wrong_gradient():
    f = lambda x: float(np.sum(x ** 3))
    good = lambda x: 3 * x ** 2
    bad = lambda x: 2 * x ** 2
    x = np.array([0.5, -1.0, 2.0])
    assert grad_check(f, good, x) < 1e-8
    assert grad_check(f, bad, x) > 0.1
    with pytest.raises(ValueError):
        grad_check(f, good, x, h=1e-2)


def test_toeplitz_vector_ib_approaches_process_ib(ar1):
    from gaussib.spectra import cross_covariance_matrix, snr_spectrum, toeplitz_covariance
    from gaussib.waterfill import ib_rate

    target = ib_rate(snr_spectrum(ar1), 1.0).r
    gaps = []
    for n in (16, 64, 256):
        pair = GaussianVectorPair(toeplitz_covariance(ar1.s_x, n), toeplitz_covariance(ar1.s_y, n),
                                  cross_covariance_matrix(ar1.s_xy, n))
        gammas = tuple(np.maximum(np.linalg.eigvalsh(snr_matrix(pair)), 0.0))
        gaps.append(abs(vector_ib(gammas, 1.0).r - target))
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 5e-3
