"""Independent oracles: exact Gaussian MI of finite vectors, Szego limits,
the correlation/SNR equivalence, finite-difference gradient checks and a
brute-force bound for the privacy funnel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularNoise
from .spectra import (
    BivariateSpectra,
    cross_covariance_matrix,
    mi_rate,
    toeplitz_covariance,
)
from .waterfill import LN2

__all__ = [
    "GaussianVectorPair",
    "SzegoRow",
    "EquivalenceReport",
    "logdet",
    "inv_sqrt_psd",
    "gaussian_mi",
    "snr_matrix",
    "szego_convergence",
    "measure_equivalence",
    "grad_check",
    "random_gaussian_pair",
    "pf_grid_oracle",
]


def _sym(m):
    return 0.5 * (m + m.T)


def logdet(m: np.ndarray) -> float:
    """Natural log-determinant of a symmetric positive-definite matrix."""
    chol = np.linalg.cholesky(_sym(np.asarray(m, dtype=float)))
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def inv_sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(_sym(m))
    if w.min() <= 0:
        raise SingularNoise("matrix is not positive definite")
    return (v / np.sqrt(w)) @ v.T


@dataclass(frozen=True, eq=False)
class GaussianVectorPair:
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_xy: np.ndarray

    def __post_init__(self):
        sx, sy, sxy = (np.asarray(a, dtype=float) for a in (self.sigma_x, self.sigma_y, self.sigma_xy))
        if sx.shape[0] != sx.shape[1] or sy.shape[0] != sy.shape[1] or sxy.shape != (sx.shape[0], sy.shape[0]):
            raise ValueError("inconsistent covariance shapes")
        joint = np.block([[sx, sxy], [sxy.T, sy]])
        w = np.linalg.eigvalsh(_sym(joint))
        scale = max(abs(w).max(), 1e-300)
        if w.min() < -1e-9 * scale:
            raise ValueError("joint covariance is not positive semidefinite")
        object.__setattr__(self, "sigma_x", sx)
        object.__setattr__(self, "sigma_y", sy)
        object.__setattr__(self, "sigma_xy", sxy)

    def swapped(self) -> "GaussianVectorPair":
        return GaussianVectorPair(self.sigma_y, self.sigma_x, self.sigma_xy.T)

    def noise_covariance(self) -> np.ndarray:
        """Sigma_W = Sigma_Y - Sigma_XY^T Sigma_X^-1 Sigma_XY of Y = K X + W."""
        return _sym(self.sigma_y - self.sigma_xy.T @ np.linalg.solve(self.sigma_x, self.sigma_xy))


def gaussian_mi(pair: GaussianVectorPair) -> float:
    """I(X;Y) in bits as 1/2 log det(I + SNR) = 1/2 (log|Sigma_Y| - log|Sigma_W|)."""
    s_w = pair.noise_covariance()
    try:
        ld_w = logdet(s_w)
    except np.linalg.LinAlgError:
        raise SingularNoise("conditional noise covariance is singular") from None
    return 0.5 * (logdet(pair.sigma_y) - ld_w) / LN2


def snr_matrix(pair: GaussianVectorPair) -> np.ndarray:
    """Sigma_W^-1/2 K Sigma_X K^T Sigma_W^-1/2 with K = Sigma_XY^T Sigma_X^-1."""
    k = np.linalg.solve(pair.sigma_x, pair.sigma_xy).T
    w_is = inv_sqrt_psd(pair.noise_covariance())
    return _sym(w_is @ k @ pair.sigma_x @ k.T @ w_is)


@dataclass(frozen=True)
class SzegoRow:
    n: int
    per_symbol_mi: float
    gap: float


def szego_convergence(src: BivariateSpectra, sizes) -> tuple:
    """Per-symbol MI of n-blocks against the spectral MI rate.

    Returns ``(rate, rows)`` where ``rate`` is 1/2 int log2(1 + Gamma) df
    and each row carries (n, I(X^n; Y^n)/n, |rate - I/n|).
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    rate = mi_rate(src)
    rows = []
    for n in sizes:
        pair = GaussianVectorPair(
            toeplitz_covariance(src.s_x, n),
            toeplitz_covariance(src.s_y, n),
            cross_covariance_matrix(src.s_xy, n),
        )
        per = gaussian_mi(pair) / n
        rows.append(SzegoRow(n, float(per), float(abs(rate - per))))
    return rate, rows


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    d: np.ndarray
    gamma: np.ndarray
    max_mismatch: float


def measure_equivalence(pair: GaussianVectorPair) -> EquivalenceReport:
    """Singular values of the normalized correlation vs SNR eigenvalues.

    Both lists are sorted descending; the mismatch is
    max |gamma_i - d_i^2/(1 - d_i^2)| / (1 + gamma_i).
    """
    corr = inv_sqrt_psd(pair.sigma_x) @ pair.sigma_xy @ inv_sqrt_psd(pair.sigma_y)
    d = np.sort(np.linalg.svd(corr, compute_uv=False))[::-1]
    if d.size and d.max() >= 1 - 1e-12:
        raise SingularNoise("a canonical correlation equals one")
    gamma = np.sort(np.linalg.eigvalsh(snr_matrix(pair)))[::-1]
    m = min(d.size, gamma.size)
    # the SNR matrix lives in Y-space; pad d with zeros when dim Y > dim X
    d_full = np.zeros(gamma.size)
    d_full[:m] = d[:m]
    implied = d_full ** 2 / (1 - d_full ** 2)
    mismatch = float(np.max(np.abs(gamma - implied) / (1 + gamma))) if gamma.size else 0.0
    return EquivalenceReport(d, gamma, mismatch)


def grad_check(f, grad, point, h: float = 1e-6) -> float:
    """Max error of ``grad(point)`` against central differences of ``f``.

    Errors are relative to the largest gradient component (or 1 when the
    gradient is numerically zero).
    """
    if not 1e-7 <= h <= 1e-4:
        raise ValueError("step h should lie in [1e-7, 1e-4]")
    x = np.array(point, dtype=float)
    analytic = np.asarray(grad(x), dtype=float)
    numeric = np.zeros_like(x)
    flat = x.reshape(-1)
    out = numeric.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        out[i] = (fp - fm) / (2 * h)
    scale = max(float(np.max(np.abs(analytic))), 1.0 if np.allclose(analytic, 0) else 0.0)
    return float(np.max(np.abs(numeric - analytic))) / scale


def random_gaussian_pair(n: int, rng, m: int | None = None) -> GaussianVectorPair:
    """Seeded random pair with a positive-definite joint covariance."""
    m = n if m is None else m
    a = rng.standard_normal((n + m, n + m + 2))
    joint = a @ a.T / (n + m + 2) + 1e-3 * np.eye(n + m)
    return GaussianVectorPair(joint[:n, :n], joint[n:, n:], joint[:n, n:])


def pf_grid_oracle(inst, step: float = 0.01):
    """Upper bound on the relaxed PF minimum by exhaustive search.

    Rates r_i run over multiples of ``step`` with sum(r) = n * c1 and U1
    over signed permutation matrices. The objective is evaluated with a
    plain determinant of I - U^T Phi^2 U V2^T Psi^2 V2 (no Cholesky, no
    symmetrization). Returns (value, u1, rates).
    """
    n = inst.n
    total = n * inst.c1
    b = inst.v2.T @ np.diag(inst.psi ** 2) @ inst.v2
    k_total = int(round(total / step))
    grid = []
    for combo in itertools.product(range(k_total + 1), repeat=n - 1):
        s = sum(combo)
        if s <= k_total:
            grid.append(combo + (k_total - s,))
    rates = np.array(grid, dtype=float) * (total / k_total if k_total else 0.0)
    p_all = -np.expm1(-2.0 * LN2 * rates)
    best = (math.inf, None, None)
    eye = np.eye(n)
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1.0, -1.0), repeat=n):
            u = eye[list(perm)] * np.array(signs)[:, None]
            # batched det(I - U^T P U B) over the rate grid
            ut_p_u = np.einsum("ki,rk,kj->rij", u, p_all, u)
            mats = eye[None] - ut_p_u @ b
            vals = -0.5 * np.log(np.linalg.det(mats)) / (n * LN2)
            i = int(np.argmin(vals))
            if vals[i] < best[0]:
                best = (float(vals[i]), u, rates[i])
    return best
