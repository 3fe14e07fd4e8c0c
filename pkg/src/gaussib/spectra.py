"""Stationary Gaussian source models on a uniform midpoint frequency grid.

All spectra are tabulated on the grid f_k = -1/2 + (k + 1/2)/N and every
integral over [-1/2, 1/2) is the midpoint rule (1/N) * sum(values).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import fftconvolve

from .errors import ModelError, NonPositiveSpectrum, ZeroBand

__all__ = [
    "FrequencyGrid",
    "Spectrum",
    "CrossSpectrum",
    "BivariateSpectra",
    "LinearForm",
    "DETERMINISTIC_EPS",
    "snr_spectrum",
    "to_linear_form",
    "from_linear_form",
    "rational_response",
    "rational_spectrum",
    "fir_response",
    "autocovariance",
    "cross_covariance",
    "toeplitz_covariance",
    "cross_covariance_matrix",
    "entropy_power",
    "mi_rate",
    "min_phase_filter",
    "synthesize_path",
]

DEFAULT_GRID_POINTS = 4096
DETERMINISTIC_EPS = 1e-12
_SYMMETRY_RTOL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    n_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise ModelError(f"grid needs a positive integer size, got {self.n_points!r}")

    @cached_property
    def frequencies(self) -> np.ndarray:
        f = -0.5 + (np.arange(self.n_points) + 0.5) / self.n_points
        f.setflags(write=False)
        return f

    def integrate(self, values) -> float:
        return float(np.mean(values))


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


def _check_mirror(values, conj, what):
    mirrored = values[::-1].conj() if conj else values[::-1]
    finite = np.isfinite(values) & np.isfinite(mirrored)
    if not np.array_equal(np.isfinite(values), np.isfinite(mirrored)):
        raise ModelError(f"{what} is not symmetric in frequency")
    if not finite.any():
        return
    scale = np.max(np.abs(values[finite]))
    gap = np.max(np.abs(values[finite] - mirrored[finite]))
    if gap > _SYMMETRY_RTOL * max(scale, 1e-300):
        raise ModelError(f"{what} is not symmetric in frequency (max gap {gap:.3g})")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Real, even, nonnegative spectrum tabulated on ``grid``.

    ``+inf`` entries are allowed and mark deterministic frequencies of an
    SNR spectrum.
    """

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise ModelError(
                f"spectrum has shape {v.shape}, grid needs ({self.grid.n_points},)"
            )
        if np.isnan(v).any():
            raise ModelError("spectrum contains NaN")
        finite = v[np.isfinite(v)]
        scale = np.max(np.abs(finite)) if finite.size else 0.0
        if (v < -1e-12 * max(scale, 1.0)).any():
            raise ModelError("spectrum takes negative values")
        v = np.maximum(v, 0.0)
        _check_mirror(v, False, "spectrum")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def constant(cls, grid: FrequencyGrid, level: float) -> "Spectrum":
        return cls(grid, np.full(grid.n_points, float(level)))

    def integral(self) -> float:
        return self.grid.integrate(self.values)

    def __len__(self):
        return self.grid.n_points


@dataclass(frozen=True, eq=False)
class CrossSpectrum:
    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise ModelError(
                f"cross-spectrum has shape {v.shape}, grid needs ({self.grid.n_points},)"
            )
        if not np.isfinite(v).all():
            raise ModelError("cross-spectrum must be finite")
        _check_mirror(v, True, "cross-spectrum")
        object.__setattr__(self, "values", _readonly(v))


@dataclass(frozen=True, eq=False)
class BivariateSpectra:
    """Joint second-order description of a bivariate stationary source."""

    s_x: Spectrum
    s_y: Spectrum
    s_xy: CrossSpectrum

    def __post_init__(self):
        if not (self.s_x.grid == self.s_y.grid == self.s_xy.grid):
            raise ModelError("s_x, s_y and s_xy must share one grid")
        for name, s in (("s_x", self.s_x), ("s_y", self.s_y)):
            if not np.isfinite(s.values).all():
                raise ModelError(f"{name} must be finite")
        cross = np.abs(self.s_xy.values) ** 2
        prod = self.s_x.values * self.s_y.values
        if (cross > prod * (1 + 1e-9) + 1e-300).any():
            raise ModelError("joint spectral density is not positive semidefinite")

    @property
    def grid(self) -> FrequencyGrid:
        return self.s_x.grid


@dataclass(frozen=True, eq=False)
class LinearForm:
    """Y = h * X + W representation: |H(f)|^2 and the noise spectrum S_W."""

    h_mag_sq: Spectrum
    s_w: Spectrum


def _require_positive_marginals(src):
    active = np.abs(src.s_xy.values) > 0
    bad = active & ((src.s_x.values <= 0) | (src.s_y.values <= 0))
    if bad.any():
        raise NonPositiveSpectrum(
            f"s_x or s_y vanishes at {int(bad.sum())} frequencies where s_xy != 0"
        )


def snr_spectrum(src: BivariateSpectra, eps: float = DETERMINISTIC_EPS) -> Spectrum:
    """Gamma(f) = |S_XY|^2 / (S_X S_Y - |S_XY|^2).

    Frequencies where the conditional noise S_X S_Y - |S_XY|^2 is at most
    ``eps * S_X S_Y`` while S_XY != 0 are deterministic and get ``+inf``.
    """
    _require_positive_marginals(src)
    cross = np.abs(src.s_xy.values) ** 2
    prod = src.s_x.values * src.s_y.values
    noise = prod - cross
    gamma = np.zeros_like(prod)
    live = cross > 0
    deterministic = live & (noise <= eps * prod)
    regular = live & ~deterministic
    gamma[regular] = cross[regular] / noise[regular]
    gamma[deterministic] = np.inf
    return Spectrum(src.grid, gamma)


def to_linear_form(src: BivariateSpectra) -> LinearForm:
    _require_positive_marginals(src)
    s_x = src.s_x.values
    cross = np.abs(src.s_xy.values) ** 2
    h_sq = np.zeros_like(s_x)
    s_w = src.s_y.values.copy()
    live = s_x > 0
    h_sq[live] = cross[live] / s_x[live] ** 2
    s_w[live] = src.s_y.values[live] - cross[live] / s_x[live]
    # rounding can leave -1e-17 where the source is deterministic
    s_w = np.where(s_w < 0, 0.0, s_w)
    return LinearForm(Spectrum(src.grid, h_sq), Spectrum(src.grid, s_w))


def from_linear_form(s_x: Spectrum, h, s_w: Spectrum) -> BivariateSpectra:
    """Build the joint spectra of X and Y = h * X + W from H(f), S_X and S_W."""
    h = np.asarray(h, dtype=complex)
    s_xy = CrossSpectrum(s_x.grid, h * s_x.values)
    s_y = Spectrum(s_x.grid, np.abs(h) ** 2 * s_x.values + s_w.values)
    return BivariateSpectra(s_x, s_y, s_xy)


def _poly_on_circle(coeffs, freqs):
    k = np.arange(len(coeffs))
    return np.exp(-2j * np.pi * np.outer(freqs, k)) @ np.asarray(coeffs, dtype=complex)


def rational_response(grid: FrequencyGrid, ar=(), ma=()) -> np.ndarray:
    """B(f)/A(f) with A = 1 - sum ar_k z^-k and B = 1 + sum ma_k z^-k, z = e^{j2 pi f}."""
    f = grid.frequencies
    a = _poly_on_circle(np.concatenate([[1.0], -np.asarray(ar, dtype=float)]), f)
    b = _poly_on_circle(np.concatenate([[1.0], np.asarray(ma, dtype=float)]), f)
    if (np.abs(a) == 0).any():
        raise ModelError("AR polynomial has a root on the unit circle")
    return b / a


def rational_spectrum(grid: FrequencyGrid, ar=(), ma=(), variance=1.0) -> Spectrum:
    """ARMA spectrum ``variance * |B|^2 / |A|^2`` evaluated on the grid.

    >>> g = FrequencyGrid(8)
    >>> float(rational_spectrum(g, variance=2.0).values[3])
    2.0
    """
    if variance < 0:
        raise ModelError("innovation variance must be nonnegative")
    return Spectrum(grid, variance * np.abs(rational_response(grid, ar, ma)) ** 2)


def fir_response(grid: FrequencyGrid, taps, delay: int = 0) -> np.ndarray:
    """H(f) = sum_m taps[m] e^{-j2 pi f (m - delay)} on the grid."""
    taps = np.asarray(taps, dtype=float)
    m = np.arange(len(taps)) - delay
    return np.exp(-2j * np.pi * np.outer(grid.frequencies, m)) @ taps


def _lags_transform(grid, values, lags):
    f = grid.frequencies
    lags = np.asarray(lags)
    return np.exp(2j * np.pi * np.outer(lags, f)) @ values / grid.n_points


def autocovariance(s: Spectrum, max_lag: int) -> np.ndarray:
    """R[k] for k = 0..max_lag via the midpoint inverse transform."""
    if not np.isfinite(s.values).all():
        raise ModelError("autocovariance needs a finite spectrum")
    return _lags_transform(s.grid, s.values, np.arange(max_lag + 1)).real


def cross_covariance(s_xy: CrossSpectrum, lags) -> np.ndarray:
    """R_XY[k] = E[X_t Y_{t+k}] for the given integer lags."""
    return _lags_transform(s_xy.grid, s_xy.values, lags).real


def toeplitz_covariance(s: Spectrum, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("block length must be >= 1")
    return toeplitz(autocovariance(s, n - 1))


def cross_covariance_matrix(s_xy: CrossSpectrum, n: int) -> np.ndarray:
    """Matrix with entries E[X_i Y_j] = R_XY[j - i]."""
    r = cross_covariance(s_xy, np.arange(-(n - 1), n))
    idx = np.arange(n)
    return r[(idx[None, :] - idx[:, None]) + n - 1]


def entropy_power(s: Spectrum, allow_zero: bool = False) -> float:
    """exp of the grid average of log S.

    A spectrum that vanishes on some grid points raises ZeroBand, or returns
    0.0 when ``allow_zero`` is set.
    """
    v = s.values
    if (v <= 0).any():
        if allow_zero:
            return 0.0
        raise ZeroBand(f"spectrum is zero at {int((v <= 0).sum())} grid points")
    return float(np.exp(np.mean(np.log(v))))


def mi_rate(src: BivariateSpectra) -> float:
    """Mutual information rate 1/2 int log2(1 + Gamma) df, in bits per sample."""
    gamma = snr_spectrum(src).values
    return 0.5 * float(np.mean(np.log1p(gamma))) / np.log(2)


def min_phase_filter(s: Spectrum, fft_factor: int = 8, floor: float = 1e-12,
                     tail: float = 1e-26) -> np.ndarray:
    """Causal minimum-phase impulse response with |H(f)|^2 = S(f).

    The real cepstrum of sqrt(S) is computed from the grid samples by the
    midpoint rule, folded onto positive quefrencies and exponentiated on an
    FFT grid ``fft_factor`` times finer than the tabulation grid. Values
    below ``floor * max(S)`` are floored first, which biases zero bands
    upward. The response is truncated once the remaining energy drops below
    ``tail`` of the total.
    """
    v = s.values
    if not np.isfinite(v).all():
        raise ModelError("cannot factor a spectrum with infinite values")
    peak = v.max()
    if peak <= 0:
        return np.zeros(1)
    n = s.grid.n_points
    m = max(fft_factor, 1) * n
    m += m % 2
    half_log = 0.5 * np.log(np.maximum(v, floor * peak))
    n_cep = min(n // 2, m // 2 - 1) + 1
    cep = _lags_transform(s.grid, half_log, np.arange(n_cep)).real
    fold = np.zeros(m)
    fold[0] = cep[0]
    fold[1:n_cep] = 2 * cep[1:]
    h = np.fft.ifft(np.exp(np.fft.fft(fold))).real[: m // 2]
    energy = np.cumsum(h[::-1] ** 2)[::-1]
    keep = np.nonzero(energy > tail * energy[0])[0]
    return h[: keep[-1] + 1]


def synthesize_path(s: Spectrum, length: int, seed: int = 0, *,
                    fft_factor: int = 8) -> np.ndarray:
    """Sample a stationary Gaussian sequence with power spectrum ``s``.

    Unit-variance white noise drives the minimum-phase factor of ``s``; the
    first ``len(filter)`` outputs are discarded as burn-in.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    h = min_phase_filter(s, fft_factor=fft_factor)
    burn = len(h)
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(length + burn)
    y = fftconvolve(e, h)[burn: burn + length]
    return y
