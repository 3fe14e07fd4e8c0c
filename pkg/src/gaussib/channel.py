"""Frequency-domain realization of the optimal IB test channel.

Chain:  Y -> omega (noise whitening) -> g (shaping) -> h1 (prefilter)
          -> + N(0, theta) -> h2 (postfilter) -> Z

Only magnitudes are prescribed. Every designed filter is zero-phase; the
FIR realization shifts the truncated impulse response by a delay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .spectra import BivariateSpectra, Spectrum, fir_response, snr_spectrum, to_linear_form
from .waterfill import LN2, WaterFillSolution, ib_rate

__all__ = [
    "ForwardChannel",
    "FirRealization",
    "design_forward_channel",
    "audit_rates",
    "chain_rates",
    "realize_fir",
]


@dataclass(frozen=True, eq=False)
class ForwardChannel:
    omega_sq: Spectrum
    g_sq: Spectrum
    h1_sq: Spectrum
    theta: float
    solution: WaterFillSolution

    @property
    def h2_sq(self) -> Spectrum:
        return self.h1_sq

    @property
    def grid(self):
        return self.omega_sq.grid


@dataclass(frozen=True, eq=False)
class FirRealization:
    """Truncated, delayed FIR taps for each filter of the chain.

    ``delays[name]`` is the index of the zero-lag tap. The postfilter is the
    time reverse of the prefilter, so its delay is ``len(taps) - 1 - delay``.
    """

    taps: dict
    delays: dict
    errors: dict = field(default_factory=dict)

    @property
    def total_delay(self) -> int:
        return int(sum(self.delays.values()))

    @property
    def max_error(self) -> float:
        return max(self.errors.values())

    def response(self, name, grid) -> np.ndarray:
        return fir_response(grid, self.taps[name], self.delays[name])


def design_forward_channel(src: BivariateSpectra, c_target: float) -> ForwardChannel:
    gamma = snr_spectrum(src)
    if np.isinf(gamma.values).any():
        raise ModelError("forward channel needs nondegenerate noise (S_W > 0 wherever S_XY != 0)")
    lf = to_linear_form(src)
    s_w = lf.s_w.values
    if (s_w <= 0).any():
        raise ModelError("noise spectrum S_W vanishes; whitening filter undefined")
    sol = ib_rate(gamma, c_target)
    g = gamma.values
    omega_sq = 1.0 / s_w
    g_sq = g / (1.0 + g)
    h1_sq = np.zeros_like(g)
    act = sol.active_mask
    # prefilter input has spectrum Gamma, so D_theta is taken on that scale
    h1_sq[act] = 1.0 - sol.d_theta.values[act] / g[act]
    grid = src.grid
    return ForwardChannel(
        Spectrum(grid, omega_sq),
        Spectrum(grid, g_sq),
        Spectrum(grid, h1_sq),
        float(sol.theta),
        sol,
    )


def chain_rates(src: BivariateSpectra, f_sq, h2_sq, theta: float):
    """Gaussian MI rates (bits) of the chain Z = h2 * (f * Y + N), N ~ N(0, theta).

    ``f_sq`` is |F(f)|^2 of everything before the noise. Returns
    (I(Y;Z), I(X;Z)) computed from the joint spectra of (X, Y, Z) alone.
    """
    f_sq = np.asarray(f_sq, dtype=float)
    h2_sq = np.asarray(h2_sq, dtype=float)
    s_x, s_y = src.s_x.values, src.s_y.values
    cross = np.abs(src.s_xy.values) ** 2
    if theta <= 0:
        raise ValueError("noise variance must be positive")
    signal = f_sq * s_y
    live = h2_sq > 0
    snr_yz = np.where(live, signal / theta, 0.0)
    # |S_XZ|^2 and S_X S_Z - |S_XZ|^2, common factor |H2|^2 dropped on live bins
    num = cross * f_sq
    den = s_x * (signal + theta) - num
    with np.errstate(divide="ignore", invalid="ignore"):
        snr_xz = np.where(live & (num > 0), num / den, 0.0)
    c = 0.5 * float(np.mean(np.log1p(snr_yz))) / LN2
    r = 0.5 * float(np.mean(np.log1p(snr_xz))) / LN2
    return c, r


def audit_rates(ch: ForwardChannel, src: BivariateSpectra):
    """(I(Y;Z), I(X;Z)) in bits achieved by the designed chain on ``src``."""
    if ch.theta == 0:
        return 0.0, 0.0
    f_sq = ch.omega_sq.values * ch.g_sq.values * ch.h1_sq.values
    return chain_rates(src, f_sq, ch.h2_sq.values, ch.theta)


def _zero_phase_taps(target: Spectrum, n_taps, delay):
    amp = np.sqrt(target.values)
    lags = np.arange(n_taps) - delay
    return np.cos(2 * np.pi * np.outer(lags, target.grid.frequencies)) @ amp / len(amp)


def realize_fir(ch: ForwardChannel, taps: int, delay: int) -> FirRealization:
    """Truncated zero-phase FIR approximations of omega, g, h1 and h2.

    Each magnitude response sqrt(|X(f)|^2) is inverse transformed on the
    grid, shifted by ``delay`` and cut to ``taps`` coefficients. The L-inf
    magnitude error of each realized response on the grid is reported.
    """
    if taps < 1 or not 0 <= delay < taps:
        raise ValueError("need taps >= 1 and 0 <= delay < taps")
    grid = ch.grid
    coeffs, delays, errors = {}, {}, {}
    for name, target in (("omega", ch.omega_sq), ("g", ch.g_sq), ("h1", ch.h1_sq)):
        coeffs[name] = _zero_phase_taps(target, taps, delay)
        delays[name] = delay
    coeffs["h2"] = coeffs["h1"][::-1].copy()
    delays["h2"] = taps - 1 - delay
    targets = {"omega": ch.omega_sq, "g": ch.g_sq, "h1": ch.h1_sq, "h2": ch.h2_sq}
    for name, target in targets.items():
        realized = np.abs(fir_response(grid, coeffs[name], delays[name]))
        errors[name] = float(np.max(np.abs(realized - np.sqrt(target.values))))
    return FirRealization(coeffs, delays, errors)
