"""Compound (max-min) information bottleneck with an MI floor C1 on (X, Y).

The closed form rate is attained by a white SNR spectrum. ``saddle_check``
gives a grid certificate of that claim against two-band perturbations,
for both the adversary (source) and the encoder (compression allocation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import BivariateSpectra, CrossSpectrum, Spectrum, mi_rate
from .waterfill import LN2, scalar_ib, vector_ib

__all__ = [
    "CompoundSolution",
    "SaddleReport",
    "comib_rate",
    "construct_optimal",
    "saddle_check",
    "MARGIN_TOL",
]

MARGIN_TOL = 1e-9


def _one_minus_pow(c):
    """1 - 2^(-2c), accurate for small c."""
    return -math.expm1(-2.0 * c * LN2)


def comib_rate(c1: float, c2: float) -> float:
    """-1/2 log2[1 - (1 - 2^-2c1)(1 - 2^-2c2)] in bits."""
    if c1 < 0 or c2 < 0:
        raise ValueError("rates must be nonnegative")
    return -0.5 * math.log1p(-_one_minus_pow(c1) * _one_minus_pow(c2)) / LN2


@dataclass(frozen=True, eq=False)
class CompoundSolution:
    """Optimal compound construction.

    ``h_sq``, ``s_w``, ``g_sq``, ``s_v`` are the filter formulas written in
    terms of the given marginals. ``normalized`` is the unit-variance white
    construction (X white, Y = hX + W, Z = gY + V) whose audited rates
    ``audit`` = (I(X;Y), I(Y;Z), I(X;Z)) are exactly (c1, c2, rate).
    ``verbatim_audit`` gives the same three rates for the recorded formulas
    applied to the given marginals; they only agree with the normalized
    ones when the marginals are flat with S_Y = S_X.
    """

    c1: float
    c2: float
    gamma: float
    lam: float
    rate: float
    h_sq: Spectrum
    g_sq: Spectrum
    s_w: Spectrum
    s_v: Spectrum
    normalized: dict
    audit: tuple
    verbatim_audit: tuple


def _chain_audit(s_x, h_sq, s_w, g_sq, s_v):
    """(I(X;Y), I(Y;Z), I(X;Z)) for Y = hX + W, Z = gY + V with zero-phase h, g."""
    grid = s_x.grid
    h = np.sqrt(h_sq)
    g = np.sqrt(g_sq)
    s_y = h_sq * s_x.values + s_w
    xy = BivariateSpectra(s_x, Spectrum(grid, s_y), CrossSpectrum(grid, h * s_x.values))
    s_z = g_sq * s_y + s_v
    yz = BivariateSpectra(Spectrum(grid, s_y), Spectrum(grid, s_z), CrossSpectrum(grid, g * s_y))
    xz = BivariateSpectra(s_x, Spectrum(grid, s_z), CrossSpectrum(grid, g * h * s_x.values))
    return mi_rate(xy), mi_rate(yz), mi_rate(xz)


def construct_optimal(s_x: Spectrum, s_y: Spectrum, c1: float, c2: float) -> CompoundSolution:
    grid = s_x.grid
    gamma = math.expm1(2.0 * c1 * LN2)
    lam = math.expm1(2.0 * c2 * LN2)
    ratio = s_y.values / s_x.values
    h_sq = Spectrum(grid, ratio / (1.0 + gamma))
    s_w = Spectrum(grid, ratio / (1.0 + gamma))
    g_sq = Spectrum.constant(grid, 1.0 / (1.0 + lam))
    s_v = Spectrum.constant(grid, 1.0 / (1.0 + lam))
    verbatim = _chain_audit(s_x, h_sq.values, s_w.values, g_sq.values, s_v.values)

    unit = Spectrum.constant(grid, 1.0)
    norm = {
        "h_sq": Spectrum.constant(grid, gamma / (1.0 + gamma)),
        "s_w": Spectrum.constant(grid, 1.0 / (1.0 + gamma)),
        "g_sq": Spectrum.constant(grid, lam / (1.0 + lam)),
        "s_v": Spectrum.constant(grid, 1.0 / (1.0 + lam)),
    }
    audit = _chain_audit(unit, norm["h_sq"].values, norm["s_w"].values,
                         norm["g_sq"].values, norm["s_v"].values)
    return CompoundSolution(
        c1=c1, c2=c2, gamma=gamma, lam=lam, rate=comib_rate(c1, c2),
        h_sq=h_sq, g_sq=g_sq, s_w=s_w, s_v=s_v,
        normalized=norm, audit=audit, verbatim_audit=verbatim,
    )


@dataclass(frozen=True, eq=False)
class SaddleReport:
    c1: float
    c2: float
    white_value: float
    # min player: SNR level pairs and their IB values at bottleneck c2
    source_levels: np.ndarray
    source_values: np.ndarray
    # max player: half-band rate pairs and the I(X;Z) they attain
    allocations: np.ndarray
    allocation_values: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(self.source_values.min() - self.white_value)

    @property
    def max_margin(self) -> float:
        return float(self.white_value - self.allocation_values.max())

    @property
    def certified(self) -> bool:
        return self.min_margin >= -MARGIN_TOL and self.max_margin >= -MARGIN_TOL


def _offsets(half_width, m):
    t = np.linspace(-half_width, half_width, m) if m > 1 else np.zeros(1)
    if not np.any(t == 0.0):
        t = np.sort(np.append(t, 0.0))
    return t


def saddle_check(c1: float, c2: float, family_size: int = 41) -> SaddleReport:
    """Grid certificate that the white SNR spectrum is a saddle point.

    Source side: half-band SNR levels with (1+g_a)(1+g_b) = 2^(4 c1), i.e.
    I(X;Y) = c1 for every member; the IB value at bottleneck c2 must be
    smallest for the white member. Encoder side: for the white source,
    half-band rates c2 +- s must not beat the even split.
    """
    if family_size < 1:
        raise ValueError("family_size must be >= 1")
    gamma = math.expm1(2.0 * c1 * LN2)
    white = vector_ib((gamma, gamma), c2).r if gamma > 0 else 0.0

    t = _offsets(2.0 * c1, family_size)
    levels = np.column_stack([np.expm1((2.0 * c1 + t) * LN2), np.expm1((2.0 * c1 - t) * LN2)])
    levels = np.maximum(levels, 0.0)
    src_vals = np.array([
        vector_ib(tuple(lv), c2).r if lv.max() > 0 else 0.0 for lv in levels
    ])

    rho1_sq = gamma / (1.0 + gamma)
    s = _offsets(c2, family_size)
    alloc = np.column_stack([c2 + s, c2 - s])
    alloc = np.maximum(alloc, 0.0)
    alloc_vals = np.array([0.5 * (scalar_ib(rho1_sq, a) + scalar_ib(rho1_sq, b)) for a, b in alloc])
    return SaddleReport(c1, c2, white, levels, src_vals, alloc, alloc_vals)
