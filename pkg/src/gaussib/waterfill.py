"""Water-filling solutions of the Gaussian information bottleneck.

The process form works on an SNR spectrum tabulated on the midpoint grid,
the vector form on the eigenvalues of an SNR covariance matrix. Both reduce
to the same weighted problem: with equal weights 1/n per point,

    C(theta) = 1/2 * mean(log max(1, gamma / theta))
    R(theta) = 1/2 * mean(log max(1, (1 + gamma) / (1 + theta)))

Everything is computed in nats and converted to bits once, on the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnachievableRate
from .spectra import Spectrum

__all__ = [
    "VectorIbInstance",
    "WaterFillSolution",
    "solve_theta",
    "ib_rate",
    "vector_ib",
    "scalar_ib",
    "bottleneck_rate",
    "LN2",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class VectorIbInstance:
    gammas: tuple

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        if any(not (x >= 0) for x in g):
            raise ValueError("SNR eigenvalues must be nonnegative")
        if not g:
            raise ValueError("need at least one eigenvalue")
        object.__setattr__(self, "gammas", g)


@dataclass(frozen=True, eq=False)
class WaterFillSolution:
    """Water level, rates in bits and the per-point distortion profile.

    ``d_theta`` is a Spectrum for process inputs and an array for vector
    inputs. ``theta`` is ``inf`` when the source has deterministic
    frequencies, which then carry the whole bottleneck rate.
    """

    theta: float
    c: float
    r: float
    d_theta: object
    active_mask: np.ndarray


def _values(gamma):
    if isinstance(gamma, Spectrum):
        return gamma.values
    if isinstance(gamma, VectorIbInstance):
        return np.asarray(gamma.gammas)
    return np.asarray(gamma, dtype=float)


def bottleneck_rate(gamma, theta: float) -> float:
    """C(theta) in bits: 1/2 mean log2 max(1, gamma/theta)."""
    g = _values(gamma)
    with np.errstate(divide="ignore"):
        ratio = np.maximum(g / theta, 1.0)
    return 0.5 * float(np.mean(np.log(ratio))) / LN2


def _water_level(g: np.ndarray, c_nats: float) -> float:
    """Exact theta with 1/2 mean log max(1, g/theta) = c_nats.

    On a fixed active set of the k largest values the constraint is linear
    in log(theta), so walking the sorted breakpoints gives theta in closed
    form; no bisection is needed.
    """
    n = g.size
    top = np.sort(g[g > 0])[::-1]
    logs = np.log(top)
    csum = np.cumsum(logs)
    for k in range(1, top.size + 1):
        log_theta = (csum[k - 1] - 2.0 * n * c_nats) / k
        nxt = logs[k] if k < top.size else -np.inf
        if log_theta >= nxt:
            return float(np.exp(log_theta))
    raise AssertionError("unreachable: the last active set always fits")


def solve_theta(gamma, c_target: float) -> float:
    """Water level theta meeting the bottleneck constraint ``c_target`` (bits).

    Returns ``max(gamma)`` for a zero rate and ``inf`` when deterministic
    (infinite-SNR) points exist, since those absorb any finite rate.
    """
    g = _values(gamma)
    if c_target < 0 or not math.isfinite(c_target):
        raise ValueError(f"bottleneck rate must be finite and >= 0, got {c_target}")
    if np.isinf(g).any():
        return math.inf
    gmax = float(g.max()) if g.size else 0.0
    if c_target == 0:
        return gmax
    if gmax <= 0:
        raise UnachievableRate("SNR is identically zero; no positive rate is achievable")
    return _water_level(g, c_target * LN2)


def _solve(gamma, c_target):
    g = _values(gamma)
    theta = solve_theta(g, c_target)
    if math.isinf(theta):
        det = np.isinf(g)
        d = np.where(det, np.inf, g)
        # all rate sits on deterministic points, where I(X;Z) = I(Y;Z)
        return theta, float(c_target), float(c_target), d, det
    active = g > theta
    d = np.minimum(g, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        c_terms = np.where(active, np.log(g / theta), 0.0)
    r_terms = np.where(active, np.log1p(g) - np.log1p(theta), 0.0)
    c = 0.5 * float(np.mean(c_terms)) / LN2
    r = 0.5 * float(np.mean(r_terms)) / LN2
    return theta, c, r, d, active


def ib_rate(gamma: Spectrum, c_target: float) -> WaterFillSolution:
    """IB rate of a Gaussian process with SNR spectrum ``gamma`` at bottleneck ``c_target`` bits."""
    theta, c, r, d, active = _solve(gamma, c_target)
    if isinstance(gamma, Spectrum):
        d = Spectrum(gamma.grid, d)
    return WaterFillSolution(theta, c, r, d, active)


def vector_ib(inst: VectorIbInstance, c_target: float) -> WaterFillSolution:
    if not isinstance(inst, VectorIbInstance):
        inst = VectorIbInstance(tuple(inst))
    theta, c, r, d, active = _solve(inst, c_target)
    return WaterFillSolution(theta, c, r, d, active)


def scalar_ib(rho1_sq: float, c2: float) -> float:
    """IB value 1/2 log2 1/(1 - rho1^2 rho2^2) with rho2^2 = 1 - 2^(-2 c2).

    >>> round(scalar_ib(1.0, 1.0), 12)
    1.0
    """
    rho2_sq = -math.expm1(-2.0 * c2 * LN2)
    return -0.5 * math.log1p(-rho1_sq * rho2_sq) / LN2
