"""Relaxed vector Gaussian privacy funnel.

Minimize  -1/(2n) log2 det(I - U^T Phi^2 U V2^T Psi^2 V2)
over orthogonal U and diagonal Phi subject to -1/(2n) sum log2(1 - phi_i^2) = C1.

Phi is parameterized by per-coordinate rates r_i >= 0 with
phi_i^2 = 1 - 2^(-2 r_i), which turns the constraint into sum(r) = n * C1,
a scaled simplex. Each iteration takes one joint step: a projected
gradient step on the simplex and a QR-retracted Riemannian step on O(n).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceFailure, SingularArgument
from .waterfill import LN2

__all__ = [
    "PfInstance",
    "PfSolution",
    "pf_objective",
    "objective_and_grad",
    "minimize_pf",
    "project_simplex",
    "qr_retraction",
    "rates_to_phi",
    "phi_to_rates",
]

GRAD_TOL = 1e-6
MAX_ITER = 10_000


def _sign_fix(q, r):
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def qr_retraction(u: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """qf(U + xi) with a positive-diagonal R factor."""
    q, r = np.linalg.qr(u + xi)
    return _sign_fix(q, r)


def random_orthogonal(n: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return _sign_fix(q, r)


def project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = total}."""
    if total <= 0:
        return np.zeros_like(v)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    k = np.arange(1, v.size + 1)
    hits = np.nonzero(u - css / k > 0)[0]
    # the first index always qualifies in exact arithmetic
    rho = hits[-1] if hits.size else 0
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def rates_to_phi(r) -> np.ndarray:
    return np.sqrt(-np.expm1(-2.0 * LN2 * np.asarray(r, dtype=float)))


def phi_to_rates(phi) -> np.ndarray:
    return -0.5 * np.log1p(-np.asarray(phi, dtype=float) ** 2) / LN2


@dataclass(frozen=True, eq=False)
class PfInstance:
    psi: np.ndarray
    v2: np.ndarray
    c1: float

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=float)
        v2 = np.asarray(self.v2, dtype=float)
        n = psi.size
        if v2.shape != (n, n):
            raise ValueError(f"v2 must be {n}x{n}")
        if (psi < 0).any() or (psi >= 1).any():
            raise ValueError("psi entries must lie in [0, 1)")
        if np.max(np.abs(v2.T @ v2 - np.eye(n))) > 1e-10:
            raise ValueError("v2 is not orthogonal")
        if self.c1 < 0:
            raise ValueError("c1 must be nonnegative")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "v2", v2)

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def b(self) -> np.ndarray:
        """V2^T Psi^2 V2."""
        return self.v2.T @ (self.psi[:, None] ** 2 * self.v2)

    @classmethod
    def from_covariances(cls, sigma_y, sigma_z, sigma_zy, c1) -> "PfInstance":
        """Take (psi, V2) from the SVD of Sigma_Z^-1/2 Sigma_ZY Sigma_Y^-1/2."""
        from .analysis import inv_sqrt_psd

        m = inv_sqrt_psd(np.asarray(sigma_z, float)) @ np.asarray(sigma_zy, float) \
            @ inv_sqrt_psd(np.asarray(sigma_y, float))
        _, s, vt = np.linalg.svd(m)
        return cls(np.minimum(s, np.nextafter(1.0, 0.0)), vt.T, c1)


@dataclass(frozen=True, eq=False)
class PfSolution:
    """Relaxed PF optimum. ``value`` is the relaxed objective in bits."""

    u1: np.ndarray
    phi: np.ndarray
    value: float
    grad_norm: float = 0.0
    iterations: int = 0
    restart_values: list = field(default_factory=list)

    @property
    def rates(self) -> np.ndarray:
        return phi_to_rates(self.phi)


def _logdet_cost(u, p, b):
    """-ln det(I - P A) with A = U B U^T, via Cholesky of the symmetric form."""
    sp = np.sqrt(p)
    a = u @ b @ u.T
    m = np.eye(len(p)) - sp[:, None] * a * sp[None, :]
    m = 0.5 * (m + m.T)
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise SingularArgument("I - U^T Phi^2 U V2^T Psi^2 V2 is singular") from None
    return -2.0 * float(np.sum(np.log(np.diag(chol)))), a


def pf_objective(inst: PfInstance, u1, phi) -> float:
    """Relaxed PF objective in bits.

    Uses det(I - U^T P U B) = det(I - P U B U^T) with P = diag(phi^2).
    """
    u1 = np.asarray(u1, dtype=float)
    p = np.asarray(phi, dtype=float) ** 2
    cost, _ = _logdet_cost(u1, p, inst.b)
    return cost / (2 * inst.n * LN2)


def objective_and_grad(inst: PfInstance, u1, r):
    """Objective (bits) and Euclidean gradients w.r.t. U1 and the rates r."""
    n = inst.n
    u = np.asarray(u1, dtype=float)
    r = np.asarray(r, dtype=float)
    p = -np.expm1(-2.0 * LN2 * r)
    b = inst.b
    cost, a = _logdet_cost(u, p, b)
    scale = 1.0 / (2 * n * LN2)
    minv_p = np.linalg.solve(np.eye(n) - p[:, None] * a, np.diag(p))
    minv_p = 0.5 * (minv_p + minv_p.T)
    # d/dU of -ln det(I - P U B U^T) is 2 (I - PA)^-1 P U B, and (I - PA)^-1 P is symmetric
    g_u = 2.0 * scale * (minv_p @ u @ b)
    minv = np.linalg.solve(np.eye(n) - p[:, None] * a, np.eye(n))
    g_p = scale * np.diag(a @ minv)
    g_r = g_p * (2.0 * LN2 * np.exp(-2.0 * LN2 * r))
    return scale * cost, g_u, g_r


def _riemannian(u, g):
    x = u.T @ g
    return u @ (0.5 * (x - x.T))


def _stationarity(u, r, g_u, g_r, total):
    xi = _riemannian(u, g_u)
    gm = r - project_simplex(r - g_r, total)
    return math.sqrt(float(np.sum(xi ** 2) + np.sum(gm ** 2))), xi


def _descend(inst, u, r, max_iter, tol):
    total = inst.n * inst.c1
    f, g_u, g_r = objective_and_grad(inst, u, r)
    step = 1.0
    it = 0
    stat, xi = _stationarity(u, r, g_u, g_r, total)
    while stat > tol and it < max_iter:
        it += 1
        while True:
            u_new = qr_retraction(u, -step * xi)
            r_new = project_simplex(r - step * g_r, total)
            try:
                f_new, gu_new, gr_new = objective_and_grad(inst, u_new, r_new)
            except SingularArgument:
                f_new = math.inf
            moved = np.sum((r_new - r) ** 2) + step ** 2 * np.sum(xi ** 2)
            if f_new <= f - 1e-4 * moved / step or step < 1e-14:
                break
            step *= 0.5
        if not math.isfinite(f_new):
            break
        # Barzilai-Borwein length from the joint displacement
        s_u, s_r = u_new - u, r_new - r
        y_u = _riemannian(u_new, gu_new) - xi
        y_r = gr_new - g_r
        sy = float(np.sum(s_u * y_u) + np.sum(s_r * y_r))
        ss = float(np.sum(s_u ** 2) + np.sum(s_r ** 2))
        u, r, f, g_u, g_r = u_new, r_new, f_new, gu_new, gr_new
        stat, xi = _stationarity(u, r, g_u, g_r, total)
        step = ss / sy if sy > 1e-300 else min(2 * step, 1e3)
        step = min(max(step, 1e-8), 1e6)
    return u, r, f, stat, it


def _restart(inst, seed, max_iter, tol):
    rng = np.random.default_rng(seed)
    n = inst.n
    u = random_orthogonal(n, rng)
    r = rng.dirichlet(np.ones(n)) * n * inst.c1
    return _descend(inst, u, r, max_iter, tol)


def minimize_pf(inst: PfInstance, restarts: int = 16, seed: int = 0, *,
                max_iter: int = MAX_ITER, tol: float = GRAD_TOL,
                workers: int = 1) -> PfSolution:
    """Best of ``restarts`` projected Riemannian gradient descents.

    Restart ``k`` is seeded with ``seed + k``; the lowest objective among
    runs that reach ``tol`` in stationarity is returned. Raises
    ConvergenceFailure when no run gets there within ``max_iter`` steps.
    """
    if inst.c1 == 0:
        n = inst.n
        return PfSolution(np.eye(n), np.zeros(n), 0.0)
    seeds = [seed + k for k in range(max(restarts, 1))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda s: _restart(inst, s, max_iter, tol), seeds))
    else:
        runs = [_restart(inst, s, max_iter, tol) for s in seeds]
    good = [run for run in runs if run[3] <= tol]
    if not good:
        best_stat = min(run[3] for run in runs)
        raise ConvergenceFailure(
            f"no restart reached stationarity {tol:g} in {max_iter} iterations "
            f"(best {best_stat:.3g})"
        )
    u, r, f, stat, it = min(good, key=lambda run: run[2])
    return PfSolution(u, rates_to_phi(r), f if f > 0 else 0.0, stat, it, [run[2] for run in runs])
