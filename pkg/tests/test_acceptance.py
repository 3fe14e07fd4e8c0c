"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np

from gaussib.analysis import (
    grad_check,
    measure_equivalence,
    pf_grid_oracle,
    random_gaussian_pair,
    szego_convergence,
)
from gaussib.channel import audit_rates, design_forward_channel, realize_fir
from gaussib.compound import comib_rate, saddle_check
from gaussib.dpcm import end_to_end_rates, noisy_predictor
from gaussib.models import ar1_model, flat_model, halfband_model, random_model
from gaussib.pf import PfInstance, minimize_pf, objective_and_grad, random_orthogonal
from gaussib.spectra import Spectrum, entropy_power, snr_spectrum
from gaussib.waterfill import ib_rate, scalar_ib


def report(capsys, number, title, checks):
    """Print one line per criterion and fail with the list of broken checks."""
    failed = [name for name, ok in checks if not ok]
    status = "PASS" if not failed else "FAIL"
    detail = "" if not failed else "  broken: " + "; ".join(failed)
    with capsys.disabled():
        print(f"\n[acceptance {number}] {status}  {title}{detail}")
    assert not failed, failed


def test_criterion_1_flat_spectrum(capsys):
    t0 = time.perf_counter()
    sol = ib_rate(snr_spectrum(flat_model()), 1.0)
    elapsed = time.perf_counter() - t0
    oracle = scalar_ib(0.75, 1.0)
    report(capsys, 1, f"flat Gamma=3, C=1: theta={sol.theta:.12f} R={sol.r:.12f} "
                      f"oracle={oracle:.12f} ({elapsed:.3f}s)", [
        ("theta = 0.75 within 1e-9", abs(sol.theta - 0.75) <= 1e-9),
        ("R = closed form within 1e-9", abs(sol.r - oracle) <= 1e-9),
        ("runtime < 1 s", elapsed < 1.0),
    ])


def test_criterion_2_half_band(capsys):
    sol = ib_rate(snr_spectrum(halfband_model(4096)), 1.0)
    r_hand = 0.25 * math.log2(16 / (1 + 15 / 16))
    report(capsys, 2, f"half-band: theta={sol.theta:.12f} R={sol.r:.12f} hand={r_hand:.12f}", [
        ("theta = 15/16 within 1e-8", abs(sol.theta - 15 / 16) <= 1e-8),
        ("R = 1/4 log2(16/(1+15/16)) within 1e-8", abs(sol.r - r_hand) <= 1e-8),
    ])


def test_criterion_3_forward_channel_audit(capsys):
    worst_rate = worst_wiener = 0.0
    for seed in range(20):
        src = random_model(np.random.default_rng(seed), 4096)
        gamma = snr_spectrum(src)
        wiener = np.abs(src.s_xy.values) ** 2 / (src.s_x.values * src.s_y.values)
        for c in (0.25, 1.0, 4.0):
            ch = design_forward_channel(src, c)
            c_ach, r_ach = audit_rates(ch, src)
            r_ib = ib_rate(gamma, c).r
            worst_rate = max(worst_rate, abs(c_ach - c), abs(r_ach - r_ib))
            worst_wiener = max(worst_wiener, float(np.max(np.abs(ch.g_sq.values - wiener))))
    report(capsys, 3, f"audit on 20 random models x 3 rates: max rate err {worst_rate:.2e}, "
                      f"max Wiener err {worst_wiener:.2e}", [
        ("(C, R) within 1e-8", worst_rate <= 1e-8),
        ("|G|^2 Wiener identity within 1e-10", worst_wiener <= 1e-10),
    ])


def test_criterion_4_szego(capsys):
    t0 = time.perf_counter()
    rate, rows = szego_convergence(ar1_model(), [32, 64, 128, 256, 512])
    elapsed = time.perf_counter() - t0
    gaps = [r.gap for r in rows]
    rel = rows[-1].gap / rate
    report(capsys, 4, f"Szego AR(1): rate {rate:.6f}, n=512 rel gap {rel:.2e}, "
                      f"gaps {['%.2e' % g for g in gaps]} ({elapsed:.2f}s)", [
        ("n=512 within 1%", rel <= 0.01),
        ("gap nonincreasing in n", all(b <= a for a, b in zip(gaps, gaps[1:]))),
        ("runtime < 30 s", elapsed < 30.0),
    ])


def test_criterion_5_dpcm_loop(capsys):
    t0 = time.perf_counter()
    checks = []
    lines = []
    for name, src in (("flat", flat_model()), ("AR(1)", ar1_model())):
        est = end_to_end_rates(src, 1.0, order=64, length=2 ** 20, seed=0)
        rel = abs(est.c_hat - est.c_target) / est.c_target
        lines.append(f"{name} c_hat={est.c_hat:.5f} (rel {rel:.1e})")
        checks.append((f"{name}: identity residual <= 1e-12", est.identity_residual <= 1e-12))
        checks.append((f"{name}: c_hat within 2% of C", rel <= 0.02))
    # sigma_L^2 at L = 256 against the entropy-power limit on smooth loop spectra
    worst = 0.0
    for src in (flat_model(), ar1_model()):
        ch = design_forward_channel(src, 1.0)
        fir = realize_fir(ch, 257, 128)
        f_sq = np.ones(src.grid.n_points)
        for name in ("omega", "g", "h1"):
            f_sq = f_sq * np.abs(fir.response(name, src.grid)) ** 2
        s_u = Spectrum(src.grid, f_sq * src.s_y.values)
        pred = noisy_predictor(s_u, ch.theta, 256)
        limit = entropy_power(Spectrum(src.grid, s_u.values + ch.theta)) - ch.theta
        worst = max(worst, abs(pred.sigma_l_sq - limit))
    elapsed = time.perf_counter() - t0
    checks.append(("sigma_256^2 = P_e(S_U + theta) - theta within 1e-6", worst <= 1e-6))
    checks.append(("runtime < 60 s", elapsed < 60.0))
    report(capsys, 5, f"DPCM: {', '.join(lines)}, sigma_L err {worst:.1e} ({elapsed:.1f}s)",
           checks)


def test_criterion_6_compound(capsys):
    t0 = time.perf_counter()
    closed = 0.5 * math.log2(1 / (1 - 0.75 * 0.75))
    v11 = comib_rate(1, 1)
    lim_hi = max(abs(comib_rate(30, c2) - c2) for c2 in (0.1, 0.5, 1.0, 2.0, 5.0))
    lim_zero = max(abs(comib_rate(c1, 0)) for c1 in (0.1, 1.0, 5.0, 30.0))
    reps = [saddle_check(c1, c2, 41) for c1, c2 in ((1, 1), (0.5, 2))]
    elapsed = time.perf_counter() - t0
    margins = [(r.min_margin, r.max_margin) for r in reps]
    report(capsys, 6, f"CoMIB(1,1)={v11:.12f}, margins {margins} ({elapsed:.3f}s)", [
        ("comib_rate(1,1) closed form within 1e-10", abs(v11 - closed) <= 1e-10),
        ("comib_rate(30,c2) -> c2 within 1e-8", lim_hi <= 1e-8),
        ("comib_rate(c1,0) = 0 within 1e-8", lim_zero <= 1e-8),
        ("saddle certified, margins >= -1e-9", all(r.certified for r in reps)),
        ("runtime < 10 s", elapsed < 10.0),
    ])


def test_criterion_7_privacy_funnel(capsys):
    t0 = time.perf_counter()
    decoupled = minimize_pf(PfInstance([0.9, 0.0], np.eye(2), 1.0), restarts=16, seed=0)
    gaps = []
    grad_errs = []
    for seed in range(3):
        rng = np.random.default_rng(100 + seed)
        psi = np.sort(rng.uniform(0.1, 0.95, 3))[::-1]
        inst = PfInstance(psi, random_orthogonal(3, rng), 0.5)
        sol = minimize_pf(inst, restarts=16, seed=seed)
        oracle, _, _ = pf_grid_oracle(inst, step=0.01)
        gaps.append(sol.value - oracle)
        u0 = random_orthogonal(3, rng)
        r0 = rng.dirichlet(np.ones(3)) * 1.5
        grad_errs.append(grad_check(lambda u: objective_and_grad(inst, u, r0)[0],
                                    lambda u: objective_and_grad(inst, u, r0)[1], u0))
        grad_errs.append(grad_check(lambda r: objective_and_grad(inst, u0, r)[0],
                                    lambda r: objective_and_grad(inst, u0, r)[2], r0))
    elapsed = time.perf_counter() - t0
    report(capsys, 7, f"PF: decoupled value {decoupled.value:.1e}, solver - oracle "
                      f"{['%.1e' % g for g in gaps]}, grad err {max(grad_errs):.1e} "
                      f"({elapsed:.1f}s)", [
        ("psi=(0.9,0) value <= 1e-8", decoupled.value <= 1e-8),
        ("n=3 value <= grid oracle + 1e-6", all(g <= 1e-6 for g in gaps)),
        ("gradient finite-difference error <= 1e-5", max(grad_errs) <= 1e-5),
        ("runtime < 60 s", elapsed < 60.0),
    ])


def test_criterion_8_equivalence(capsys):
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = 1 + seed % 6
        m = 1 + (seed // 6) % 6
        worst = max(worst, measure_equivalence(random_gaussian_pair(n, rng, m)).max_mismatch)
    report(capsys, 8, f"equivalence on 50 random pairs: max mismatch {worst:.2e}", [
        ("sorted gamma_i vs d_i^2/(1-d_i^2) within 1e-8", worst <= 1e-8),
    ])


def test_criterion_9_rate_curves(capsys):
    cs = np.linspace(0.0, 6.0, 121)
    sources = {"flat": flat_model(), "AR(1)": ar1_model(), "half-band": halfband_model()}
    rng = np.random.default_rng(7)
    for k in range(5):
        sources[f"random{k}"] = random_model(rng, 1024)
    worst_mono = worst_conc = worst_bound = -math.inf
    for src in sources.values():
        g = snr_spectrum(src)
        r = np.array([ib_rate(g, c).r for c in cs])
        worst_mono = max(worst_mono, float(np.max(-np.diff(r))))
        worst_conc = max(worst_conc, float(np.max(np.diff(r, 2))))
        worst_bound = max(worst_bound, float(np.max(r - cs)))
    report(capsys, 9, f"rate curves on {len(sources)} sources: max decrease {worst_mono:.1e}, "
                      f"max convexity {worst_conc:.1e}, max R-C {worst_bound:.1e}", [
        ("nondecreasing (slack 1e-9)", worst_mono <= 1e-9),
        ("concave (slack 1e-9)", worst_conc <= 1e-9),
        ("R <= C", worst_bound <= 1e-12),
    ])
