import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussib.channel import audit_rates, chain_rates, design_forward_channel, realize_fir
from gaussib.errors import ModelError
from gaussib.models import random_model
from gaussib.spectra import BivariateSpectra, CrossSpectrum, FrequencyGrid, Spectrum, snr_spectrum
from gaussib.waterfill import ib_rate


def test_flat_audit(flat):
    ch = design_forward_channel(flat, 1.0)
    c, r = audit_rates(ch, flat)
    assert c == pytest.approx(1.0, abs=1e-10)
    assert r == pytest.approx(0.5963225389711979, abs=1e-10)


def test_ar1_audit(ar1):
    ch = design_forward_channel(ar1, 1.0)
    c, r = audit_rates(ch, ar1)
    sol = ib_rate(snr_spectrum(ar1), 1.0)
    assert (c, r) == pytest.approx((sol.c, sol.r), abs=1e-10)


def test_inactive_band_is_cut(halfband):
    ch = design_forward_channel(halfband, 1.0)
    outside = np.abs(halfband.grid.frequencies) > 0.25
    assert np.all(ch.h1_sq.values[outside] == 0)
    assert np.all(ch.h2_sq.values == ch.h1_sq.values)


def test_zero_rate_audit(flat):
    ch = design_forward_channel(flat, 0.0)
    assert audit_rates(ch, flat) == (0.0, 0.0)


def test_deterministic_source_rejected():
    grid = FrequencyGrid(64)
    one = Spectrum.constant(grid, 1.0)
    src = BivariateSpectra(one, one, CrossSpectrum(grid, np.ones(64)))
    with pytest.raises(ModelError):
        design_forward_channel(src, 1.0)


@settings(max_examples=15)
@given(seed=st.integers(0, 2 ** 31), c=st.sampled_from([0.25, 1.0, 4.0]))
def test_random_models_audit_and_wiener(seed, c):
    src = random_model(np.random.default_rng(seed), 512)
    ch = design_forward_channel(src, c)
    sol = ib_rate(snr_spectrum(src), c)
    assert audit_rates(ch, src) == pytest.approx((sol.c, sol.r), abs=1e-8)
    wiener = np.abs(src.s_xy.values) ** 2 / (src.s_x.values * src.s_y.values)
    np.testing.assert_allclose(ch.g_sq.values, wiener, atol=1e-10)


def test_chain_rates_data_processing(ar1):
    # any prefilter: I(X;Z) <= I(Y;Z)
    rng = np.random.default_rng(5)
    grid = ar1.grid
    for _ in range(5):
        f_sq = np.abs(1 + 0.5 * rng.standard_normal() * np.cos(2 * np.pi * grid.frequencies)) ** 2
        c, r = chain_rates(ar1, f_sq, np.ones(grid.n_points), 0.3)
        assert r <= c + 1e-12


def test_fir_flat_is_exact(flat):
    fir = realize_fir(design_forward_channel(flat, 1.0), 1, 0)
    assert fir.max_error < 1e-12


@pytest.mark.parametrize("src_name", ["ar1", "halfband"])
def test_fir_error_monotone_over_doublings(src_name, request):
    src = request.getfixturevalue(src_name)
    ch = design_forward_channel(src, 1.0)
    errors = [realize_fir(ch, k, k // 2).max_error for k in (65, 129, 257, 513)]
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))


def test_fir_postfilter_is_time_reverse(ar1):
    fir = realize_fir(design_forward_channel(ar1, 1.0), 33, 10)
    assert np.array_equal(fir.taps["h2"], fir.taps["h1"][::-1])
    assert fir.delays["h2"] == 33 - 1 - 10
    h1 = np.abs(fir.response("h1", ar1.grid))
    h2 = np.abs(fir.response("h2", ar1.grid))
    assert np.max(np.abs(h1 - h2)) < 1e-12


def test_fir_bad_arguments(flat):
    ch = design_forward_channel(flat, 1.0)
    with pytest.raises(ValueError):
        realize_fir(ch, 8, 8)
