import numpy as np
import pytest

from conftest import wls_closed_form
from fracspec.errors import DegenerateSpectrum, WindowExceedsSeries
from fracspec.estimator import (
    R1,
    R3,
    fit_power_law,
    generalized_hurst,
    generalized_hurst_track,
    gls_fit,
    rescale_volatility,
    rolling_estimate,
)
from fracspec.ingest import LogPriceSeries
from fracspec.spectrum import (
    ScaleSpectrum,
    model_spectrum,
    scale_spectrum,
    spectral_scaling,
)
from fracspec.synth import fbm_log_prices


def model_scale_spectrum(h, s, ji=2, je=182, window=365):
    j = np.arange(ji, je + 1)
    return ScaleSpectrum(j, model_spectrum(h, s, j), window - 2 * j + 1, window)


def test_gls_exact_model_weighting_invariant():
    spec = model_scale_spectrum(0.7, 2.0)
    for scheme in (R1, R3):
        c, p = gls_fit(spec, scheme)
        assert p == pytest.approx(2.4, abs=1e-12)
        assert c == pytest.approx(np.log2(4.0 * spectral_scaling(0.7)), abs=1e-11)
    c1, p1 = gls_fit(spec, R1)
    c3, p3 = gls_fit(spec, R3)
    assert p1 == pytest.approx(p3, abs=1e-10)
    assert c1 == pytest.approx(c3, abs=1e-10)


def test_gls_white_noise_boundary():
    j = np.arange(2, 40)
    spec = ScaleSpectrum(j, 5.0 * (2.0 * j), None, 80)
    _, p = gls_fit(spec, R1)
    assert p == pytest.approx(1.0, abs=1e-12)
    fit = fit_power_law(spec)
    assert fit.hurst_raw == pytest.approx(0.0, abs=1e-12)
    assert fit.hurst == 0.05  # clamped


def test_gls_matches_closed_form_solver(rng):
    for _ in range(50):
        j = np.sort(rng.choice(np.arange(2, 60), size=3, replace=False))
        y = rng.normal(0, 2, 3)
        spec = ScaleSpectrum(j, 2.0**y, None, 200)
        for scheme, expo in ((R1, 1.0), (R3, 3.0)):
            c, p = gls_fit(spec, scheme)
            c_ref, p_ref = wls_closed_form(j, y, expo)
            assert c == pytest.approx(c_ref, abs=1e-10)
            assert p == pytest.approx(p_ref, abs=1e-10)


def test_degenerate_spectrum_raises():
    j = np.arange(2, 10)
    values = model_spectrum(0.5, 1.0, j)
    values[3] = 0.0
    with pytest.raises(DegenerateSpectrum):
        gls_fit(ScaleSpectrum(j, values, None, 20), R1)
    with pytest.raises(DegenerateSpectrum):
        fit_power_law(ScaleSpectrum(j, np.zeros(len(j)), None, 20))


def test_exact_inversion():
    fit = fit_power_law(model_scale_spectrum(0.7, 2.0))
    assert fit.hurst == pytest.approx(0.7, abs=1e-10)
    assert fit.volatility == pytest.approx(2.0, rel=1e-10)


def test_clamp_rule():
    # slope 0.9 -> raw H = -0.05 -> clamped to 0.05, sigma uses clamped H
    j = np.arange(2, 30)
    spec = ScaleSpectrum(j, 3.0 * (2.0 * j) ** 0.9, None, 60)
    fit = fit_power_law(spec)
    assert fit.hurst_raw == pytest.approx(-0.05, abs=1e-12)
    assert fit.hurst == 0.05
    assert fit.volatility == pytest.approx(
        2.0 ** (fit.intercept / 2) / np.sqrt(spectral_scaling(0.05)), rel=1e-12
    )
    spec_hi = ScaleSpectrum(j, 3.0 * (2.0 * j) ** 3.2, None, 60)
    assert fit_power_law(spec_hi).hurst == 0.95


def test_scheme_selection_is_argmax(rng):
    for _ in range(30):
        j = np.arange(2, 40)
        y = (2.0 * j) ** 2.1 * np.exp(rng.normal(0, 0.6, len(j)))
        spec = ScaleSpectrum(j, y, None, 80)
        _, p1 = gls_fit(spec, R1)
        _, p3 = gls_fit(spec, R3)
        fit = fit_power_law(spec)
        assert fit.scheme == ("R3" if p3 > p1 else "R1")
        assert fit.slope == max(p1, p3)


def test_affine_invariance(rng):
    vals = np.cumsum(rng.normal(0, 1, 300))
    base = fit_power_law(scale_spectrum(vals))
    shifted = fit_power_law(scale_spectrum(vals + 250.0))
    assert shifted.hurst == pytest.approx(base.hurst, abs=1e-9)
    assert shifted.volatility == pytest.approx(base.volatility, rel=1e-9)
    lam = 7.3
    scaled = fit_power_law(scale_spectrum(lam * vals))
    assert scaled.hurst == pytest.approx(base.hurst, abs=1e-9)
    assert scaled.scheme == base.scheme
    assert scaled.volatility == pytest.approx(lam * base.volatility, rel=1e-9)


def test_rescale_volatility():
    fit = fit_power_law(model_scale_spectrum(0.6, 0.05))
    assert rescale_volatility(fit, 1) == pytest.approx(fit.volatility)
    assert rescale_volatility(fit, 365) == pytest.approx(0.05 * 365**0.6, rel=1e-9)
    assert rescale_volatility(fit, 365) == pytest.approx(1.72, abs=5e-3)
    half = fit_power_law(model_scale_spectrum(0.5, 0.05))
    assert rescale_volatility(half, 100) == pytest.approx(0.05 * 10.0, rel=1e-9)


def test_rolling_estimate_window_grid(rng):
    vals = np.cumsum(rng.normal(0, 1, 450))
    dates = np.datetime64("2015-01-01") + np.arange(450)
    series = LogPriceSeries(dates, vals, "x")
    track = rolling_estimate(series, window=365, step=7)
    assert track.centers[0] == 182.0
    assert np.all(np.diff(track.centers) == 7)
    assert len(track) == (450 - 365) // 7 + 1
    assert track.center_dates()[0].isoformat() == "2015-07-02"
    with pytest.raises(WindowExceedsSeries):
        rolling_estimate(series, window=451)


def test_rolling_estimate_recovers_constant_hurst():
    means, slopes = [], []
    for t in range(10):
        lp = fbm_log_prices(0.6, 1.0, 1000, seed=(53, t))
        track = rolling_estimate(lp, window=365, step=10)
        means.append(track.hurst.mean())
        slopes.append(np.polyfit(track.centers, track.hurst, 1)[0])
    # robust-scheme estimator carries a small upward selection bias at M=365
    assert abs(np.mean(means) - 0.6) < 0.08
    # constant parameters: no systematic trend across window positions
    assert abs(np.mean(slopes)) < 2.5e-4


def test_generalized_hurst_q2_equals_raw_fit(rng):
    vals = np.cumsum(rng.normal(0, 1, 200))
    fit = fit_power_law(scale_spectrum(vals))
    assert generalized_hurst(vals, 2.0) == fit.hurst_raw


def test_generalized_hurst_ramp_flat():
    vals = np.arange(120, dtype=float)
    hs = [generalized_hurst(vals, q) for q in (0.25, 1.0, 2.0, 4.0)]
    assert np.allclose(hs, hs[0], atol=1e-9)


def test_generalized_track_centering(rng):
    lp = fbm_log_prices(0.55, 1.0, 500, seed=77)
    track = generalized_hurst_track(lp, window=365, qs=(2.0,), step=10)
    assert track.qs == (2.0,)
    assert track.offsets[2.0] == 0.0
    assert np.array_equal(track.centered(2.0), track.raw[2.0])

    multi = generalized_hurst_track(lp, window=365, qs=(0.5, 1.0, 2.0, 4.0), step=10)
    for q in multi.qs:
        assert np.mean(multi.centered(q)) == pytest.approx(np.mean(multi.raw[2.0]), abs=1e-12)
    assert np.all(multi.spread() >= 0)


def test_generalized_track_always_carries_q2(rng):
    lp = fbm_log_prices(0.55, 1.0, 450, seed=78)
    track = generalized_hurst_track(lp, window=365, qs=(1.0, 4.0), step=20)
    assert 2.0 in track.qs
